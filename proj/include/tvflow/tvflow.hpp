#pragma once

#include "tvflow/error.hpp"
#include "tvflow/polynomial.hpp"
#include "tvflow/profile.hpp"
#include "tvflow/scenario.hpp"
#include "tvflow/facets.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/resolvent.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/gridoracle.hpp"
#include "tvflow/validate.hpp"
#include "tvflow/io.hpp"
