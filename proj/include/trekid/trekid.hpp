#pragma once

#include "trekid/errors.hpp"
#include "trekid/flow.hpp"
#include "trekid/graphgen.hpp"
#include "trekid/identify.hpp"
#include "trekid/io.hpp"
#include "trekid/mixed_graph.hpp"
#include "trekid/numeric.hpp"
#include "trekid/rng.hpp"
#include "trekid/sim.hpp"
#include "trekid/vset.hpp"
