#pragma once

#include "pgh/errors.hpp"
#include "pgh/model_space.hpp"
#include "pgh/norms.hpp"
#include "pgh/solver.hpp"
#include "pgh/analysis.hpp"
#include "pgh/io.hpp"
#include "pgh/bench.hpp"
#include "pgh/plot.hpp"
