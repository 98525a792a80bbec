#pragma once

#include "finestruct/bench.hpp"
#include "finestruct/csv.hpp"
#include "finestruct/engine.hpp"
#include "finestruct/error.hpp"
#include "finestruct/generators.hpp"
#include "finestruct/hypothesis.hpp"
#include "finestruct/pde.hpp"
#include "finestruct/random.hpp"
#include "finestruct/render.hpp"
#include "finestruct/report.hpp"
#include "finestruct/stats.hpp"
#include "finestruct/version.hpp"
