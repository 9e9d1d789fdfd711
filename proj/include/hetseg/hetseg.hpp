#pragma once

#include "hetseg/core.hpp"
#include "hetseg/gaussian.hpp"
#include "hetseg/rng.hpp"
#include "hetseg/robust_scale.hpp"
#include "hetseg/weighted_dp.hpp"
#include "hetseg/model_selection.hpp"
#include "hetseg/baselines.hpp"
#include "hetseg/pipeline.hpp"
#include "hetseg/sim_bench.hpp"
#include "hetseg/ingest.hpp"
#include "hetseg/commands.hpp"
