#pragma once

#include "sspmcts/core/config.hpp"
#include "sspmcts/core/types.hpp"
#include "sspmcts/envs/corridor.hpp"
#include "sspmcts/envs/mountain_car.hpp"
#include "sspmcts/envs/pendulum.hpp"
#include "sspmcts/envs/registry.hpp"
#include "sspmcts/hoo.hpp"
#include "sspmcts/planner.hpp"
#include "sspmcts/search_tree.hpp"
