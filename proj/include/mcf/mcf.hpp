#pragma once

#include "mcf/cubature.hpp"
#include "mcf/models/battery.hpp"
#include "mcf/models/vanderpol.hpp"
#include "mcf/monte_carlo.hpp"
#include "mcf/rng.hpp"
#include "mcf/robust_filter.hpp"
#include "mcf/sim.hpp"
#include "mcf/types.hpp"
#include "mcf/weights.hpp"
