#pragma once

#include "qng/certification.hpp"
#include "qng/errors.hpp"
#include "qng/figure_table.hpp"
#include "qng/gaussian_boundary.hpp"
#include "qng/measurement_sim.hpp"
#include "qng/photon_stats.hpp"
#include "qng/planner.hpp"
#include "qng/random.hpp"
#include "qng/state_models.hpp"
