#pragma once

#include "mvt/bl_function.hpp"
#include "mvt/errors.hpp"
#include "mvt/euler_scheme.hpp"
#include "mvt/flat_metric.hpp"
#include "mvt/io.hpp"
#include "mvt/measure.hpp"
#include "mvt/mild_solver.hpp"
#include "mvt/scenario.hpp"
#include "mvt/simplex.hpp"
#include "mvt/stopped_flow.hpp"
#include "mvt/trajectory.hpp"
#include "mvt/velocity_model.hpp"
#include "mvt/weak_residual.hpp"
