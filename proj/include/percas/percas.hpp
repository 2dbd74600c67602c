#pragma once

#include "percas/adam.hpp"
#include "percas/body.hpp"
#include "percas/cache.hpp"
#include "percas/cascade_solver.hpp"
#include "percas/checkpoint.hpp"
#include "percas/composition.hpp"
#include "percas/csv.hpp"
#include "percas/domain.hpp"
#include "percas/expression.hpp"
#include "percas/jet.hpp"
#include "percas/latent_system.hpp"
#include "percas/loss.hpp"
#include "percas/mol.hpp"
#include "percas/operator.hpp"
#include "percas/plan.hpp"
#include "percas/polynomial.hpp"
#include "percas/presets.hpp"
#include "percas/problem.hpp"
#include "percas/problem_json.hpp"
#include "percas/task.hpp"
#include "percas/trainer.hpp"
