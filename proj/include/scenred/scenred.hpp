#pragma once

#include "scenred/config.hpp"
#include "scenred/dynamics.hpp"
#include "scenred/evaluation.hpp"
#include "scenred/guarantees.hpp"
#include "scenred/lp_format.hpp"
#include "scenred/milp.hpp"
#include "scenred/ocp.hpp"
#include "scenred/reduction.hpp"
#include "scenred/scenario.hpp"
