#pragma once

#include "csh.hpp"
#include "generator.hpp"
#include "instance.hpp"
#include "milp/branch_and_bound.hpp"
#include "milp/external.hpp"
#include "milp/formulations.hpp"
#include "milp/lp_format.hpp"
#include "milp/model.hpp"
#include "milp/solve.hpp"
#include "mnaa.hpp"
#include "moves.hpp"
#include "report.hpp"
#include "route_pool.hpp"
#include "run.hpp"
#include "solution.hpp"
#include "vnd.hpp"
