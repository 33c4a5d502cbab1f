#pragma once

#include <vector>

#include "tdscw/instance.hpp"
#include "tdscw/milp.hpp"
#include "tdscw/solution.hpp"
#include "tdscw/timespace.hpp"

namespace tdscw::lsns {

// A neighborhood: the orders, pods, and station-period block freed for
// re-optimization. Periods are a contiguous inclusive window.
struct SubproblemSpec {
  std::vector<int> orders;    // sorted ids
  std::vector<int> pods;      // sorted ids
  std::vector<int> stations;  // sorted ids
  int t_begin = 1;
  int t_end = 0;

  bool contains_period(int t) const { return t >= t_begin && t <= t_end; }
  bool empty() const { return orders.empty() && pods.empty(); }
};

// Spec covering the entire instance (one LSNS iteration then equals an exact solve).
SubproblemSpec full_spec(const Instance& inst);

struct SubproblemOptions {
  double time_limit_seconds = 5.0;
  long long node_limit = 4000;         // deterministic cap; binds before the clock
  bool require_complete_orders = false;  // every freed line must be served
  bool minimize_pod_stops = false;       // station-departure count as objective
};

struct SubproblemResult {
  TdscwSolution solution;   // full-instance solution with the block re-optimized
  int local_objective = 0;  // picks inside (orders x stations x window x pods)
  bool feasible = true;
  milp::SolveStatus status = milp::SolveStatus::optimal;
};

// Fixes everything outside the spec to the incumbent and re-optimizes inside.
// The incumbent restricted to the spec stays feasible, so the returned
// solution never scores below it (unless completeness is required and fails,
// in which case feasible=false and the incumbent is returned unchanged).
SubproblemResult solve_subproblem(const Instance& inst, const TimeSpaceNetwork& net,
                                  const TdscwSolution& incumbent, const SubproblemSpec& spec,
                                  const SubproblemOptions& options = {});

// Picks of `sol` that fall entirely inside the spec.
int local_picks(const Instance& inst, const TdscwSolution& sol, const SubproblemSpec& spec);

}  // namespace tdscw::lsns
