#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdscw/instance.hpp"
#include "tdscw/milp.hpp"
#include "tdscw/solution.hpp"
#include "tdscw/timespace.hpp"

namespace tdscw {

// Constraint families of the integrated model, named by what they enforce.
enum class ConstraintFamily {
  order_single_station,    // each order assigned to at most one station
  open_order_limit,        // open orders per station-period capped
  station_time_budget,     // pick and pod-processing time fits the period
  pod_flow_start,          // each pod leaves its start node exactly once
  pod_flow_conservation,   // pod flow balanced at interior nodes
  pod_inventory,           // picks bounded by shelf stock
  intersection_capacity,   // congestion contributions capped per cell-period
  pick_requires_departure, // a pick coincides with its pod departing the station
  pick_station_link,       // picks only at the order's assigned station
  pick_monotone,           // cumulative pick indicators never decrease
  first_item_flag,         // started flag covers every pick
  all_items_flag,          // finished flag needs every line delivered
  open_flag_balance,       // open = started - finished
  pick_once,               // each order line served at most once
  storage_capacity,        // pods idling per location capped (flexible policy)
};

std::string to_string(ConstraintFamily f);

struct Violation {
  ConstraintFamily family;
  std::string detail;
  double slack = 0.0;  // amount by which the constraint is missed
};

struct ModelSizeReport {
  long long variable_count = 0;
  long long constraint_count = 0;
  std::map<std::string, long long> variables_by_family;   // z/x/y/f/g/v
  std::map<ConstraintFamily, long long> constraints_by_family;
};

// The integrated MILP plus the index maps needed to read solutions back out.
struct TdscwModel {
  milp::MilpModel milp;
  ModelSizeReport size;

  // variable indexing
  int num_orders = 0, num_stations = 0, horizon = 0;
  std::vector<std::vector<std::vector<int>>> line_pods;  // [order][line] -> pod ids
  // x var for (order, line, pod_pos, station, t in 1..T):
  std::vector<std::vector<int>> x_base;  // [order][line] -> base index
  std::vector<int> y_base;               // [pod] -> base (over arcs_for_pod order)
  int z_base = 0, f_base = 0, g_base = 0, v_base = 0;

  int x_var(int order, int line, int pod_pos, int station, int t) const {
    return x_base[order][line] +
           ((pod_pos * num_stations + station) * horizon + (t - 1));
  }
  int y_var(int pod, int arc_pos) const { return y_base[pod] + arc_pos; }
  int z_var(int order, int station) const { return z_base + order * num_stations + station; }
  int f_var(int order, int station, int t) const {
    return f_base + (order * num_stations + station) * horizon + (t - 1);
  }
  int g_var(int order, int station, int t) const {
    return g_base + (order * num_stations + station) * horizon + (t - 1);
  }
  int v_var(int order, int station, int t) const {
    return v_base + (order * num_stations + station) * horizon + (t - 1);
  }
};

// Builds the full integrated model (all families above; storage_capacity only
// under the flexible policy).
TdscwModel build_model(const Instance& inst, const TimeSpaceNetwork& net);

// Reads a MILP assignment back into the structured solution.
TdscwSolution extract_solution(const Instance& inst, const TimeSpaceNetwork& net,
                               const TdscwModel& model, const std::vector<double>& values);

// Independent re-check of every constraint family directly on the structured
// solution (no MILP involved). Empty result = feasible.
std::vector<Violation> validate(const Instance& inst, const TimeSpaceNetwork& net,
                                const TdscwSolution& sol);

}  // namespace tdscw
