#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tdscw/instance.hpp"
#include "tdscw/timespace.hpp"

namespace tdscw {

// One pick event: order line `line` (index into Order::items) served from
// `pod` at station `workstation` in period `period`.
struct Pick {
  int order = 0;
  int line = 0;
  int item = 0;
  int pod = 0;
  int workstation = 0;
  int period = 0;

  auto tie() const { return std::tie(order, line, item, pod, workstation, period); }
  bool operator<(const Pick& o) const { return tie() < o.tie(); }
  bool operator==(const Pick& o) const { return tie() == o.tie(); }
};

// Assignment of every decision family. The indicator series are stored
// sparsely: a key is present exactly where the variable is 1. Heuristics fill
// them canonically from picks and trajectories; the validator re-checks every
// constraint family against instance and network, so mutated copies of these
// sets can represent arbitrary (including infeasible) assignments.
struct TdscwSolution {
  using OrderStation = std::pair<int, int>;                 // (order, station)
  using PickSeriesKey = std::tuple<int, int, int, int>;     // (order, line, pod, station)
  using StationTime = std::tuple<int, int, int>;            // (order, station, period)

  std::set<OrderStation> z;
  // cumulative pick indicator: periods t with x=1 for the tuple
  std::map<PickSeriesKey, std::set<int>> x;
  std::vector<std::vector<int>> pod_arcs;  // per pod, arc ids sorted by start period
  std::set<StationTime> started;   // f = 1
  std::set<StationTime> finished;  // g = 1
  std::set<StationTime> open;      // v = 1
  int objective = 0;

  std::vector<Pick> picks(const Instance& inst) const;
};

// Builds the canonical solution for a set of pick events and pod
// trajectories: cumulative x from pick periods, tightest f/g, v = f - g,
// z from pick stations, idle-at-home chains for pods without trajectories.
TdscwSolution make_solution(const Instance& inst, const TimeSpaceNetwork& net,
                            const std::vector<Pick>& picks,
                            const std::vector<std::vector<int>>& pod_arcs);

// The all-idle zero-objective solution.
TdscwSolution idle_solution(const Instance& inst, const TimeSpaceNetwork& net);

// Objective per the cumulative indicators: number of tuples with x = 1 at the
// final period.
int objective_of(const Instance& inst, const TdscwSolution& sol);

struct Metrics {
  double utilization = 0.0;          // busy station seconds / (W * T * delta)
  long long items_picked = 0;
  long long pod_stops = 0;           // station departures via traveling arcs
  long long pod_trips = 0;           // excursions leaving a storage location
  double picks_per_stop = 0.0;
  double picks_per_trip = 0.0;
  long long orders_completed = 0;
  double single_item_share = 0.0;    // completed single-item orders / completed
  double avg_open_seconds_per_item = 0.0;
  double distance_per_pick = 0.0;    // grid cells traveled per item picked
  long long cross_order_edges = 0;   // order pairs sharing a pod stop
  long long within_order_consolidations = 0;  // stops serving one order twice
};

Metrics metrics(const Instance& inst, const TimeSpaceNetwork& net, const TdscwSolution& sol);

void save_solution(const Instance& inst, const TimeSpaceNetwork& net, const TdscwSolution& sol,
                   const std::string& path);
TdscwSolution load_solution(const Instance& inst, const TimeSpaceNetwork& net,
                            const std::string& path);

// Gantt-style rows: workstation,period,event,order,item,pod.
void write_schedule_csv(const Instance& inst, const TimeSpaceNetwork& net,
                        const TdscwSolution& sol, const std::string& path);

}  // namespace tdscw
