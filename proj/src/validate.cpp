#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "tdscw/model.hpp"

namespace tdscw {

namespace {

std::string fmt(ConstraintFamily fam, const std::string& detail) {
  return to_string(fam) + ": " + detail;
}

}  // namespace

std::vector<Violation> validate(const Instance& inst, const TimeSpaceNetwork& net,
                                const TdscwSolution& sol) {
  std::vector<Violation> out;
  const int T = net.horizon;
  const int W = net.num_workstations;
  const double tol = 1e-6;
  auto report = [&](ConstraintFamily fam, const std::string& detail, double slack) {
    out.push_back({fam, fmt(fam, detail), slack});
  };

  // --- order_single_station -------------------------------------------------
  {
    std::map<int, int> stations_of;
    for (const auto& [m, w] : sol.z) stations_of[m]++;
    for (const auto& [m, n] : stations_of) {
      if (n > 1) {
        report(ConstraintFamily::order_single_station,
               "order " + std::to_string(m) + " assigned to " + std::to_string(n) + " stations",
               n - 1);
      }
    }
  }

  // --- pick_monotone: each x series must be a suffix {t0..T} ----------------
  for (const auto& [key, periods] : sol.x) {
    if (periods.empty()) continue;
    int first = *periods.begin();
    if (static_cast<int>(periods.size()) != T - first + 1 || *periods.rbegin() != T) {
      auto [m, line, pod, w] = key;
      report(ConstraintFamily::pick_monotone,
             "cumulative indicator for order " + std::to_string(m) + " line " +
                 std::to_string(line) + " drops back to zero",
             1.0);
    }
  }

  // pick events: first period of each x series
  struct Event {
    int m, line, pod, w, t;
  };
  std::vector<Event> events;
  for (const auto& [key, periods] : sol.x) {
    if (periods.empty()) continue;
    auto [m, line, pod, w] = key;
    events.push_back({m, line, pod, w, *periods.begin()});
  }

  // --- pick_once --------------------------------------------------------------
  {
    std::map<std::pair<int, int>, int> per_line;
    for (const auto& [key, periods] : sol.x) {
      if (periods.count(T)) per_line[{std::get<0>(key), std::get<1>(key)}]++;
    }
    for (const auto& [ml, n] : per_line) {
      if (n > 1) {
        report(ConstraintFamily::pick_once,
               "order " + std::to_string(ml.first) + " line " + std::to_string(ml.second) +
                   " served " + std::to_string(n) + " times",
               n - 1);
      }
    }
  }

  // --- pick_station_link -------------------------------------------------------
  for (const Event& e : events) {
    if (!sol.z.count({e.m, e.w})) {
      report(ConstraintFamily::pick_station_link,
             "order " + std::to_string(e.m) + " picked at station " + std::to_string(e.w) +
                 " without assignment",
             1.0);
    }
  }

  // --- pod adjacency from trajectories ------------------------------------------
  std::map<std::pair<int, int>, double> departures;        // (station node) -> pod count
  std::map<std::pair<int, int>, std::set<int>> travel_departures;  // (pod, node) presence
  for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
    std::map<int, int> in_deg, out_deg;
    for (int aid : sol.pod_arcs[p]) {
      const TsArc& a = net.arcs[aid];
      int from = net.node_id(a.from_place, a.from_period);
      int to = net.node_id(a.to_place, a.to_period);
      out_deg[from]++;
      in_deg[to]++;
      if (a.kind == ArcKind::traveling && net.is_station_place(a.from_place)) {
        travel_departures[{static_cast<int>(p), from}].insert(aid);
      }
    }
    // pod_flow_start
    int start = net.pod_start_node[p];
    int start_out = out_deg.count(start) ? out_deg[start] : 0;
    if (start_out != 1) {
      report(ConstraintFamily::pod_flow_start,
             "pod " + std::to_string(p) + " leaves its start node " + std::to_string(start_out) +
                 " times",
             std::abs(start_out - 1));
    }
    // pod_flow_conservation at interior nodes
    std::set<int> nodes;
    for (const auto& [n, d] : in_deg) nodes.insert(n);
    for (const auto& [n, d] : out_deg) nodes.insert(n);
    for (int n : nodes) {
      if (n == start || net.is_end_node(n)) continue;
      int di = in_deg.count(n) ? in_deg[n] : 0;
      int dout = out_deg.count(n) ? out_deg[n] : 0;
      if (di != dout) {
        TsNode nd = net.node_of(n);
        report(ConstraintFamily::pod_flow_conservation,
               "pod " + std::to_string(p) + " imbalanced at place " + std::to_string(nd.place) +
                   " period " + std::to_string(nd.period),
               std::abs(di - dout));
      }
    }
  }

  // --- pick_requires_departure ---------------------------------------------------
  for (const Event& e : events) {
    int node = net.node_id(e.w, e.t);
    auto it = travel_departures.find({e.pod, node});
    if (it == travel_departures.end() || it->second.empty()) {
      report(ConstraintFamily::pick_requires_departure,
             "pick of order " + std::to_string(e.m) + " line " + std::to_string(e.line) +
                 " at period " + std::to_string(e.t) + " has no departing pod " +
                 std::to_string(e.pod),
             1.0);
    }
  }

  // --- pod_inventory ----------------------------------------------------------------
  {
    std::map<std::pair<int, int>, int> used;  // (item, pod)
    for (const auto& [key, periods] : sol.x) {
      if (!periods.count(T)) continue;
      auto [m, line, pod, w] = key;
      used[{inst.orders[m].items[line], pod}]++;
    }
    for (const auto& [key, n] : used) {
      auto [item, pod] = key;
      auto it = inst.pods[pod].inventory.find(item);
      int stock = it == inst.pods[pod].inventory.end() ? 0 : it->second;
      if (n > stock) {
        report(ConstraintFamily::pod_inventory,
               "pod " + std::to_string(pod) + " ships " + std::to_string(n) + " of item " +
                   std::to_string(item) + " with stock " + std::to_string(stock),
               n - stock);
      }
    }
  }

  // --- station_time_budget -------------------------------------------------------------
  {
    std::map<std::pair<int, int>, double> load;  // (w, t)
    for (const Event& e : events) load[{e.w, e.t}] += inst.params.item_pick_seconds;
    for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
      for (int aid : sol.pod_arcs[p]) {
        const TsArc& a = net.arcs[aid];
        if (net.is_station_place(a.from_place)) {
          load[{a.from_place, a.from_period}] += inst.params.pod_process_seconds;
        }
      }
    }
    for (const auto& [wt, seconds] : load) {
      if (seconds > inst.params.delta_seconds + tol) {
        report(ConstraintFamily::station_time_budget,
               "station " + std::to_string(wt.first) + " period " + std::to_string(wt.second) +
                   " needs " + std::to_string(seconds) + " s",
               seconds - inst.params.delta_seconds);
      }
    }
  }

  // --- intersection_capacity ------------------------------------------------------------
  if (!inst.layout.intersection_capacity.empty()) {
    std::map<std::pair<int, int>, Rational> usage;  // (cell, period)
    for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
      for (int aid : sol.pod_arcs[p]) {
        if (!net.congestion.has_arc(aid)) continue;
        for (const CongestionEntry& e : net.congestion.for_arc(aid)) {
          if (!inst.layout.intersection_capacity.count(e.intersection)) continue;
          usage[{e.intersection, e.period}] += e.q;
        }
      }
    }
    for (const auto& [key, total] : usage) {
      const Rational& cap = inst.layout.intersection_capacity.at(key.first);
      if (total > cap) {
        report(ConstraintFamily::intersection_capacity,
               "cell " + std::to_string(key.first) + " period " + std::to_string(key.second) +
                   " holds " + total.to_decimal_string(),
               (total - cap).to_double());
      }
    }
  }

  // --- flag families ------------------------------------------------------------------------
  for (const auto& [key, periods] : sol.x) {
    auto [m, line, pod, w] = key;
    for (int t : periods) {
      if (!sol.started.count({m, w, t})) {
        report(ConstraintFamily::first_item_flag,
               "order " + std::to_string(m) + " picked by period " + std::to_string(t) +
                   " at station " + std::to_string(w) + " without started flag",
               1.0);
        break;
      }
    }
  }
  for (const auto& [m, w, t] : sol.finished) {
    // every line must be delivered at (w, <= t)
    for (int line = 0; line < static_cast<int>(inst.orders[m].items.size()); ++line) {
      bool covered = false;
      for (const auto& [key, periods] : sol.x) {
        if (std::get<0>(key) != m || std::get<1>(key) != line || std::get<3>(key) != w) continue;
        if (!periods.empty() && *periods.begin() <= t) { covered = true; break; }
      }
      if (!covered) {
        report(ConstraintFamily::all_items_flag,
               "order " + std::to_string(m) + " flagged finished at period " + std::to_string(t) +
                   " but line " + std::to_string(line) + " is not delivered",
               1.0);
        break;
      }
    }
  }
  {
    std::set<std::tuple<int, int, int>> keys;
    for (const auto& k : sol.started) keys.insert(k);
    for (const auto& k : sol.finished) keys.insert(k);
    for (const auto& k : sol.open) keys.insert(k);
    for (const auto& k : keys) {
      int f = sol.started.count(k) ? 1 : 0;
      int g = sol.finished.count(k) ? 1 : 0;
      int v = sol.open.count(k) ? 1 : 0;
      if (v != f - g) {
        auto [m, w, t] = k;
        report(ConstraintFamily::open_flag_balance,
               "order " + std::to_string(m) + " station " + std::to_string(w) + " period " +
                   std::to_string(t) + " has open=" + std::to_string(v) + " started=" +
                   std::to_string(f) + " finished=" + std::to_string(g),
               std::abs(v - (f - g)));
      }
    }
  }

  // --- open_order_limit -----------------------------------------------------------------------
  {
    std::map<std::pair<int, int>, int> open_count;
    for (const auto& [m, w, t] : sol.open) open_count[{w, t}]++;
    for (const auto& [wt, n] : open_count) {
      if (n > inst.params.max_open_orders) {
        report(ConstraintFamily::open_order_limit,
               "station " + std::to_string(wt.first) + " period " + std::to_string(wt.second) +
                   " has " + std::to_string(n) + " open orders",
               n - inst.params.max_open_orders);
      }
    }
  }

  // --- storage_capacity (flexible policy) -------------------------------------------------------
  if (inst.params.storage_policy == StoragePolicy::flexible) {
    std::map<std::pair<int, int>, int> idling;  // (storage place, t)
    for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
      for (int aid : sol.pod_arcs[p]) {
        const TsArc& a = net.arcs[aid];
        if (a.kind == ArcKind::idle && !net.is_station_place(a.from_place) &&
            a.from_period >= 1 && a.from_period < T) {
          idling[{a.from_place, a.from_period}]++;
        }
      }
    }
    for (const auto& [key, n] : idling) {
      if (n > inst.params.storage_capacity) {
        report(ConstraintFamily::storage_capacity,
               "location place " + std::to_string(key.first) + " period " +
                   std::to_string(key.second) + " holds " + std::to_string(n) + " pods",
               n - inst.params.storage_capacity);
      }
    }
  }

  return out;
}

}  // namespace tdscw
