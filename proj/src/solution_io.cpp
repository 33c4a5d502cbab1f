#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "tdscw/solution.hpp"

namespace tdscw {

using nlohmann::json;

std::vector<Pick> TdscwSolution::picks(const Instance& inst) const {
  std::vector<Pick> out;
  for (const auto& [key, periods] : x) {
    if (periods.empty()) continue;
    auto [m, line, pod, w] = key;
    Pick p;
    p.order = m;
    p.line = line;
    p.item = inst.orders[m].items[line];
    p.pod = pod;
    p.workstation = w;
    p.period = *periods.begin();  // first period with x = 1 is the pick event
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TdscwSolution idle_solution(const Instance& inst, const TimeSpaceNetwork& net) {
  return make_solution(inst, net, {}, std::vector<std::vector<int>>(inst.pods.size()));
}

TdscwSolution make_solution(const Instance& inst, const TimeSpaceNetwork& net,
                            const std::vector<Pick>& picks,
                            const std::vector<std::vector<int>>& pod_arcs) {
  TdscwSolution sol;
  const int T = net.horizon;

  sol.pod_arcs.assign(inst.pods.size(), {});
  for (size_t p = 0; p < inst.pods.size(); ++p) {
    if (p < pod_arcs.size() && !pod_arcs[p].empty()) {
      sol.pod_arcs[p] = pod_arcs[p];
      std::sort(sol.pod_arcs[p].begin(), sol.pod_arcs[p].end(), [&](int a, int b) {
        return net.arcs[a].from_period < net.arcs[b].from_period;
      });
    } else {
      // idle at home for the whole horizon
      int place = net.storage_place(inst.pods[p].home_location);
      for (int t = 0; t < T; ++t) {
        int node = net.node_id(place, t);
        for (int aid : net.out_arcs[node]) {
          if (net.arcs[aid].kind == ArcKind::idle) {
            sol.pod_arcs[p].push_back(aid);
            break;
          }
        }
      }
    }
  }

  // cumulative x from pick events
  for (const Pick& pk : picks) {
    auto& periods = sol.x[{pk.order, pk.line, pk.pod, pk.workstation}];
    for (int t = pk.period; t <= T; ++t) periods.insert(t);
    sol.z.insert({pk.order, pk.workstation});
  }

  // tightest started/finished flags per (order, station)
  std::map<std::pair<int, int>, std::pair<int, int>> first_last;  // (m,w) -> (first, last)
  std::map<std::pair<int, int>, std::set<int>> lines_served;
  for (const Pick& pk : picks) {
    auto key = std::make_pair(pk.order, pk.workstation);
    auto it = first_last.find(key);
    if (it == first_last.end()) {
      first_last[key] = {pk.period, pk.period};
    } else {
      it->second.first = std::min(it->second.first, pk.period);
      it->second.second = std::max(it->second.second, pk.period);
    }
    lines_served[key].insert(pk.line);
  }
  for (const auto& [key, fl] : first_last) {
    auto [m, w] = key;
    for (int t = fl.first; t <= T; ++t) sol.started.insert({m, w, t});
    bool complete = lines_served[key].size() == inst.orders[m].items.size();
    if (complete) {
      for (int t = fl.second; t <= T; ++t) sol.finished.insert({m, w, t});
      for (int t = fl.first; t < fl.second; ++t) sol.open.insert({m, w, t});
    } else {
      for (int t = fl.first; t <= T; ++t) sol.open.insert({m, w, t});
    }
  }
  sol.objective = objective_of(inst, sol);
  return sol;
}

int objective_of(const Instance& inst, const TdscwSolution& sol) {
  const int T = inst.params.horizon_periods;
  int total = 0;
  for (const auto& [key, periods] : sol.x) {
    if (periods.count(T)) ++total;
  }
  return total;
}

Metrics metrics(const Instance& inst, const TimeSpaceNetwork& net, const TdscwSolution& sol) {
  Metrics out;
  const int T = net.horizon;
  const int W = net.num_workstations;
  std::vector<Pick> picks = sol.picks(inst);
  out.items_picked = static_cast<long long>(picks.size());

  // stops: traveling departures from stations; trips: departures from storage
  double cells_traveled = 0.0;
  std::map<std::pair<int, int>, std::set<int>> stop_orders;  // (pod, period@station) -> orders
  std::map<std::pair<int, int>, int> stop_picks;
  double station_pod_seconds = 0.0;  // matches the time-budget accounting
  for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
    for (int aid : sol.pod_arcs[p]) {
      const TsArc& a = net.arcs[aid];
      if (a.kind == ArcKind::traveling) {
        cells_traveled += net.manhattan(a.from_place, a.to_place);
        if (net.is_station_place(a.from_place)) ++out.pod_stops;
        if (!net.is_station_place(a.from_place)) ++out.pod_trips;
      }
      if (net.is_station_place(a.from_place)) {
        station_pod_seconds += inst.params.pod_process_seconds;
      }
    }
  }
  for (const Pick& pk : picks) {
    stop_orders[{pk.pod, pk.period}].insert(pk.order);
    stop_picks[{pk.pod, pk.period}]++;
  }
  // cross-order edges: distinct order pairs sharing one pod stop
  std::set<std::pair<int, int>> edges;
  for (const auto& [stop, orders] : stop_orders) {
    for (auto it = orders.begin(); it != orders.end(); ++it) {
      for (auto jt = std::next(it); jt != orders.end(); ++jt) {
        edges.insert({*it, *jt});
      }
    }
  }
  out.cross_order_edges = static_cast<long long>(edges.size());
  for (const auto& [stop, orders] : stop_orders) {
    if (orders.size() == 1 && stop_picks[stop] >= 2) ++out.within_order_consolidations;
  }

  out.picks_per_stop = out.pod_stops > 0 ? static_cast<double>(out.items_picked) / out.pod_stops : 0.0;
  out.picks_per_trip = out.pod_trips > 0 ? static_cast<double>(out.items_picked) / out.pod_trips : 0.0;
  out.distance_per_pick = out.items_picked > 0 ? cells_traveled / out.items_picked : 0.0;

  // utilization: pod processing plus picking over total station time
  double busy = station_pod_seconds + static_cast<double>(picks.size()) * inst.params.item_pick_seconds;
  out.utilization = W > 0 && T > 0 ? busy / (static_cast<double>(W) * T * inst.params.delta_seconds)
                                   : 0.0;

  // completion metrics
  std::map<int, std::set<int>> served;  // order -> lines
  std::map<int, std::pair<int, int>> span;
  for (const Pick& pk : picks) {
    served[pk.order].insert(pk.line);
    auto it = span.find(pk.order);
    if (it == span.end()) {
      span[pk.order] = {pk.period, pk.period};
    } else {
      it->second.first = std::min(it->second.first, pk.period);
      it->second.second = std::max(it->second.second, pk.period);
    }
  }
  long long single_completed = 0;
  double open_seconds = 0.0;
  for (const auto& [m, lines] : served) {
    if (lines.size() == inst.orders[m].items.size()) {
      ++out.orders_completed;
      if (inst.orders[m].items.size() == 1) ++single_completed;
      open_seconds += static_cast<double>(span[m].second - span[m].first + 1) *
                      inst.params.delta_seconds;
    }
  }
  out.single_item_share =
      out.orders_completed > 0 ? static_cast<double>(single_completed) / out.orders_completed : 0.0;
  out.avg_open_seconds_per_item =
      out.items_picked > 0 ? open_seconds / static_cast<double>(out.items_picked) : 0.0;
  return out;
}

namespace {

json metrics_json(const Metrics& m) {
  return json{{"utilization", m.utilization},
              {"items_picked", m.items_picked},
              {"pod_stops", m.pod_stops},
              {"pod_trips", m.pod_trips},
              {"picks_per_stop", m.picks_per_stop},
              {"picks_per_trip", m.picks_per_trip},
              {"orders_completed", m.orders_completed},
              {"single_item_share", m.single_item_share},
              {"avg_open_seconds_per_item", m.avg_open_seconds_per_item},
              {"distance_per_pick", m.distance_per_pick},
              {"cross_order_edges", m.cross_order_edges},
              {"within_order_consolidations", m.within_order_consolidations}};
}

}  // namespace

void save_solution(const Instance& inst, const TimeSpaceNetwork& net, const TdscwSolution& sol,
                   const std::string& path) {
  json j;
  j["objective"] = sol.objective;
  json pk = json::array();
  for (const Pick& p : sol.picks(inst)) {
    pk.push_back({{"order", p.order},
                  {"line", p.line},
                  {"item", p.item},
                  {"pod", p.pod},
                  {"workstation", p.workstation},
                  {"period", p.period}});
  }
  j["picks"] = pk;
  json trips = json::array();
  for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
    json arcs = json::array();
    for (int aid : sol.pod_arcs[p]) {
      const TsArc& a = net.arcs[aid];
      arcs.push_back({{"from_place", a.from_place},
                      {"from_period", a.from_period},
                      {"to_place", a.to_place},
                      {"to_period", a.to_period}});
    }
    trips.push_back({{"pod", static_cast<int>(p)}, {"arcs", arcs}});
  }
  j["trips"] = trips;
  j["metrics"] = metrics_json(metrics(inst, net, sol));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write solution file: " + path);
  out << j.dump(1) << "\n";
}

TdscwSolution load_solution(const Instance& inst, const TimeSpaceNetwork& net,
                            const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read solution file: " + path);
  json j;
  in >> j;
  // arc lookup by endpoints
  std::map<std::tuple<int, int, int, int>, int> arc_of;
  for (const TsArc& a : net.arcs) {
    arc_of[{a.from_place, a.from_period, a.to_place, a.to_period}] = a.id;
  }
  std::vector<Pick> picks;
  for (const json& p : j.at("picks")) {
    Pick pk;
    pk.order = p.at("order").get<int>();
    pk.line = p.at("line").get<int>();
    pk.item = p.at("item").get<int>();
    pk.pod = p.at("pod").get<int>();
    pk.workstation = p.at("workstation").get<int>();
    pk.period = p.at("period").get<int>();
    picks.push_back(pk);
  }
  std::vector<std::vector<int>> pod_arcs(inst.pods.size());
  for (const json& t : j.at("trips")) {
    int pod = t.at("pod").get<int>();
    for (const json& a : t.at("arcs")) {
      auto key = std::make_tuple(a.at("from_place").get<int>(), a.at("from_period").get<int>(),
                                 a.at("to_place").get<int>(), a.at("to_period").get<int>());
      auto it = arc_of.find(key);
      if (it == arc_of.end()) throw std::runtime_error("solution references unknown arc");
      pod_arcs[pod].push_back(it->second);
    }
  }
  return make_solution(inst, net, picks, pod_arcs);
}

void write_schedule_csv(const Instance& inst, const TimeSpaceNetwork& net,
                        const TdscwSolution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write schedule file: " + path);
  out << "workstation,period,event,order,item,pod\n";
  struct Row {
    int w, t, order, item, pod;
    std::string event;
  };
  std::vector<Row> rows;
  for (const Pick& p : sol.picks(inst)) {
    rows.push_back({p.workstation, p.period, p.order, p.item, p.pod, "pick"});
  }
  for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
    for (int aid : sol.pod_arcs[p]) {
      const TsArc& a = net.arcs[aid];
      if (a.kind == ArcKind::traveling && net.is_station_place(a.to_place)) {
        rows.push_back({a.to_place, a.to_period, -1, -1, static_cast<int>(p), "pod_arrival"});
      }
      if (a.kind == ArcKind::traveling && net.is_station_place(a.from_place)) {
        rows.push_back({a.from_place, a.from_period, -1, -1, static_cast<int>(p), "pod_departure"});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.w, a.t, a.event, a.order, a.item, a.pod) <
           std::tie(b.w, b.t, b.event, b.order, b.item, b.pod);
  });
  for (const Row& r : rows) {
    out << r.w << "," << r.t << "," << r.event << "," << r.order << "," << r.item << "," << r.pod
        << "\n";
  }
}

}  // namespace tdscw
