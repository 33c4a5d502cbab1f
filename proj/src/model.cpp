#include "tdscw/model.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tdscw {

std::string to_string(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::order_single_station: return "order_single_station";
    case ConstraintFamily::open_order_limit: return "open_order_limit";
    case ConstraintFamily::station_time_budget: return "station_time_budget";
    case ConstraintFamily::pod_flow_start: return "pod_flow_start";
    case ConstraintFamily::pod_flow_conservation: return "pod_flow_conservation";
    case ConstraintFamily::pod_inventory: return "pod_inventory";
    case ConstraintFamily::intersection_capacity: return "intersection_capacity";
    case ConstraintFamily::pick_requires_departure: return "pick_requires_departure";
    case ConstraintFamily::pick_station_link: return "pick_station_link";
    case ConstraintFamily::pick_monotone: return "pick_monotone";
    case ConstraintFamily::first_item_flag: return "first_item_flag";
    case ConstraintFamily::all_items_flag: return "all_items_flag";
    case ConstraintFamily::open_flag_balance: return "open_flag_balance";
    case ConstraintFamily::pick_once: return "pick_once";
    case ConstraintFamily::storage_capacity: return "storage_capacity";
  }
  return "unknown";
}

TdscwModel build_model(const Instance& inst, const TimeSpaceNetwork& net) {
  TdscwModel model;
  milp::MilpModel& lp = model.milp;
  lp.sense = milp::ObjSense::maximize;

  const int M = static_cast<int>(inst.orders.size());
  const int W = net.num_workstations;
  const int T = net.horizon;
  const int P = static_cast<int>(inst.pods.size());
  model.num_orders = M;
  model.num_stations = W;
  model.horizon = T;

  // --- variables ---------------------------------------------------------
  model.line_pods.resize(M);
  model.x_base.resize(M);
  for (int m = 0; m < M; ++m) {
    const Order& order = inst.orders[m];
    model.line_pods[m].resize(order.items.size());
    model.x_base[m].resize(order.items.size());
    for (int line = 0; line < static_cast<int>(order.items.size()); ++line) {
      model.line_pods[m][line] = inst.pods_with_item(order.items[line]);
    }
  }
  long long x_count = 0, y_count = 0;
  for (int m = 0; m < M; ++m) {
    for (int line = 0; line < static_cast<int>(model.line_pods[m].size()); ++line) {
      model.x_base[m][line] = lp.num_vars();
      int item = inst.orders[m].items[line];
      for (int pp = 0; pp < static_cast<int>(model.line_pods[m][line].size()); ++pp) {
        int pod = model.line_pods[m][line][pp];
        for (int w = 0; w < W; ++w) {
          for (int t = 1; t <= T; ++t) {
            // "picked by period t"; only the final period scores
            lp.add_binary("x_m" + std::to_string(m) + "_l" + std::to_string(line) + "_i" +
                              std::to_string(item) + "_p" + std::to_string(pod) + "_w" +
                              std::to_string(w) + "_t" + std::to_string(t),
                          t == T ? 1.0 : 0.0);
            ++x_count;
          }
        }
      }
    }
  }
  model.y_base.resize(P);
  for (int p = 0; p < P; ++p) {
    model.y_base[p] = lp.num_vars();
    const std::vector<int>& arcs = net.arcs_for_pod(p);
    for (int pos = 0; pos < static_cast<int>(arcs.size()); ++pos) {
      lp.add_binary("y_p" + std::to_string(p) + "_a" + std::to_string(arcs[pos]));
      ++y_count;
    }
  }
  model.z_base = lp.num_vars();
  for (int m = 0; m < M; ++m) {
    for (int w = 0; w < W; ++w) {
      lp.add_binary("z_m" + std::to_string(m) + "_w" + std::to_string(w));
    }
  }
  auto add_flag_block = [&](const char* tag) {
    int base = lp.num_vars();
    for (int m = 0; m < M; ++m) {
      for (int w = 0; w < W; ++w) {
        for (int t = 1; t <= T; ++t) {
          lp.add_binary(std::string(tag) + "_m" + std::to_string(m) + "_w" + std::to_string(w) +
                        "_t" + std::to_string(t));
        }
      }
    }
    return base;
  };
  model.f_base = add_flag_block("f");
  model.g_base = add_flag_block("g");
  model.v_base = add_flag_block("v");

  model.size.variables_by_family["x"] = x_count;
  model.size.variables_by_family["y"] = y_count;
  model.size.variables_by_family["z"] = static_cast<long long>(M) * W;
  model.size.variables_by_family["f"] = static_cast<long long>(M) * W * T;
  model.size.variables_by_family["g"] = static_cast<long long>(M) * W * T;
  model.size.variables_by_family["v"] = static_cast<long long>(M) * W * T;
  model.size.variable_count = lp.num_vars();

  // --- per-pod node adjacency over usable arcs ----------------------------
  // pods sharing a home share arc lists, so adjacency is cached per list
  struct PodAdj {
    std::map<int, std::vector<int>> out, in;     // node -> arc positions
    std::map<int, std::vector<int>> out_travel;  // node -> traveling positions
  };
  std::map<const std::vector<int>*, PodAdj> adj_cache;
  auto adjacency_for = [&](int pod) -> const PodAdj& {
    const std::vector<int>* key = &net.arcs_for_pod(pod);
    auto it = adj_cache.find(key);
    if (it != adj_cache.end()) return it->second;
    PodAdj adj;
    const std::vector<int>& arcs = *key;
    for (int pos = 0; pos < static_cast<int>(arcs.size()); ++pos) {
      const TsArc& a = net.arcs[arcs[pos]];
      int from = net.node_id(a.from_place, a.from_period);
      int to = net.node_id(a.to_place, a.to_period);
      adj.out[from].push_back(pos);
      adj.in[to].push_back(pos);
      if (a.kind == ArcKind::traveling) adj.out_travel[from].push_back(pos);
    }
    return adj_cache.emplace(key, std::move(adj)).first->second;
  };

  auto count_family = [&](ConstraintFamily fam, long long n) {
    model.size.constraints_by_family[fam] += n;
  };

  // --- order_single_station ------------------------------------------------
  for (int m = 0; m < M; ++m) {
    std::vector<std::pair<int, double>> terms;
    for (int w = 0; w < W; ++w) terms.push_back({model.z_var(m, w), 1.0});
    lp.add_row(std::move(terms), milp::RowSense::le, 1.0);
  }
  count_family(ConstraintFamily::order_single_station, M);

  // --- open_order_limit ------------------------------------------------------
  for (int w = 0; w < W; ++w) {
    for (int t = 1; t <= T; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (int m = 0; m < M; ++m) terms.push_back({model.v_var(m, w, t), 1.0});
      lp.add_row(std::move(terms), milp::RowSense::le,
                 static_cast<double>(inst.params.max_open_orders));
    }
  }
  count_family(ConstraintFamily::open_order_limit, static_cast<long long>(W) * T);

  // --- station_time_budget ----------------------------------------------------
  const double d_item = inst.params.item_pick_seconds;
  const double d_pod = inst.params.pod_process_seconds;
  for (int w = 0; w < W; ++w) {
    for (int t = 1; t <= T; ++t) {
      std::vector<std::pair<int, double>> terms;
      for (int m = 0; m < M; ++m) {
        for (int line = 0; line < static_cast<int>(model.line_pods[m].size()); ++line) {
          for (int pp = 0; pp < static_cast<int>(model.line_pods[m][line].size()); ++pp) {
            terms.push_back({model.x_var(m, line, pp, w, t), d_item});
            if (t >= 2) terms.push_back({model.x_var(m, line, pp, w, t - 1), -d_item});
          }
        }
      }
      int node = net.node_id(w, t);
      for (int p = 0; p < P; ++p) {
        const PodAdj& adj = adjacency_for(p);
        auto it = adj.out.find(node);
        if (it == adj.out.end()) continue;
        for (int pos : it->second) terms.push_back({model.y_var(p, pos), d_pod});
      }
      lp.add_row(std::move(terms), milp::RowSense::le,
                 static_cast<double>(inst.params.delta_seconds));
    }
  }
  count_family(ConstraintFamily::station_time_budget, static_cast<long long>(W) * T);

  // --- pod_flow_start -----------------------------------------------------------
  for (int p = 0; p < P; ++p) {
    const PodAdj& adj = adjacency_for(p);
    std::vector<std::pair<int, double>> terms;
    auto it = adj.out.find(net.pod_start_node[p]);
    if (it != adj.out.end()) {
      for (int pos : it->second) terms.push_back({model.y_var(p, pos), 1.0});
    }
    lp.add_row(std::move(terms), milp::RowSense::eq, 1.0);
  }
  count_family(ConstraintFamily::pod_flow_start, P);

  // --- pod_flow_conservation (full index family; foreign nodes give 0 = 0) ----
  for (int p = 0; p < P; ++p) {
    const PodAdj& adj = adjacency_for(p);
    for (int node = 0; node < net.num_nodes(); ++node) {
      if (net.is_end_node(node) || node == net.pod_start_node[p]) continue;
      std::vector<std::pair<int, double>> terms;
      auto in_it = adj.in.find(node);
      if (in_it != adj.in.end()) {
        for (int pos : in_it->second) terms.push_back({model.y_var(p, pos), 1.0});
      }
      auto out_it = adj.out.find(node);
      if (out_it != adj.out.end()) {
        for (int pos : out_it->second) terms.push_back({model.y_var(p, pos), -1.0});
      }
      lp.add_row(std::move(terms), milp::RowSense::eq, 0.0);
      count_family(ConstraintFamily::pod_flow_conservation, 1);
    }
  }

  // --- pod_inventory --------------------------------------------------------------
  {
    std::map<int, std::vector<std::pair<int, int>>> lines_of_item;
    for (int m = 0; m < M; ++m) {
      for (int line = 0; line < static_cast<int>(inst.orders[m].items.size()); ++line) {
        lines_of_item[inst.orders[m].items[line]].push_back({m, line});
      }
    }
    long long rows = 0;
    for (const Pod& pod : inst.pods) {
      for (const auto& [item, qty] : pod.inventory) {
        if (qty <= 0) continue;
        std::vector<std::pair<int, double>> terms;
        auto it = lines_of_item.find(item);
        if (it != lines_of_item.end()) {
          for (auto [m, line] : it->second) {
            const std::vector<int>& pods = model.line_pods[m][line];
            auto pit = std::lower_bound(pods.begin(), pods.end(), pod.id);
            if (pit == pods.end() || *pit != pod.id) continue;
            int pp = static_cast<int>(pit - pods.begin());
            for (int w = 0; w < W; ++w) terms.push_back({model.x_var(m, line, pp, w, T), 1.0});
          }
        }
        lp.add_row(std::move(terms), milp::RowSense::le, static_cast<double>(qty));
        ++rows;
      }
    }
    count_family(ConstraintFamily::pod_inventory, rows);
  }

  // --- intersection_capacity ------------------------------------------------------
  if (!inst.layout.intersection_capacity.empty()) {
    std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> rows;
    for (const auto& [cell, cap] : inst.layout.intersection_capacity) {
      for (int t = 0; t <= T; ++t) rows[{cell, t}];
    }
    for (int p = 0; p < P; ++p) {
      const std::vector<int>& arcs = net.arcs_for_pod(p);
      for (int pos = 0; pos < static_cast<int>(arcs.size()); ++pos) {
        if (!net.congestion.has_arc(arcs[pos])) continue;
        for (const CongestionEntry& e : net.congestion.for_arc(arcs[pos])) {
          if (e.period > T) continue;
          auto it = rows.find({e.intersection, e.period});
          if (it == rows.end()) continue;
          it->second.push_back({model.y_var(p, pos), e.q.to_double()});
        }
      }
    }
    for (auto& [key, terms] : rows) {
      lp.add_row(std::move(terms), milp::RowSense::le,
                 inst.layout.intersection_capacity.at(key.first).to_double());
    }
    count_family(ConstraintFamily::intersection_capacity, static_cast<long long>(rows.size()));
  }

  // --- pick families -----------------------------------------------------------------
  long long n9 = 0, n10 = 0, n11 = 0, n12 = 0, n13 = 0, n_once = 0;
  for (int m = 0; m < M; ++m) {
    for (int line = 0; line < static_cast<int>(model.line_pods[m].size()); ++line) {
      const std::vector<int>& pods = model.line_pods[m][line];
      for (int pp = 0; pp < static_cast<int>(pods.size()); ++pp) {
        const PodAdj& adj = adjacency_for(pods[pp]);
        for (int w = 0; w < W; ++w) {
          for (int t = 1; t <= T; ++t) {
            std::vector<std::pair<int, double>> terms;
            terms.push_back({model.x_var(m, line, pp, w, t), 1.0});
            if (t >= 2) terms.push_back({model.x_var(m, line, pp, w, t - 1), -1.0});
            auto it = adj.out_travel.find(net.node_id(w, t));
            if (it != adj.out_travel.end()) {
              for (int pos : it->second) terms.push_back({model.y_var(pods[pp], pos), -1.0});
            }
            lp.add_row(std::move(terms), milp::RowSense::le, 0.0);
            ++n9;
            std::vector<std::pair<int, double>> mono;
            if (t >= 2) mono.push_back({model.x_var(m, line, pp, w, t - 1), 1.0});
            mono.push_back({model.x_var(m, line, pp, w, t), -1.0});
            lp.add_row(std::move(mono), milp::RowSense::le, 0.0);
            ++n11;
            lp.add_row({{model.x_var(m, line, pp, w, t), 1.0}, {model.f_var(m, w, t), -1.0}},
                       milp::RowSense::le, 0.0);
            ++n12;
          }
        }
      }
      for (int w = 0; w < W; ++w) {
        for (int t = 1; t <= T; ++t) {
          std::vector<std::pair<int, double>> terms;
          for (int pp = 0; pp < static_cast<int>(pods.size()); ++pp) {
            terms.push_back({model.x_var(m, line, pp, w, t), 1.0});
            if (t >= 2) terms.push_back({model.x_var(m, line, pp, w, t - 1), -1.0});
          }
          terms.push_back({model.z_var(m, w), -1.0});
          lp.add_row(std::move(terms), milp::RowSense::le, 0.0);
          ++n10;
          std::vector<std::pair<int, double>> gterms;
          gterms.push_back({model.g_var(m, w, t), 1.0});
          for (int pp = 0; pp < static_cast<int>(pods.size()); ++pp) {
            gterms.push_back({model.x_var(m, line, pp, w, t), -1.0});
          }
          lp.add_row(std::move(gterms), milp::RowSense::le, 0.0);
          ++n13;
        }
      }
      std::vector<std::pair<int, double>> once;
      for (int pp = 0; pp < static_cast<int>(pods.size()); ++pp) {
        for (int w = 0; w < W; ++w) once.push_back({model.x_var(m, line, pp, w, T), 1.0});
      }
      lp.add_row(std::move(once), milp::RowSense::le, 1.0);
      ++n_once;
    }
  }
  count_family(ConstraintFamily::pick_requires_departure, n9);
  count_family(ConstraintFamily::pick_station_link, n10);
  count_family(ConstraintFamily::pick_monotone, n11);
  count_family(ConstraintFamily::first_item_flag, n12);
  count_family(ConstraintFamily::all_items_flag, n13);
  count_family(ConstraintFamily::pick_once, n_once);

  // --- open_flag_balance ----------------------------------------------------------
  for (int m = 0; m < M; ++m) {
    for (int w = 0; w < W; ++w) {
      for (int t = 1; t <= T; ++t) {
        lp.add_row({{model.v_var(m, w, t), 1.0},
                    {model.f_var(m, w, t), -1.0},
                    {model.g_var(m, w, t), 1.0}},
                   milp::RowSense::eq, 0.0);
      }
    }
  }
  count_family(ConstraintFamily::open_flag_balance, static_cast<long long>(M) * W * T);

  // --- storage_capacity (flexible policy) --------------------------------------------
  if (inst.params.storage_policy == StoragePolicy::flexible) {
    long long rows = 0;
    for (int l = 0; l < net.num_locations; ++l) {
      for (int t = 1; t < T; ++t) {
        int node = net.node_id(net.storage_place(l), t);
        std::vector<std::pair<int, double>> terms;
        for (int p = 0; p < P; ++p) {
          const PodAdj& adj = adjacency_for(p);
          auto it = adj.out.find(node);
          if (it == adj.out.end()) continue;
          for (int pos : it->second) {
            const TsArc& a = net.arcs[net.arcs_for_pod(p)[pos]];
            if (a.kind == ArcKind::idle) terms.push_back({model.y_var(p, pos), 1.0});
          }
        }
        lp.add_row(std::move(terms), milp::RowSense::le,
                   static_cast<double>(inst.params.storage_capacity));
        ++rows;
      }
    }
    count_family(ConstraintFamily::storage_capacity, rows);
  }

  model.size.constraint_count = lp.num_rows();
  return model;
}

namespace {

// Replaces pointless pod excursions (no pick served at any stop) with idle
// chains. Removing a trip only releases station, congestion, and flow
// capacity, so feasibility is preserved and alternate optima collapse to the
// movement-minimal one.
void prune_empty_excursions(const Instance& inst, const TimeSpaceNetwork& net,
                            TdscwSolution& sol) {
  if (inst.params.storage_policy != StoragePolicy::fixed) return;
  // (pod, station node) pairs that serve a pick
  std::set<std::pair<int, int>> pick_nodes;
  for (const auto& [key, periods] : sol.x) {
    if (periods.empty()) continue;
    auto [m, line, pod, w] = key;
    pick_nodes.insert({pod, net.node_id(w, *periods.begin())});
  }
  for (size_t p = 0; p < sol.pod_arcs.size(); ++p) {
    const std::vector<int>& arcs = sol.pod_arcs[p];
    if (arcs.empty()) continue;
    int home = net.storage_place(inst.pods[p].home_location);
    auto idle_home = [&](std::vector<int>& into, int from, int to) {
      for (int t = from; t < to && t < net.horizon; ++t) {
        for (int aid : net.out_arcs[net.node_id(home, t)]) {
          if (net.arcs[aid].kind == ArcKind::idle) {
            into.push_back(aid);
            break;
          }
        }
      }
    };
    std::vector<int> kept;
    size_t i = 0;
    while (i < arcs.size()) {
      const TsArc& a = net.arcs[arcs[i]];
      if (!(a.kind == ArcKind::traveling && a.from_place == home)) {
        kept.push_back(arcs[i]);
        ++i;
        continue;
      }
      // excursion: arcs up to (and including) the next arrival back home,
      // or to the horizon when the pod ends away
      size_t j = i;
      bool serves_pick = false;
      int end_period = net.horizon;
      while (j < arcs.size()) {
        const TsArc& b = net.arcs[arcs[j]];
        if (net.is_station_place(b.from_place) &&
            pick_nodes.count({static_cast<int>(p), net.node_id(b.from_place, b.from_period)})) {
          serves_pick = true;
        }
        ++j;
        if (b.kind == ArcKind::traveling && b.to_place == home) {
          end_period = b.to_period;
          break;
        }
      }
      if (serves_pick) {
        for (; i < j; ++i) kept.push_back(arcs[i]);
      } else {
        idle_home(kept, a.from_period, end_period);
        i = j;
      }
    }
    sol.pod_arcs[p] = std::move(kept);
    std::sort(sol.pod_arcs[p].begin(), sol.pod_arcs[p].end(), [&](int a, int b) {
      return net.arcs[a].from_period < net.arcs[b].from_period;
    });
  }
}

}  // namespace

TdscwSolution extract_solution(const Instance& inst, const TimeSpaceNetwork& net,
                               const TdscwModel& model, const std::vector<double>& values) {
  TdscwSolution sol;
  const int M = model.num_orders;
  const int W = model.num_stations;
  const int T = model.horizon;
  auto on = [&](int var) { return values[var] > 0.5; };

  for (int m = 0; m < M; ++m) {
    for (int w = 0; w < W; ++w) {
      if (on(model.z_var(m, w))) sol.z.insert({m, w});
      for (int t = 1; t <= T; ++t) {
        if (on(model.f_var(m, w, t))) sol.started.insert({m, w, t});
        if (on(model.g_var(m, w, t))) sol.finished.insert({m, w, t});
        if (on(model.v_var(m, w, t))) sol.open.insert({m, w, t});
      }
    }
    for (int line = 0; line < static_cast<int>(model.line_pods[m].size()); ++line) {
      const std::vector<int>& pods = model.line_pods[m][line];
      for (int pp = 0; pp < static_cast<int>(pods.size()); ++pp) {
        for (int w = 0; w < W; ++w) {
          std::set<int> periods;
          for (int t = 1; t <= T; ++t) {
            if (on(model.x_var(m, line, pp, w, t))) periods.insert(t);
          }
          if (!periods.empty()) sol.x[{m, line, pods[pp], w}] = std::move(periods);
        }
      }
    }
  }
  sol.pod_arcs.resize(inst.pods.size());
  for (int p = 0; p < static_cast<int>(inst.pods.size()); ++p) {
    const std::vector<int>& arcs = net.arcs_for_pod(p);
    for (int pos = 0; pos < static_cast<int>(arcs.size()); ++pos) {
      if (on(model.y_var(p, pos))) sol.pod_arcs[p].push_back(arcs[pos]);
    }
    std::sort(sol.pod_arcs[p].begin(), sol.pod_arcs[p].end(), [&](int a, int b) {
      return net.arcs[a].from_period < net.arcs[b].from_period;
    });
  }
  prune_empty_excursions(inst, net, sol);
  sol.objective = objective_of(inst, sol);
  return sol;
}

}  // namespace tdscw
