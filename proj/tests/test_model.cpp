#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "tdscw/model.hpp"
#include "tdscw/solution.hpp"

using namespace tdscw;

namespace {

bool has_family(const std::vector<Violation>& vs, ConstraintFamily fam) {
  for (const Violation& v : vs) {
    if (v.family == fam) return true;
  }
  return false;
}

// The hand schedule from the drawn toy: four one-stop excursions, five picks.
TdscwSolution figure2_reference_solution(const Instance& inst, const TimeSpaceNetwork& net) {
  auto travel_arc = [&](int from_place, int from_t, int to_place) {
    int node = net.node_id(from_place, from_t);
    for (int aid : net.out_arcs[node]) {
      const TsArc& a = net.arcs[aid];
      if (a.kind == ArcKind::traveling && a.to_place == to_place) return aid;
    }
    REQUIRE(false);
    return -1;
  };
  auto idle_arc = [&](int place, int t) {
    int node = net.node_id(place, t);
    for (int aid : net.out_arcs[node]) {
      if (net.arcs[aid].kind == ArcKind::idle) return aid;
    }
    REQUIRE(false);
    return -1;
  };
  const int w = 0;
  std::vector<std::vector<int>> arcs(4);
  auto home = [&](int pod) { return net.storage_place(inst.pods[pod].home_location); };
  // pod 3: out at t=0, picks at t=1, home at t=2
  arcs[3] = {travel_arc(home(3), 0, w), travel_arc(w, 1, home(3))};
  for (int t = 2; t < net.horizon; ++t) arcs[3].push_back(idle_arc(home(3), t));
  // pod 2: out at t=1, picks at t=2
  arcs[2] = {idle_arc(home(2), 0), travel_arc(home(2), 1, w), travel_arc(w, 2, home(2))};
  for (int t = 3; t < net.horizon; ++t) arcs[2].push_back(idle_arc(home(2), t));
  // pod 0 (far region): out at t=1, arrives t=3, double pick, home at t=5
  arcs[0] = {idle_arc(home(0), 0), travel_arc(home(0), 1, w), travel_arc(w, 3, home(0))};
  for (int t = 5; t < net.horizon; ++t) arcs[0].push_back(idle_arc(home(0), t));
  // pod 1: out at t=4, picks at t=5
  for (int t = 0; t < 4; ++t) arcs[1].push_back(idle_arc(home(1), t));
  arcs[1].push_back(travel_arc(home(1), 4, w));
  arcs[1].push_back(travel_arc(w, 5, home(1)));
  arcs[1].push_back(idle_arc(home(1), 6));

  // order 0 = items {0,1,2}; order 1 = items {3,4}
  std::vector<Pick> picks = {
      {0, 0, 0, 3, w, 1},  // item 0 from pod 3
      {0, 1, 1, 2, w, 2},  // item 1 from pod 2
      {0, 2, 2, 0, w, 3},  // item 2 from pod 0
      {1, 1, 4, 0, w, 3},  // item 4 from pod 0 (same stop)
      {1, 0, 3, 1, w, 5},  // item 3 from pod 1
  };
  return make_solution(inst, net, picks, arcs);
}

}  // namespace

TEST_CASE("figure-2 reference schedule is feasible and validator-clean") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwSolution sol = figure2_reference_solution(inst, net);
  CHECK(sol.objective == 5);
  std::vector<Violation> vs = validate(inst, net, sol);
  for (const Violation& v : vs) MESSAGE(v.detail);
  CHECK(vs.empty());
  Metrics m = metrics(inst, net, sol);
  CHECK(m.items_picked == 5);
  CHECK(m.pod_stops == 4);
  CHECK(m.picks_per_stop == doctest::Approx(1.25));
  // at most one open order at any time (open-order limit is 1)
  std::map<int, int> open_at;
  for (const auto& [mm, ww, tt] : sol.open) open_at[tt]++;
  for (const auto& [t, n] : open_at) CHECK(n <= 1);
}

TEST_CASE("figure-2 exact solve reaches five picks with four stops") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwModel model = build_model(inst, net);
  milp::SolveOptions opt;
  opt.time_limit_seconds = 55.0;
  milp::MilpSolution milp_sol = milp::solve(model.milp, opt);
  REQUIRE(milp_sol.status == milp::SolveStatus::optimal);
  CHECK(milp_sol.objective == doctest::Approx(5.0));
  TdscwSolution sol = extract_solution(inst, net, model, milp_sol.values);
  CHECK(sol.objective == 5);
  CHECK(validate(inst, net, sol).empty());
  Metrics m = metrics(inst, net, sol);
  CHECK(m.pod_stops == 4);
  std::map<int, int> open_at;
  for (const auto& [mm, ww, tt] : sol.open) open_at[tt]++;
  for (const auto& [t, n] : open_at) CHECK(n <= 1);
}

TEST_CASE("figure-2 LP relaxation is at least the integer optimum") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwModel model = build_model(inst, net);
  milp::MilpSolution lp = milp::solve_relaxation(model.milp);
  REQUIRE(lp.status == milp::SolveStatus::optimal);
  CHECK(lp.objective >= 5.0 - 1e-6);
  MESSAGE("integrality gap: ", lp.objective - 5.0);
}

TEST_CASE("zero-order instance is bounded by zero and idles feasibly") {
  GenOverrides o;
  o.orders = 0;
  o.items = 20;
  o.pods = 6;
  o.storage_locations = 3;
  o.grid_width = 20;
  o.grid_height = 8;
  o.pods_per_item_min = 1;
  o.pods_per_item_max = 3;
  Instance inst = generate_instance(InstanceClass::small, 2, o);
  TimeSpaceNetwork net = build_network(inst);
  TdscwModel model = build_model(inst, net);
  milp::MilpSolution lp = milp::solve_relaxation(model.milp);
  REQUIRE(lp.status == milp::SolveStatus::optimal);
  CHECK(lp.objective == doctest::Approx(0.0));
  TdscwSolution idle = idle_solution(inst, net);
  CHECK(idle.objective == 0);
  CHECK(validate(inst, net, idle).empty());
  Metrics m = metrics(inst, net, idle);
  CHECK(m.utilization == doctest::Approx(0.0));
  CHECK(m.items_picked == 0);
}

TEST_CASE("model size bookkeeping is consistent") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwModel model = build_model(inst, net);
  long long vars = 0;
  for (const auto& [fam, n] : model.size.variables_by_family) vars += n;
  CHECK(vars == model.size.variable_count);
  long long rows = 0;
  for (const auto& [fam, n] : model.size.constraints_by_family) rows += n;
  CHECK(rows == model.size.constraint_count);
  CHECK(model.milp.num_vars() == model.size.variable_count);
  CHECK(model.milp.num_rows() == model.size.constraint_count);
  // hand counts for the toy: 5 order lines, one pod covering each
  CHECK(model.size.variables_by_family.at("x") == 5 * 1 * 1 * 7);
  CHECK(model.size.variables_by_family.at("z") == 2);
  CHECK(model.size.constraints_by_family.at(ConstraintFamily::order_single_station) == 2);
  CHECK(model.size.constraints_by_family.at(ConstraintFamily::open_flag_balance) == 2 * 7);
  CHECK(model.size.constraints_by_family.at(ConstraintFamily::pick_once) == 5);
}

TEST_CASE("objective counts only completed-by-horizon picks") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwSolution sol = figure2_reference_solution(inst, net);
  int total_demand = 0;
  for (const Order& m : inst.orders) total_demand += static_cast<int>(m.items.size());
  CHECK(objective_of(inst, sol) <= total_demand);
  CHECK(objective_of(inst, sol) == 5);
}

TEST_CASE("validator flags each injected violation family") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwSolution base = figure2_reference_solution(inst, net);
  REQUIRE(validate(inst, net, base).empty());

  SUBCASE("monotonicity break") {
    TdscwSolution s = base;
    auto& periods = s.x.begin()->second;
    periods.erase(std::next(periods.begin()));  // knock a hole in the suffix
    CHECK(has_family(validate(inst, net, s), ConstraintFamily::pick_monotone));
  }
  SUBCASE("open order limit") {
    TdscwSolution s = base;
    // claim both orders open at period 2 (capacity is 1)
    s.started.insert({1, 0, 2});
    s.open.insert({1, 0, 2});
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::open_order_limit));
  }
  SUBCASE("inventory overdraw") {
    TdscwSolution s = base;
    // serve order 1 line 1 (item 4) again from pod 1 which stocks none
    for (int t = 5; t <= net.horizon; ++t) s.x[{1, 1, 1, 0}].insert(t);
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::pod_inventory));
    CHECK(has_family(vs, ConstraintFamily::pick_once));
  }
  SUBCASE("pick without departure") {
    TdscwSolution s = base;
    // fabricate a pick of order 1 line 0 from pod 2 at t=6; pod 2 is home then
    for (int t = 6; t <= net.horizon; ++t) s.x[{1, 0, 2, 0}].insert(t);
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::pick_requires_departure));
  }
  SUBCASE("missing return arc") {
    TdscwSolution s = base;
    auto& arcs = s.pod_arcs[1];
    arcs.erase(std::remove_if(arcs.begin(), arcs.end(),
                              [&](int aid) {
                                const TsArc& a = net.arcs[aid];
                                return a.kind == ArcKind::traveling &&
                                       net.is_station_place(a.from_place);
                              }),
               arcs.end());
    CHECK(has_family(validate(inst, net, s), ConstraintFamily::pod_flow_conservation));
  }
  SUBCASE("pod never starts") {
    TdscwSolution s = base;
    s.pod_arcs[2].clear();
    CHECK(has_family(validate(inst, net, s), ConstraintFamily::pod_flow_start));
  }
  SUBCASE("started flag dropped") {
    TdscwSolution s = base;
    for (int t = 1; t <= net.horizon; ++t) s.started.erase({0, 0, t});
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::first_item_flag));
  }
  SUBCASE("finished too early") {
    TdscwSolution s = base;
    s.finished.insert({0, 0, 1});  // order 0 has three items; only one by t=1
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::all_items_flag));
  }
  SUBCASE("open flag inconsistent") {
    TdscwSolution s = base;
    s.open.insert({0, 0, 6});  // started and finished well before 6, so v must be 0
    CHECK(has_family(validate(inst, net, s), ConstraintFamily::open_flag_balance));
  }
  SUBCASE("station time budget blown") {
    TdscwSolution s = base;
    // reroute pods 1 and 2 to also depart the station at t=1:
    // three departures (30 s) plus a pick (5 s) exceed the 30 s period
    for (int pod : {1, 2}) {
      int home = net.storage_place(inst.pods[pod].home_location);
      int out_arc = -1, back_arc = -1;
      for (int aid : net.out_arcs[net.node_id(home, 0)]) {
        if (net.arcs[aid].kind == ArcKind::traveling && net.arcs[aid].to_period == 1) {
          out_arc = aid;
        }
      }
      for (int aid : net.out_arcs[net.node_id(0, 1)]) {
        const TsArc& a = net.arcs[aid];
        if (a.kind == ArcKind::traveling && a.to_place == home) back_arc = aid;
      }
      REQUIRE(out_arc >= 0);
      REQUIRE(back_arc >= 0);
      auto& arcs = s.pod_arcs[pod];
      arcs.clear();
      arcs.push_back(out_arc);
      arcs.push_back(back_arc);
      for (int t = net.arcs[back_arc].to_period; t < net.horizon; ++t) {
        for (int aid : net.out_arcs[net.node_id(home, t)]) {
          if (net.arcs[aid].kind == ArcKind::idle) { arcs.push_back(aid); break; }
        }
      }
    }
    auto vs = validate(inst, net, s);
    CHECK(has_family(vs, ConstraintFamily::station_time_budget));
  }
  SUBCASE("station link broken") {
    TdscwSolution s = base;
    s.z.erase({1, 0});
    CHECK(has_family(validate(inst, net, s), ConstraintFamily::pick_station_link));
  }
}

TEST_CASE("solution JSON round trip") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  TdscwSolution sol = figure2_reference_solution(inst, net);
  std::string path = "/tmp/tdscw_test_solution.json";
  save_solution(inst, net, sol, path);
  TdscwSolution back = load_solution(inst, net, path);
  CHECK(back.objective == sol.objective);
  CHECK(back.x == sol.x);
  CHECK(back.z == sol.z);
  CHECK(back.pod_arcs == sol.pod_arcs);
  CHECK(back.open == sol.open);
  std::remove(path.c_str());

  std::string csv = "/tmp/tdscw_test_schedule.csv";
  write_schedule_csv(inst, net, sol, csv);
  std::remove(csv.c_str());
}
