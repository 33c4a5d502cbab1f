#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "tdscw/instance.hpp"
#include "tdscw/timespace.hpp"

using namespace tdscw;

namespace {

// Exhaustive oracle: walk every monotone lattice path from (0,0) to (dx,dy)
// and count, for each elapsed step d, how many paths sit on each cell.
std::map<std::pair<int, std::pair<int, int>>, long long> enumerate_paths(int dx, int dy) {
  std::map<std::pair<int, std::pair<int, int>>, long long> visits;
  const int total = dx + dy;
  std::vector<int> moves(total, 0);  // 0 = x step, 1 = y step
  for (int i = dx; i < total; ++i) moves[i] = 1;
  std::sort(moves.begin(), moves.end());
  do {
    int x = 0, y = 0;
    visits[{0, {0, 0}}]++;
    for (int d = 0; d < total; ++d) {
      if (moves[d] == 0) ++x;
      else ++y;
      visits[{d + 1, {x, y}}]++;
    }
  } while (std::next_permutation(moves.begin(), moves.end()));
  return visits;
}

// Toy layout: a bare grid where every cell is an intersection.
Layout grid_layout(int w, int h) {
  Layout lay;
  lay.width = w;
  lay.height = h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) lay.intersections.push_back({y * w + x, x, y});
  }
  return lay;
}

}  // namespace

TEST_CASE("travel time rounds up to whole periods") {
  GenOverrides o;
  o.items = 10;
  o.pods = 4;
  o.orders = 2;
  o.storage_locations = 2;
  o.workstations = 1;
  o.grid_width = 80;
  o.grid_height = 3;
  o.pods_per_item_min = 1;
  o.pods_per_item_max = 2;
  Instance inst = generate_instance(InstanceClass::small, 1, o);
  // 60 s at 1 cell/s over 60 cells -> 2 periods; 75 cells -> 3 periods
  inst.layout.workstations[0] = {0, 0, 0};
  inst.layout.storage_locations[0] = {0, 60, 0};
  inst.layout.storage_locations[1] = {1, 75, 0};
  TimeSpaceNetwork net = build_network(inst);
  CHECK(net.travel_periods(net.storage_place(0), 0) == 2);
  CHECK(net.travel_periods(net.storage_place(1), 0) == 3);
  for (const TsArc& a : net.arcs) {
    if (a.kind == ArcKind::traveling) {
      CHECK(a.to_period - a.from_period ==
            net.travel_periods(a.from_place, a.to_place));
    } else {
      CHECK(a.to_period == a.from_period + 1);
      CHECK(a.from_place == a.to_place);
    }
  }
}

TEST_CASE("fixed policy keeps pods between home and stations") {
  Instance inst = generate_instance(InstanceClass::small, 2, [] {
    GenOverrides o;
    o.items = 30;
    o.pods = 8;
    o.orders = 4;
    o.storage_locations = 4;
    o.grid_width = 30;
    o.grid_height = 12;
    o.pods_per_item_min = 2;
    o.pods_per_item_max = 3;
    return o;
  }());
  TimeSpaceNetwork net = build_network(inst);
  for (const Pod& p : inst.pods) {
    int home = net.storage_place(p.home_location);
    for (int aid : net.arcs_for_pod(p.id)) {
      const TsArc& a = net.arcs[aid];
      for (int place : {a.from_place, a.to_place}) {
        bool ok = place == home || net.is_station_place(place);
        CHECK(ok);
      }
    }
  }
}

TEST_CASE("congestion equals exhaustive enumeration on small grids") {
  std::mt19937_64 rng(99);
  InstanceParams params;
  params.delta_seconds = 30;
  params.pod_speed_cells_per_second = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    int dx = static_cast<int>(rng() % 7);
    int dy = static_cast<int>(rng() % 7);
    if (dx + dy == 0 || dx + dy > 12) { --trial; continue; }
    Layout lay = grid_layout(dx + 1, dy + 1);
    // one cell per second; sample boundaries every dmax(1,...) steps
    params.pod_speed_cells_per_second = 1.0;
    params.delta_seconds = 1 + static_cast<int>(rng() % 3);

    TsArc arc;
    arc.kind = ArcKind::traveling;
    arc.from_place = 0;
    arc.to_place = 1;
    arc.from_period = 0;
    Layout lay2 = lay;
    lay2.workstations.push_back({0, 0, 0});
    lay2.storage_locations.push_back({0, dx, dy});
    arc.from_place = 0;          // workstation at origin
    arc.to_place = 1;            // storage at (dx,dy): place index 1 = first storage
    bool exact = true;
    auto entries = congestion_contributions(arc, lay2, params, &exact);
    CHECK(exact);

    auto visits = enumerate_paths(dx, dy);
    Rational total(binomial128(dx + dy, dx), 1);
    std::map<std::pair<int, int>, Rational> got;  // (cell id, period) -> q
    for (const auto& e : entries) got[{e.intersection, e.period}] = e.q;
    // every sampled boundary that lands on a whole step must match exactly
    for (int k = 0;; ++k) {
      long long cells = static_cast<long long>(k) * params.delta_seconds;
      if (cells > dx + dy) break;
      int d = static_cast<int>(cells);
      for (int x = 0; x <= dx; ++x) {
        for (int y = 0; y <= dy; ++y) {
          auto it = visits.find({d, {x, y}});
          Rational expect = it == visits.end() ? Rational(0)
                                               : Rational(it->second, binomial128(dx + dy, dx));
          int cell_id = y * lay2.width + x;
          auto jt = got.find({cell_id, k});
          Rational actual = jt == got.end() ? Rational(0) : jt->second;
          CHECK(actual == expect);
        }
      }
    }
  }
}

TEST_CASE("worked lattice example: (0,0) to (3,2), cell (1,1) after 2 moves") {
  Layout lay = grid_layout(4, 3);
  lay.workstations.push_back({0, 0, 0});
  lay.storage_locations.push_back({0, 3, 2});
  InstanceParams params;
  params.delta_seconds = 2;  // one boundary after exactly 2 moves at 1 cell/s
  params.pod_speed_cells_per_second = 1.0;
  TsArc arc;
  arc.kind = ArcKind::traveling;
  arc.from_place = 0;
  arc.to_place = 1;
  arc.from_period = 0;
  auto entries = congestion_contributions(arc, lay, params);
  Rational q_11;
  Rational origin_q;
  for (const auto& e : entries) {
    if (e.period == 1 && e.intersection == 1 * lay.width + 1) q_11 = e.q;
    if (e.period == 0 && e.intersection == 0) origin_q = e.q;
  }
  CHECK(q_11 == Rational(6, 10));  // C(2,1)*C(3,1)/C(5,2)
  CHECK(origin_q == Rational(1));  // all paths start at the origin
}

TEST_CASE("reconstructed three-by-three block geometry gives the drawn fractions") {
  // Trip across a 3x3 block lattice, 10 s per move: 60 s total, sampled at 30 s.
  Layout lay = grid_layout(4, 4);
  lay.workstations.push_back({0, 0, 0});
  lay.storage_locations.push_back({0, 3, 3});
  InstanceParams params;
  params.delta_seconds = 30;
  params.pod_speed_cells_per_second = 0.1;  // one lattice move per 10 s
  TsArc arc;
  arc.kind = ArcKind::traveling;
  arc.from_place = 0;
  arc.to_place = 1;
  arc.from_period = 0;
  auto entries = congestion_contributions(arc, lay, params);
  std::map<std::pair<int, int>, Rational> got;
  for (const auto& e : entries) got[{e.intersection, e.period}] = e.q;
  auto q_at = [&](int x, int y, int k) {
    auto it = got.find({y * lay.width + x, k});
    return it == got.end() ? Rational(0) : it->second;
  };
  // midpoint boundary: corner path cell 1/20, interior cell 9/20, off-diagonal 0
  CHECK(q_at(0, 3, 1) == Rational(1, 20));
  CHECK(q_at(1, 2, 1) == Rational(9, 20));
  CHECK(q_at(2, 1, 1) == Rational(9, 20));
  CHECK(q_at(3, 0, 1) == Rational(1, 20));
  CHECK(q_at(1, 1, 1) == Rational(0));
  CHECK(q_at(2, 2, 1) == Rational(0));
}

TEST_CASE("per-boundary contributions sum to one on full lattices") {
  Layout lay = grid_layout(7, 5);
  lay.workstations.push_back({0, 1, 0});
  lay.storage_locations.push_back({0, 6, 4});
  InstanceParams params;
  params.delta_seconds = 3;
  params.pod_speed_cells_per_second = 1.0;
  TsArc arc;
  arc.kind = ArcKind::traveling;
  arc.from_place = 0;
  arc.to_place = 1;
  arc.from_period = 5;
  auto entries = congestion_contributions(arc, lay, params);
  std::map<int, Rational> per_period;
  for (const auto& e : entries) {
    per_period[e.period] += e.q;
    CHECK(e.q > Rational(0));
    CHECK(e.q <= Rational(1));
  }
  CHECK(per_period.size() == 4);  // 9 moves, boundaries at 0,3,6,9 steps
  for (const auto& [t, total] : per_period) {
    CHECK(total == Rational(1));
  }
  CHECK(per_period.begin()->first == 5);  // shifted by the start period
}

TEST_CASE("idle and degenerate arcs have empty profiles") {
  Layout lay = grid_layout(3, 3);
  lay.workstations.push_back({0, 1, 1});
  lay.storage_locations.push_back({0, 1, 1});
  InstanceParams params;
  TsArc idle;
  idle.kind = ArcKind::idle;
  CHECK(congestion_contributions(idle, lay, params).empty());
  TsArc degenerate;
  degenerate.kind = ArcKind::traveling;
  degenerate.from_place = 0;
  degenerate.to_place = 1;  // same cell
  CHECK(congestion_contributions(degenerate, lay, params).empty());
}

TEST_CASE("adjacency lists partition arc endpoints") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  std::vector<int> out_count(net.arcs.size(), 0), in_count(net.arcs.size(), 0);
  for (int n = 0; n < net.num_nodes(); ++n) {
    for (int a : net.out_arcs[n]) {
      ++out_count[a];
      CHECK(net.node_id(net.arcs[a].from_place, net.arcs[a].from_period) == n);
    }
    for (int a : net.in_arcs[n]) {
      ++in_count[a];
      CHECK(net.node_id(net.arcs[a].to_place, net.arcs[a].to_period) == n);
    }
  }
  for (size_t a = 0; a < net.arcs.size(); ++a) {
    CHECK(out_count[a] == 1);
    CHECK(in_count[a] == 1);
  }
}

TEST_CASE("network stats track policies") {
  Instance inst = figure2_instance();
  TimeSpaceNetwork net = build_network(inst);
  NetworkStats st = network_stats(net);
  const int T = inst.params.horizon_periods;
  const int W = 1;
  for (long long c : st.per_pod_traveling) {
    CHECK(c <= 2 * W * T);
  }
  // multi-stop adds station-to-station arcs
  Instance multi = inst;
  multi.params.multi_stop = true;
  multi.layout.workstations.push_back({1, 10, 0});
  TimeSpaceNetwork net2 = build_network(multi);
  NetworkStats st2 = network_stats(net2);
  CHECK(st2.traveling_arcs > st.traveling_arcs);
  bool has_station_arc = false;
  for (const TsArc& a : net2.arcs) {
    if (a.kind == ArcKind::traveling && net2.is_station_place(a.from_place) &&
        net2.is_station_place(a.to_place)) {
      has_station_arc = true;
    }
  }
  CHECK(has_station_arc);

  Instance empty = inst;
  empty.pods.clear();
  TimeSpaceNetwork net3 = build_network(empty);
  CHECK(net3.pod_start_node.empty());
}
