#include "tdscw/timespace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace tdscw {

int CongestionProfile::add_geometry(std::vector<CongestionEntry> entries, bool exact) {
  geometry_entries_.push_back(std::move(entries));
  geometry_exact_.push_back(exact);
  return static_cast<int>(geometry_entries_.size()) - 1;
}

void CongestionProfile::bind_arc(int arc_id, int geometry_id, int start_period) {
  if (arc_id >= static_cast<int>(arc_geometry_.size())) {
    arc_geometry_.resize(arc_id + 1, -1);
    arc_start_.resize(arc_id + 1, 0);
  }
  arc_geometry_[arc_id] = geometry_id;
  arc_start_[arc_id] = start_period;
}

std::vector<CongestionEntry> CongestionProfile::for_arc(int arc_id) const {
  std::vector<CongestionEntry> out;
  if (!has_arc(arc_id)) return out;
  const auto& base = geometry_entries_[arc_geometry_[arc_id]];
  out.reserve(base.size());
  for (const CongestionEntry& e : base) {
    out.push_back({e.intersection, e.period + arc_start_[arc_id], e.q});
  }
  return out;
}

bool CongestionProfile::exact_for_arc(int arc_id) const {
  return has_arc(arc_id) && geometry_exact_[arc_geometry_[arc_id]];
}

bool CongestionProfile::has_arc(int arc_id) const {
  return arc_id >= 0 && arc_id < static_cast<int>(arc_geometry_.size()) &&
         arc_geometry_[arc_id] >= 0;
}

int TimeSpaceNetwork::manhattan(int from_place, int to_place) const {
  return std::abs(place_x[from_place] - place_x[to_place]) +
         std::abs(place_y[from_place] - place_y[to_place]);
}

namespace {

int periods_for(int cells, double speed, int delta) {
  if (cells == 0) return 0;
  double seconds = cells / speed;
  int periods = static_cast<int>(std::ceil(seconds / delta - 1e-9));
  return std::max(1, periods);
}

int periods_for_distance(int cells, const InstanceParams& params) {
  return periods_for(cells, params.pod_speed_cells_per_second, params.delta_seconds);
}

}  // namespace

int TimeSpaceNetwork::travel_periods(int from_place, int to_place) const {
  return periods_for(manhattan(from_place, to_place), cells_per_second, delta_seconds);
}

namespace {

// Contributions for a trip of |dx|+|dy| unit moves, origin at lattice (0,0),
// at one sampled elapsed distance d. Fraction through offset (a, d-a) is
// C(d,a) * C(D-d, |dx|-a) / C(D, |dx|).
struct GeometryBuilder {
  const Layout& layout;
  const InstanceParams& params;
  std::map<std::pair<int, int>, int> cell_to_intersection;

  explicit GeometryBuilder(const Layout& lay, const InstanceParams& prm)
      : layout(lay), params(prm) {
    for (const Site& s : lay.intersections) cell_to_intersection[{s.x, s.y}] = s.id;
  }

  std::vector<CongestionEntry> build(int x1, int y1, int x2, int y2, bool* exact_out) const {
    std::vector<CongestionEntry> entries;
    bool exact = true;
    const int dx = std::abs(x2 - x1), dy = std::abs(y2 - y1);
    const int sx = x2 >= x1 ? 1 : -1, sy = y2 >= y1 ? 1 : -1;
    const int total = dx + dy;
    if (total == 0) {
      if (exact_out) *exact_out = true;
      return entries;
    }
    const double duration = total / params.pod_speed_cells_per_second;
    Rational::Int denom = 0;
    bool overflow = false;
    try {
      denom = binomial128(total, dx);
    } catch (const std::overflow_error&) {
      overflow = true;
      exact = false;
    }
    for (int k = 0;; ++k) {
      double tau = static_cast<double>(k) * params.delta_seconds;
      if (tau > duration + 1e-9) break;
      double cells = tau * params.pod_speed_cells_per_second;
      int d = static_cast<int>(std::llround(cells));
      if (std::abs(cells - d) > 1e-6) continue;  // pod is mid-move at this boundary
      d = std::min(d, total);
      for (int a = std::max(0, d - dy); a <= std::min(dx, d); ++a) {
        int cx = x1 + sx * a;
        int cy = y1 + sy * (d - a);
        auto it = cell_to_intersection.find({cx, cy});
        if (it == cell_to_intersection.end()) continue;
        Rational q;
        if (!overflow) {
          try {
            Rational::Int through =
                binomial128(d, a) * binomial128(total - d, dx - a);
            q = Rational(through, denom);
          } catch (const std::overflow_error&) {
            overflow = true;
            exact = false;
          }
        }
        if (overflow) {
          double lq = std::lgamma(d + 1) - std::lgamma(a + 1) - std::lgamma(d - a + 1) +
                      std::lgamma(total - d + 1) - std::lgamma(dx - a + 1) -
                      std::lgamma(total - d - (dx - a) + 1) - (std::lgamma(total + 1) -
                      std::lgamma(dx + 1) - std::lgamma(dy + 1));
          double approx = std::exp(lq);
          const long long scale = 1LL << 40;
          q = Rational(static_cast<Rational::Int>(std::llround(approx * scale)), scale);
        }
        if (!q.is_zero()) entries.push_back({it->second, k, q});
      }
    }
    if (exact_out) *exact_out = exact;
    return entries;
  }
};

}  // namespace

std::vector<CongestionEntry> congestion_contributions(const TsArc& arc, const Layout& layout,
                                                      const InstanceParams& params, bool* exact) {
  if (arc.kind != ArcKind::traveling) {
    if (exact) *exact = true;
    return {};
  }
  // Resolve place coordinates: stations first, then storage.
  auto coords = [&](int place) -> std::pair<int, int> {
    int w = static_cast<int>(layout.workstations.size());
    if (place < w) {
      const Site& s = layout.workstations[place];
      return {s.x, s.y};
    }
    const Site& s = layout.storage_locations[place - w];
    return {s.x, s.y};
  };
  auto [x1, y1] = coords(arc.from_place);
  auto [x2, y2] = coords(arc.to_place);
  GeometryBuilder builder(layout, params);
  std::vector<CongestionEntry> entries = builder.build(x1, y1, x2, y2, exact);
  for (CongestionEntry& e : entries) e.period += arc.from_period;
  return entries;
}

TimeSpaceNetwork build_network(const Instance& inst) {
  TimeSpaceNetwork net;
  const Layout& lay = inst.layout;
  net.num_workstations = static_cast<int>(lay.workstations.size());
  net.num_locations = static_cast<int>(lay.storage_locations.size());
  net.horizon = inst.params.horizon_periods;
  net.delta_seconds = inst.params.delta_seconds;
  net.cells_per_second = inst.params.pod_speed_cells_per_second;
  const int W = net.num_workstations;
  const int L = net.num_locations;
  const int T = net.horizon;

  net.place_x.resize(W + L);
  net.place_y.resize(W + L);
  for (int w = 0; w < W; ++w) {
    net.place_x[w] = lay.workstations[w].x;
    net.place_y[w] = lay.workstations[w].y;
  }
  for (int l = 0; l < L; ++l) {
    net.place_x[W + l] = lay.storage_locations[l].x;
    net.place_y[W + l] = lay.storage_locations[l].y;
  }

  net.out_arcs.assign(net.num_nodes(), {});
  net.in_arcs.assign(net.num_nodes(), {});

  GeometryBuilder geom(lay, inst.params);
  // One profile geometry per (origin place, destination place) pair in use.
  std::map<std::pair<int, int>, int> geometry_of;

  auto add_arc = [&](ArcKind kind, int p1, int t1, int p2, int t2) -> int {
    TsArc arc;
    arc.id = static_cast<int>(net.arcs.size());
    arc.kind = kind;
    arc.from_place = p1;
    arc.from_period = t1;
    arc.to_place = p2;
    arc.to_period = t2;
    net.arcs.push_back(arc);
    net.out_arcs[net.node_id(p1, t1)].push_back(arc.id);
    net.in_arcs[net.node_id(p2, t2)].push_back(arc.id);
    if (kind == ArcKind::traveling) {
      auto key = std::make_pair(p1, p2);
      auto it = geometry_of.find(key);
      if (it == geometry_of.end()) {
        bool exact = true;
        auto entries = geom.build(net.place_x[p1], net.place_y[p1], net.place_x[p2],
                                  net.place_y[p2], &exact);
        it = geometry_of.emplace(key, net.congestion.add_geometry(std::move(entries), exact))
                 .first;
      }
      net.congestion.bind_arc(arc.id, it->second, t1);
    }
    return arc.id;
  };

  // Idle arcs everywhere.
  std::vector<std::vector<int>> idle_at_place(W + L);
  for (int place = 0; place < W + L; ++place) {
    for (int t = 0; t < T; ++t) {
      idle_at_place[place].push_back(add_arc(ArcKind::idle, place, t, place, t + 1));
    }
  }

  // Traveling arcs: storage <-> station for every pair, truncated at the
  // horizon; station -> station only under the multi-stop policy.
  std::vector<std::vector<int>> out_of_storage(L), into_storage(L);
  std::vector<int> station_arcs;
  for (int l = 0; l < L; ++l) {
    int sp = net.storage_place(l);
    for (int w = 0; w < W; ++w) {
      int d = periods_for_distance(net.manhattan(sp, w), inst.params);
      for (int t = 0; t + d <= T; ++t) {
        out_of_storage[l].push_back(add_arc(ArcKind::traveling, sp, t, w, t + d));
        into_storage[l].push_back(add_arc(ArcKind::traveling, w, t, sp, t + d));
      }
    }
  }
  if (inst.params.multi_stop) {
    for (int w1 = 0; w1 < W; ++w1) {
      for (int w2 = 0; w2 < W; ++w2) {
        if (w1 == w2) continue;
        int d = periods_for_distance(std::max(1, net.manhattan(w1, w2)), inst.params);
        for (int t = 0; t + d <= T; ++t) {
          station_arcs.push_back(add_arc(ArcKind::traveling, w1, t, w2, t + d));
        }
      }
    }
  }

  // Usable arcs per pod. Fixed policy: arcs touching the pod's home plus
  // station idling/hopping. Flexible policy: all arcs.
  net.pod_start_node.resize(inst.pods.size());
  net.pod_arc_lists.resize(inst.pods.size());
  std::vector<std::vector<int>> fixed_list_per_location(L);
  std::vector<int> all_arcs;
  if (inst.params.storage_policy == StoragePolicy::flexible) {
    all_arcs.resize(net.arcs.size());
    for (size_t a = 0; a < net.arcs.size(); ++a) all_arcs[a] = static_cast<int>(a);
  }
  for (const Pod& pod : inst.pods) {
    int l = pod.home_location;
    net.pod_start_node[pod.id] = net.node_id(net.storage_place(l), 0);
    if (inst.params.storage_policy == StoragePolicy::flexible) {
      net.pod_arc_lists[pod.id] = all_arcs;
      continue;
    }
    if (fixed_list_per_location[l].empty()) {
      std::vector<int>& list = fixed_list_per_location[l];
      list = out_of_storage[l];
      list.insert(list.end(), into_storage[l].begin(), into_storage[l].end());
      list.insert(list.end(), idle_at_place[net.storage_place(l)].begin(),
                  idle_at_place[net.storage_place(l)].end());
      for (int w = 0; w < W; ++w) {
        list.insert(list.end(), idle_at_place[w].begin(), idle_at_place[w].end());
      }
      list.insert(list.end(), station_arcs.begin(), station_arcs.end());
      std::sort(list.begin(), list.end());
    }
    net.pod_arc_lists[pod.id] = fixed_list_per_location[l];
  }
  return net;
}

NetworkStats network_stats(const TimeSpaceNetwork& net) {
  NetworkStats st;
  st.nodes = net.num_nodes();
  for (const TsArc& a : net.arcs) {
    if (a.kind == ArcKind::traveling) ++st.traveling_arcs;
    else ++st.idle_arcs;
  }
  st.per_pod_traveling.resize(net.pod_arc_lists.size(), 0);
  st.per_pod_total.resize(net.pod_arc_lists.size(), 0);
  for (size_t p = 0; p < net.pod_arc_lists.size(); ++p) {
    for (int a : net.pod_arc_lists[p]) {
      ++st.per_pod_total[p];
      if (net.arcs[a].kind == ArcKind::traveling) ++st.per_pod_traveling[p];
    }
  }
  return st;
}

std::string dump_network_json(const TimeSpaceNetwork& net) {
  nlohmann::json j;
  j["workstations"] = net.num_workstations;
  j["locations"] = net.num_locations;
  j["horizon"] = net.horizon;
  nlohmann::json arcs = nlohmann::json::array();
  for (const TsArc& a : net.arcs) {
    nlohmann::json aj{{"id", a.id},
                      {"kind", a.kind == ArcKind::traveling ? "traveling" : "idle"},
                      {"from_place", a.from_place},
                      {"from_period", a.from_period},
                      {"to_place", a.to_place},
                      {"to_period", a.to_period}};
    if (net.congestion.has_arc(a.id)) {
      nlohmann::json prof = nlohmann::json::array();
      for (const CongestionEntry& e : net.congestion.for_arc(a.id)) {
        prof.push_back({{"intersection", e.intersection},
                        {"period", e.period},
                        {"q", e.q.to_decimal_string()}});
      }
      aj["profile"] = prof;
    }
    arcs.push_back(aj);
  }
  j["arcs"] = arcs;
  return j.dump(1);
}

}  // namespace tdscw
