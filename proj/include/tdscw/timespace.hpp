#pragma once

#include <string>
#include <vector>

#include "tdscw/instance.hpp"
#include "tdscw/rational.hpp"

namespace tdscw {

// Places unify workstations and storage locations: ids [0, W) are stations,
// [W, W+L) are storage locations.
enum class ArcKind { traveling, idle };

struct TsNode {
  int place = 0;
  int period = 0;
};

struct TsArc {
  int id = 0;
  ArcKind kind = ArcKind::idle;
  int from_place = 0;
  int from_period = 0;
  int to_place = 0;
  int to_period = 0;

  int start_period() const { return from_period; }
  int start_place() const { return from_place; }
};

struct CongestionEntry {
  int intersection = 0;
  int period = 0;
  Rational q;  // fraction of the arc's shortest paths at this cell and instant
};

// Per-arc congestion contributions. Arcs sharing origin/destination geometry
// share one entry table; lookups shift it to the arc's start period.
class CongestionProfile {
 public:
  int add_geometry(std::vector<CongestionEntry> entries, bool exact);
  void bind_arc(int arc_id, int geometry_id, int start_period);

  std::vector<CongestionEntry> for_arc(int arc_id) const;
  bool exact_for_arc(int arc_id) const;
  bool has_arc(int arc_id) const;

 private:
  std::vector<std::vector<CongestionEntry>> geometry_entries_;
  std::vector<bool> geometry_exact_;
  std::vector<int> arc_geometry_;  // -1 when the arc has no profile
  std::vector<int> arc_start_;
};

struct TimeSpaceNetwork {
  int num_workstations = 0;
  int num_locations = 0;
  int horizon = 0;  // periods; node time points run 0..horizon
  int delta_seconds = 30;
  double cells_per_second = 1.0;

  std::vector<TsArc> arcs;
  std::vector<std::vector<int>> out_arcs;  // node id -> arc ids
  std::vector<std::vector<int>> in_arcs;
  std::vector<int> pod_start_node;              // per pod
  std::vector<std::vector<int>> pod_arc_lists;  // usable arcs per pod (shared per home under fixed policy)
  std::vector<int> place_x, place_y;            // grid coordinates per place
  CongestionProfile congestion;

  int num_places() const { return num_workstations + num_locations; }
  int num_nodes() const { return num_places() * (horizon + 1); }
  int station_place(int w) const { return w; }
  int storage_place(int l) const { return num_workstations + l; }
  bool is_station_place(int place) const { return place < num_workstations; }
  int node_id(int place, int period) const { return place * (horizon + 1) + period; }
  TsNode node_of(int node_id) const { return {node_id / (horizon + 1), node_id % (horizon + 1)}; }
  bool is_storage_node(int node_id) const { return !is_station_place(node_of(node_id).place); }
  bool is_end_node(int node_id) const { return node_of(node_id).period == horizon; }

  const std::vector<int>& arcs_for_pod(int pod) const { return pod_arc_lists[pod]; }
  // Travel time between two places, in whole periods (rounded up).
  int travel_periods(int from_place, int to_place) const;
  int manhattan(int from_place, int to_place) const;
};

TimeSpaceNetwork build_network(const Instance& inst);

// Congestion contributions of one traveling arc, from lattice-path counting:
// (#monotone shortest grid paths through intersection j at each sampled
// period boundary) / (#shortest paths), exact rational arithmetic.
// `exact` (optional out) reports false if 128-bit counting overflowed and the
// values fell back to floating point.
std::vector<CongestionEntry> congestion_contributions(const TsArc& arc, const Layout& layout,
                                                      const InstanceParams& params,
                                                      bool* exact = nullptr);

struct NetworkStats {
  long long traveling_arcs = 0;
  long long idle_arcs = 0;
  long long nodes = 0;
  std::vector<long long> per_pod_traveling;
  std::vector<long long> per_pod_total;
};

NetworkStats network_stats(const TimeSpaceNetwork& net);

// Debug dump (nodes, arcs, profiles) as a JSON string.
std::string dump_network_json(const TimeSpaceNetwork& net);

}  // namespace tdscw
