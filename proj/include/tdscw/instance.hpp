#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdscw/rational.hpp"

namespace tdscw {

// A named grid cell (workstation, storage location, or intersection).
struct Site {
  int id = 0;
  int x = 0;
  int y = 0;
};

struct Layout {
  int width = 0;   // grid cells
  int height = 0;  // grid cells
  std::vector<Site> workstations;
  std::vector<Site> storage_locations;
  std::vector<Site> intersections;
  // Pods per period allowed through an intersection; absent id = unconstrained.
  std::map<int, Rational> intersection_capacity;

  const Site& workstation(int id) const { return workstations.at(id); }
  const Site& storage(int id) const { return storage_locations.at(id); }
};

struct Pod {
  int id = 0;
  int home_location = 0;           // storage-location id
  std::map<int, int> inventory;    // item id -> units on the shelf
};

struct Order {
  int id = 0;
  std::vector<int> items;  // nonempty; duplicates allowed
};

enum class StoragePolicy { fixed, flexible };

struct InstanceParams {
  int delta_seconds = 30;
  int horizon_periods = 30;
  int max_open_orders = 4;
  double item_pick_seconds = 5.0;
  double pod_process_seconds = 10.0;
  double pod_speed_cells_per_second = 1.0;
  StoragePolicy storage_policy = StoragePolicy::fixed;
  int storage_capacity = 24;  // pods per location, flexible policy only
  bool multi_stop = false;
};

struct Instance {
  Layout layout;
  std::vector<Pod> pods;
  std::vector<Order> orders;
  std::vector<int> items;  // item universe (sorted ids)
  InstanceParams params;

  int num_workstations() const { return static_cast<int>(layout.workstations.size()); }
  int num_periods() const { return params.horizon_periods; }
  // Pods carrying a given item, sorted by pod id.
  std::vector<int> pods_with_item(int item) const;
};

enum class InstanceClass { small, medium, full };

enum class CongestionRegime { none, moderate, tight };

// Optional knobs for generate_instance. Entity-count overrides shrink or grow
// the class defaults; desk-scale tests rely on them heavily.
struct GenOverrides {
  std::optional<int> workstations;
  std::optional<int> storage_locations;
  std::optional<int> items;
  std::optional<int> pods;
  std::optional<int> orders;
  std::optional<int> horizon_periods;
  std::optional<int> grid_width;
  std::optional<int> grid_height;
  std::optional<int> max_open_orders;
  std::optional<int> pods_per_item_min;
  std::optional<int> pods_per_item_max;
  std::optional<int> max_order_size;
  std::optional<double> item_pick_seconds;
  std::optional<double> pod_process_seconds;
  std::optional<double> pod_speed;
  std::optional<CongestionRegime> congestion;
  std::optional<StoragePolicy> storage_policy;
  std::optional<bool> multi_stop;

  // Parses "orders=20" style pairs; unknown keys or bad values throw.
  static GenOverrides from_strings(const std::vector<std::string>& kv);
};

// Deterministic parameterized generator for the three instance classes.
Instance generate_instance(InstanceClass cls, std::uint64_t seed,
                           const GenOverrides& overrides = {});

// The hand-built toy: one workstation, four storage regions each holding one
// pod with two items, a three-item order and a two-item order, open-order
// limit 1. Its exact optimum picks 5 items with 4 pod trips.
Instance figure2_instance();

// Structural validation; returns a list of violated-invariant messages
// (empty when the instance is well formed).
std::vector<std::string> check_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

bool operator==(const Instance& a, const Instance& b);

std::string to_string(InstanceClass cls);
InstanceClass instance_class_from_string(const std::string& s);

}  // namespace tdscw
