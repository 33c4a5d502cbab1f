#include "tdscw/instance.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tdscw {

using nlohmann::json;

std::vector<int> Instance::pods_with_item(int item) const {
  std::vector<int> out;
  for (const Pod& p : pods) {
    auto it = p.inventory.find(item);
    if (it != p.inventory.end() && it->second > 0) out.push_back(p.id);
  }
  return out;
}

std::string to_string(InstanceClass cls) {
  switch (cls) {
    case InstanceClass::small: return "small";
    case InstanceClass::medium: return "medium";
    case InstanceClass::full: return "full";
  }
  return "small";
}

InstanceClass instance_class_from_string(const std::string& s) {
  if (s == "small") return InstanceClass::small;
  if (s == "medium") return InstanceClass::medium;
  if (s == "full") return InstanceClass::full;
  throw std::invalid_argument("unknown instance class: " + s);
}

namespace {

CongestionRegime congestion_from_string(const std::string& s) {
  if (s == "none") return CongestionRegime::none;
  if (s == "moderate") return CongestionRegime::moderate;
  if (s == "tight") return CongestionRegime::tight;
  throw std::invalid_argument("unknown congestion regime: " + s);
}

struct ClassDefaults {
  int workstations, locations, items, pods, orders, grid_w, grid_h;
  int pods_per_item_min, pods_per_item_max;
};

ClassDefaults defaults_for(InstanceClass cls) {
  // Entity counts per class; grids sized so storage-to-station trips span one
  // to three periods at 1 cell/s and a 30 s period.
  switch (cls) {
    case InstanceClass::small:
      return {2, 14, 1000, 336, 100, 76, 36, 16, 20};
    case InstanceClass::medium:
      return {3, 30, 10000, 720, 200, 100, 44, 22, 26};
    case InstanceClass::full:
      return {20, 140, 200000, 3360, 1000, 240, 80, 16, 18};
  }
  return {2, 14, 1000, 336, 100, 76, 36, 16, 20};
}

// Order sizes follow a truncated geometric (about half the orders are
// single-item). Stratified so the size multiset is a deterministic function
// of the order count; the generator then shuffles the assignment.
std::vector<int> order_size_multiset(int orders, int max_size) {
  std::vector<double> weight(max_size);
  double total = 0.0;
  for (int k = 1; k <= max_size; ++k) {
    weight[k - 1] = std::pow(0.5, k);
    total += weight[k - 1];
  }
  std::vector<int> counts(max_size, 0);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int k = 1; k <= max_size; ++k) {
    double exact = orders * weight[k - 1] / total;
    counts[k - 1] = static_cast<int>(exact);
    assigned += counts[k - 1];
    remainders.push_back({exact - counts[k - 1], k - 1});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; assigned < orders; ++i, ++assigned) {
    counts[remainders[i % remainders.size()].second]++;
  }
  std::vector<int> sizes;
  for (int k = 1; k <= max_size; ++k) {
    for (int c = 0; c < counts[k - 1]; ++c) sizes.push_back(k);
  }
  return sizes;
}

}  // namespace

GenOverrides GenOverrides::from_strings(const std::vector<std::string>& kv) {
  GenOverrides o;
  for (const std::string& pair : kv) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override must be key=value, got: " + pair);
    }
    std::string key = pair.substr(0, eq);
    std::string val = pair.substr(eq + 1);
    auto as_int = [&] { return std::stoi(val); };
    auto as_double = [&] { return std::stod(val); };
    if (key == "workstations") o.workstations = as_int();
    else if (key == "storage_locations" || key == "locations") o.storage_locations = as_int();
    else if (key == "items") o.items = as_int();
    else if (key == "pods") o.pods = as_int();
    else if (key == "orders") o.orders = as_int();
    else if (key == "horizon_periods") o.horizon_periods = as_int();
    else if (key == "grid_width") o.grid_width = as_int();
    else if (key == "grid_height") o.grid_height = as_int();
    else if (key == "max_open_orders") o.max_open_orders = as_int();
    else if (key == "pods_per_item_min") o.pods_per_item_min = as_int();
    else if (key == "pods_per_item_max") o.pods_per_item_max = as_int();
    else if (key == "max_order_size") o.max_order_size = as_int();
    else if (key == "item_pick_seconds") o.item_pick_seconds = as_double();
    else if (key == "pod_process_seconds") o.pod_process_seconds = as_double();
    else if (key == "pod_speed") o.pod_speed = as_double();
    else if (key == "congestion") o.congestion = congestion_from_string(val);
    else if (key == "storage_policy")
      o.storage_policy = val == "flexible" ? StoragePolicy::flexible : StoragePolicy::fixed;
    else if (key == "multi_stop") o.multi_stop = (val == "true" || val == "1");
    else throw std::invalid_argument("unknown override key: " + key);
  }
  return o;
}

Instance generate_instance(InstanceClass cls, std::uint64_t seed, const GenOverrides& ov) {
  ClassDefaults d = defaults_for(cls);
  const int n_ws = ov.workstations.value_or(d.workstations);
  const int n_loc = ov.storage_locations.value_or(d.locations);
  const int n_items = ov.items.value_or(d.items);
  const int n_pods = ov.pods.value_or(d.pods);
  const int n_orders = ov.orders.value_or(d.orders);
  const int grid_w = ov.grid_width.value_or(d.grid_w);
  const int grid_h = ov.grid_height.value_or(d.grid_h);
  const int ppi_min = ov.pods_per_item_min.value_or(d.pods_per_item_min);
  const int ppi_max = ov.pods_per_item_max.value_or(d.pods_per_item_max);
  const int max_order_size = ov.max_order_size.value_or(8);
  const CongestionRegime regime = ov.congestion.value_or(CongestionRegime::moderate);

  if (n_ws < 1 || n_loc < 1 || n_items < 1 || n_pods < 1 || n_orders < 0) {
    throw std::invalid_argument("entity counts must be positive (orders may be zero)");
  }
  if (ppi_min < 1 || ppi_max < ppi_min || ppi_max > n_pods) {
    throw std::invalid_argument("pods_per_item bounds invalid");
  }

  InstanceParams params;
  params.item_pick_seconds = ov.item_pick_seconds.value_or(5.0);
  params.pod_process_seconds = ov.pod_process_seconds.value_or(10.0);
  params.pod_speed_cells_per_second = ov.pod_speed.value_or(1.0);
  params.horizon_periods = ov.horizon_periods.value_or(30);
  params.max_open_orders = ov.max_open_orders.value_or(4);
  params.storage_policy = ov.storage_policy.value_or(StoragePolicy::fixed);
  params.multi_stop = ov.multi_stop.value_or(false);
  if (params.horizon_periods < 1) throw std::invalid_argument("horizon_periods must be >= 1");
  if (params.item_pick_seconds <= 0 || params.item_pick_seconds > params.delta_seconds) {
    throw std::invalid_argument("item_pick_seconds must be in (0, delta_seconds]");
  }
  if (params.pod_process_seconds <= 0 || params.pod_process_seconds > params.delta_seconds) {
    throw std::invalid_argument("pod_process_seconds must be in (0, delta_seconds]");
  }
  if (params.pod_speed_cells_per_second <= 0) {
    throw std::invalid_argument("pod_speed must be positive");
  }

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(cls) + 1);

  Instance inst;
  inst.params = params;
  Layout& lay = inst.layout;
  lay.width = grid_w;
  lay.height = grid_h;

  // Storage blocks on a sub-grid of anchors, workstations spread along the
  // south edge. Congestion is tracked at every corridor cell (robots travel
  // underneath the pod lattice), so each cell is an intersection.
  int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_loc) *
                                                  grid_w / std::max(1, grid_h))));
  cols = std::clamp(cols, 1, n_loc);
  int rows = (n_loc + cols - 1) / cols;
  for (int l = 0; l < n_loc; ++l) {
    int c = l % cols;
    int r = l / cols;
    int x = (grid_w - 1) * (c + 1) / (cols + 1);
    int y = grid_h <= 8 ? grid_h - 1 : (grid_h - 8) * (r + 1) / (rows + 1) + 7;
    lay.storage_locations.push_back({l, std::min(x, grid_w - 1), std::min(y, grid_h - 1)});
  }
  for (int w = 0; w < n_ws; ++w) {
    int x = (grid_w - 1) * (w + 1) / (n_ws + 1);
    lay.workstations.push_back({w, x, 0});
  }
  for (int y = 0; y < grid_h; ++y) {
    for (int x = 0; x < grid_w; ++x) {
      lay.intersections.push_back({y * grid_w + x, x, y});
    }
  }
  if (regime != CongestionRegime::none) {
    Rational q = regime == CongestionRegime::tight ? Rational(2) : Rational(4);
    for (const Site& s : lay.intersections) lay.intersection_capacity[s.id] = q;
  }

  inst.items.resize(n_items);
  std::iota(inst.items.begin(), inst.items.end(), 0);

  // Scatter each item over several pods, 1-3 units per placement.
  inst.pods.resize(n_pods);
  for (int p = 0; p < n_pods; ++p) {
    inst.pods[p].id = p;
    inst.pods[p].home_location = p % n_loc;
  }
  std::uniform_int_distribution<int> qty_dist(1, 3);
  std::uniform_int_distribution<int> ppi_dist(ppi_min, ppi_max);
  std::vector<int> pod_ids(n_pods);
  std::iota(pod_ids.begin(), pod_ids.end(), 0);
  for (int i = 0; i < n_items; ++i) {
    int copies = ppi_dist(rng);
    // partial Fisher-Yates to draw `copies` distinct pods
    for (int c = 0; c < copies; ++c) {
      std::uniform_int_distribution<int> pick(c, n_pods - 1);
      std::swap(pod_ids[c], pod_ids[pick(rng)]);
      inst.pods[pod_ids[c]].inventory[i] += qty_dist(rng);
    }
  }

  // Orders draw distinct items uniformly; the deterministic size multiset is
  // shuffled across order ids.
  std::vector<int> sizes = order_size_multiset(n_orders, std::min(max_order_size, n_items));
  std::shuffle(sizes.begin(), sizes.end(), rng);
  inst.orders.resize(n_orders);
  std::vector<int> item_ids(n_items);
  std::iota(item_ids.begin(), item_ids.end(), 0);
  for (int m = 0; m < n_orders; ++m) {
    inst.orders[m].id = m;
    int sz = sizes[m];
    for (int c = 0; c < sz; ++c) {
      std::uniform_int_distribution<int> pick(c, n_items - 1);
      std::swap(item_ids[c], item_ids[pick(rng)]);
      inst.orders[m].items.push_back(item_ids[c]);
    }
    std::sort(inst.orders[m].items.begin(), inst.orders[m].items.end());
  }

  return inst;
}

Instance figure2_instance() {
  Instance inst;
  inst.params.delta_seconds = 30;
  inst.params.horizon_periods = 7;
  inst.params.max_open_orders = 1;
  inst.params.item_pick_seconds = 5.0;
  inst.params.pod_process_seconds = 10.0;
  inst.params.pod_speed_cells_per_second = 1.0;

  Layout& lay = inst.layout;
  lay.width = 41;
  lay.height = 1;
  lay.workstations.push_back({0, 0, 0});
  // Region 1 sits two periods out; regions 2-4 one period out.
  lay.storage_locations.push_back({0, 40, 0});
  lay.storage_locations.push_back({1, 20, 0});
  lay.storage_locations.push_back({2, 24, 0});
  lay.storage_locations.push_back({3, 28, 0});
  for (int x = 0; x < lay.width; ++x) lay.intersections.push_back({x, x, 0});

  // Items 0-2 form the three-item order, 3-4 the two-item order, 5-6 are
  // unrequested inventory.
  inst.items = {0, 1, 2, 3, 4, 5, 6};
  inst.orders.push_back({0, {0, 1, 2}});
  inst.orders.push_back({1, {3, 4}});

  inst.pods.resize(4);
  inst.pods[0] = {0, 0, {{2, 1}, {4, 1}}};  // one item of each order, far region
  inst.pods[1] = {1, 1, {{3, 1}, {5, 1}}};
  inst.pods[2] = {2, 2, {{1, 2}}};          // one item of order 0, held twice
  inst.pods[3] = {3, 3, {{0, 1}, {6, 1}}};
  return inst;
}

std::vector<std::string> check_instance(const Instance& inst) {
  std::vector<std::string> problems;
  auto in_grid = [&](const Site& s) {
    return s.x >= 0 && s.x < inst.layout.width && s.y >= 0 && s.y < inst.layout.height;
  };
  std::set<int> ws_ids, loc_ids, ix_ids;
  for (const Site& s : inst.layout.workstations) {
    if (!in_grid(s)) problems.push_back("workstation " + std::to_string(s.id) + " off grid");
    if (!ws_ids.insert(s.id).second) problems.push_back("duplicate workstation id");
  }
  for (const Site& s : inst.layout.storage_locations) {
    if (!in_grid(s)) problems.push_back("storage location " + std::to_string(s.id) + " off grid");
    if (!loc_ids.insert(s.id).second) problems.push_back("duplicate storage location id");
  }
  for (const Site& s : inst.layout.intersections) {
    if (!in_grid(s)) problems.push_back("intersection " + std::to_string(s.id) + " off grid");
    if (!ix_ids.insert(s.id).second) problems.push_back("duplicate intersection id");
  }
  for (const auto& [id, cap] : inst.layout.intersection_capacity) {
    if (!ix_ids.count(id)) problems.push_back("capacity for unknown intersection");
    if (cap <= Rational(0)) problems.push_back("intersection_capacity must be positive");
  }
  // Stations and storage must touch the intersection lattice.
  auto near_intersection = [&](const Site& s) {
    for (const Site& j : inst.layout.intersections) {
      if (std::abs(j.x - s.x) + std::abs(j.y - s.y) <= 1) return true;
    }
    return false;
  };
  for (const Site& s : inst.layout.workstations) {
    if (!inst.layout.intersections.empty() && !near_intersection(s)) {
      problems.push_back("workstation " + std::to_string(s.id) + " not adjacent to lattice");
    }
  }
  for (const Site& s : inst.layout.storage_locations) {
    if (!inst.layout.intersections.empty() && !near_intersection(s)) {
      problems.push_back("storage location " + std::to_string(s.id) + " not adjacent to lattice");
    }
  }

  std::set<int> item_set(inst.items.begin(), inst.items.end());
  for (const Pod& p : inst.pods) {
    if (p.home_location < 0 || p.home_location >= static_cast<int>(inst.layout.storage_locations.size())) {
      problems.push_back("pod " + std::to_string(p.id) + " has unknown home location");
    }
    for (const auto& [item, qty] : p.inventory) {
      if (qty < 0) problems.push_back("pod " + std::to_string(p.id) + " negative inventory");
      if (!item_set.count(item)) problems.push_back("pod inventory references unknown item");
    }
  }
  for (const Order& m : inst.orders) {
    if (m.items.empty()) problems.push_back("order " + std::to_string(m.id) + " is empty");
    for (int item : m.items) {
      if (!item_set.count(item)) {
        problems.push_back("order " + std::to_string(m.id) + " references unknown item");
        continue;
      }
      bool covered = false;
      for (const Pod& p : inst.pods) {
        auto it = p.inventory.find(item);
        if (it != p.inventory.end() && it->second > 0) { covered = true; break; }
      }
      if (!covered) {
        problems.push_back("order " + std::to_string(m.id) + " item " + std::to_string(item) +
                           " stored on no pod");
      }
    }
  }
  return problems;
}

namespace {

json site_to_json(const Site& s) { return json{{"id", s.id}, {"x", s.x}, {"y", s.y}}; }

Site site_from_json(const json& j) {
  return Site{j.at("id").get<int>(), j.at("x").get<int>(), j.at("y").get<int>()};
}

}  // namespace

void save_instance(const Instance& inst, const std::string& path) {
  json j;
  json lay;
  lay["width"] = inst.layout.width;
  lay["height"] = inst.layout.height;
  lay["workstations"] = json::array();
  for (const Site& s : inst.layout.workstations) lay["workstations"].push_back(site_to_json(s));
  lay["storage_locations"] = json::array();
  for (const Site& s : inst.layout.storage_locations) {
    lay["storage_locations"].push_back(site_to_json(s));
  }
  lay["intersections"] = json::array();
  for (const Site& s : inst.layout.intersections) lay["intersections"].push_back(site_to_json(s));
  json caps = json::object();
  for (const auto& [id, cap] : inst.layout.intersection_capacity) {
    caps[std::to_string(id)] = cap.to_decimal_string();
  }
  lay["intersection_capacity"] = caps;
  j["layout"] = lay;

  j["pods"] = json::array();
  for (const Pod& p : inst.pods) {
    json inv = json::object();
    for (const auto& [item, qty] : p.inventory) inv[std::to_string(item)] = qty;
    j["pods"].push_back({{"id", p.id}, {"home_location", p.home_location}, {"inventory", inv}});
  }
  j["orders"] = json::array();
  for (const Order& m : inst.orders) j["orders"].push_back({{"id", m.id}, {"items", m.items}});
  j["items"] = inst.items;

  json prm;
  prm["delta_seconds"] = inst.params.delta_seconds;
  prm["horizon_periods"] = inst.params.horizon_periods;
  prm["max_open_orders"] = inst.params.max_open_orders;
  prm["item_pick_seconds"] = inst.params.item_pick_seconds;
  prm["pod_process_seconds"] = inst.params.pod_process_seconds;
  prm["pod_speed_cells_per_second"] = inst.params.pod_speed_cells_per_second;
  prm["storage_policy"] = inst.params.storage_policy == StoragePolicy::fixed ? "fixed" : "flexible";
  prm["storage_capacity"] = inst.params.storage_capacity;
  prm["multi_stop"] = inst.params.multi_stop;
  j["params"] = prm;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << j.dump(1) << "\n";
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read instance file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("instance parse error: " + std::string(e.what()));
  }
  for (const char* key : {"layout", "pods", "orders", "items", "params"}) {
    if (!j.contains(key)) {
      throw std::runtime_error(std::string("instance parse error: missing key \"") + key + "\"");
    }
  }
  Instance inst;
  const json& lay = j["layout"];
  inst.layout.width = lay.at("width").get<int>();
  inst.layout.height = lay.at("height").get<int>();
  for (const json& s : lay.at("workstations")) inst.layout.workstations.push_back(site_from_json(s));
  for (const json& s : lay.at("storage_locations")) {
    inst.layout.storage_locations.push_back(site_from_json(s));
  }
  for (const json& s : lay.at("intersections")) inst.layout.intersections.push_back(site_from_json(s));
  if (lay.contains("intersection_capacity")) {
    for (auto it = lay["intersection_capacity"].begin(); it != lay["intersection_capacity"].end();
         ++it) {
      inst.layout.intersection_capacity[std::stoi(it.key())] =
          Rational::from_string(it.value().get<std::string>());
    }
  }
  for (const json& pj : j["pods"]) {
    Pod p;
    p.id = pj.at("id").get<int>();
    p.home_location = pj.at("home_location").get<int>();
    for (auto it = pj.at("inventory").begin(); it != pj.at("inventory").end(); ++it) {
      int qty = it.value().get<int>();
      if (qty < 0) {
        throw std::runtime_error("instance validation error: negative inventory on pod " +
                                 std::to_string(p.id));
      }
      p.inventory[std::stoi(it.key())] = qty;
    }
    inst.pods.push_back(std::move(p));
  }
  for (const json& mj : j["orders"]) {
    Order m;
    m.id = mj.at("id").get<int>();
    for (const json& it : mj.at("items")) m.items.push_back(it.get<int>());
    inst.orders.push_back(std::move(m));
  }
  for (const json& it : j["items"]) inst.items.push_back(it.get<int>());

  const json& prm = j["params"];
  inst.params.delta_seconds = prm.at("delta_seconds").get<int>();
  inst.params.horizon_periods = prm.at("horizon_periods").get<int>();
  inst.params.max_open_orders = prm.at("max_open_orders").get<int>();
  inst.params.item_pick_seconds = prm.at("item_pick_seconds").get<double>();
  inst.params.pod_process_seconds = prm.at("pod_process_seconds").get<double>();
  inst.params.pod_speed_cells_per_second = prm.at("pod_speed_cells_per_second").get<double>();
  inst.params.storage_policy = prm.at("storage_policy").get<std::string>() == "flexible"
                                   ? StoragePolicy::flexible
                                   : StoragePolicy::fixed;
  inst.params.storage_capacity = prm.at("storage_capacity").get<int>();
  inst.params.multi_stop = prm.at("multi_stop").get<bool>();

  std::vector<std::string> problems = check_instance(inst);
  if (!problems.empty()) {
    throw std::runtime_error("instance validation error: " + problems.front());
  }
  return inst;
}

bool operator==(const Instance& a, const Instance& b) {
  auto site_eq = [](const Site& x, const Site& y) {
    return x.id == y.id && x.x == y.x && x.y == y.y;
  };
  if (a.layout.width != b.layout.width || a.layout.height != b.layout.height) return false;
  auto sites_eq = [&](const std::vector<Site>& x, const std::vector<Site>& y) {
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), site_eq);
  };
  if (!sites_eq(a.layout.workstations, b.layout.workstations)) return false;
  if (!sites_eq(a.layout.storage_locations, b.layout.storage_locations)) return false;
  if (!sites_eq(a.layout.intersections, b.layout.intersections)) return false;
  if (a.layout.intersection_capacity != b.layout.intersection_capacity) return false;
  if (a.pods.size() != b.pods.size() || a.orders.size() != b.orders.size()) return false;
  for (size_t i = 0; i < a.pods.size(); ++i) {
    if (a.pods[i].id != b.pods[i].id || a.pods[i].home_location != b.pods[i].home_location ||
        a.pods[i].inventory != b.pods[i].inventory) {
      return false;
    }
  }
  for (size_t i = 0; i < a.orders.size(); ++i) {
    if (a.orders[i].id != b.orders[i].id || a.orders[i].items != b.orders[i].items) return false;
  }
  if (a.items != b.items) return false;
  const InstanceParams& p = a.params;
  const InstanceParams& q = b.params;
  return p.delta_seconds == q.delta_seconds && p.horizon_periods == q.horizon_periods &&
         p.max_open_orders == q.max_open_orders && p.item_pick_seconds == q.item_pick_seconds &&
         p.pod_process_seconds == q.pod_process_seconds &&
         p.pod_speed_cells_per_second == q.pod_speed_cells_per_second &&
         p.storage_policy == q.storage_policy && p.storage_capacity == q.storage_capacity &&
         p.multi_stop == q.multi_stop;
}

}  // namespace tdscw
