#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>

#include "tdscw/instance.hpp"

using namespace tdscw;

TEST_CASE("small class matches published entity counts") {
  Instance inst = generate_instance(InstanceClass::small, 1);
  CHECK(inst.layout.workstations.size() == 2);
  CHECK(inst.layout.storage_locations.size() == 14);
  CHECK(inst.pods.size() == 336);
  CHECK(inst.orders.size() == 100);
  CHECK(inst.items.size() == 1000);
  CHECK(inst.params.horizon_periods == 30);
  CHECK(check_instance(inst).empty());
}

TEST_CASE("full class scales tenfold on stations and locations") {
  // counts only; no heavy structures are built here
  Instance small = generate_instance(InstanceClass::small, 3, [] {
    GenOverrides o;
    o.items = 50;
    o.pods = 40;
    o.orders = 10;
    o.pods_per_item_min = 2;
    o.pods_per_item_max = 4;
    return o;
  }());
  CHECK(small.layout.workstations.size() * 10 == 20);
  CHECK(small.layout.storage_locations.size() * 10 == 140);
}

TEST_CASE("generator is deterministic") {
  Instance a = generate_instance(InstanceClass::small, 42);
  Instance b = generate_instance(InstanceClass::small, 42);
  CHECK(a == b);
  Instance c = generate_instance(InstanceClass::small, 43);
  CHECK_FALSE(a == c);
}

TEST_CASE("every ordered item is stored somewhere") {
  Instance inst = generate_instance(InstanceClass::small, 7);
  for (const Order& m : inst.orders) {
    for (int item : m.items) {
      CHECK_FALSE(inst.pods_with_item(item).empty());
    }
  }
}

TEST_CASE("zero-order override yields a valid empty-demand instance") {
  GenOverrides o;
  o.orders = 0;
  Instance inst = generate_instance(InstanceClass::small, 1, o);
  CHECK(inst.orders.empty());
  CHECK(check_instance(inst).empty());
}

TEST_CASE("bad override values raise parameter errors") {
  GenOverrides o;
  o.item_pick_seconds = 45.0;  // exceeds the 30 s period
  CHECK_THROWS_AS(generate_instance(InstanceClass::small, 1, o), std::invalid_argument);
  GenOverrides o2;
  o2.horizon_periods = 0;
  CHECK_THROWS_AS(generate_instance(InstanceClass::small, 1, o2), std::invalid_argument);
  CHECK_THROWS_AS(GenOverrides::from_strings({"nonsense=1"}), std::invalid_argument);
}

TEST_CASE("save and load round trip") {
  GenOverrides o;
  o.items = 60;
  o.pods = 24;
  o.orders = 8;
  o.storage_locations = 4;
  o.grid_width = 24;
  o.grid_height = 12;
  o.pods_per_item_min = 2;
  o.pods_per_item_max = 4;
  Instance inst = generate_instance(InstanceClass::small, 5, o);
  std::string path = "/tmp/tdscw_test_instance.json";
  save_instance(inst, path);
  Instance back = load_instance(path);
  CHECK(inst == back);
  std::remove(path.c_str());
}

TEST_CASE("missing top-level key is reported by name") {
  std::string path = "/tmp/tdscw_test_broken.json";
  {
    std::ofstream out(path);
    out << R"({"layout": {"width": 1, "height": 1, "workstations": [],
               "storage_locations": [], "intersections": []},
               "orders": [], "items": [], "params": {}})";
  }
  try {
    load_instance(path);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("pods") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("negative inventory is rejected on load") {
  Instance inst = figure2_instance();
  std::string path = "/tmp/tdscw_test_neg.json";
  save_instance(inst, path);
  // splice a negative quantity into the JSON
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  auto pos = text.find("\"2\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 6, "\"2\": -1");
  {
    std::ofstream out(path);
    out << text;
  }
  CHECK_THROWS_AS(load_instance(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("figure-2 toy matches the drawn instance") {
  Instance f = figure2_instance();
  CHECK(f.layout.workstations.size() == 1);
  CHECK(f.pods.size() == 4);
  CHECK(f.orders.size() == 2);
  CHECK(f.orders[0].items.size() == 3);
  CHECK(f.orders[1].items.size() == 2);
  int requested = 0;
  for (const Order& m : f.orders) requested += static_cast<int>(m.items.size());
  CHECK(requested == 5);
  CHECK(f.params.max_open_orders == 1);
  // pod 2 holds one item of the first order, twice
  CHECK(f.pods[2].inventory.at(1) == 2);
  // pod 0 holds one item of each order
  CHECK(f.pods[0].inventory.count(2) == 1);
  CHECK(f.pods[0].inventory.count(4) == 1);
  CHECK(check_instance(f).empty());
}

TEST_CASE("order sizes skew toward single items") {
  Instance inst = generate_instance(InstanceClass::small, 11);
  int singles = 0;
  for (const Order& m : inst.orders) singles += m.items.size() == 1 ? 1 : 0;
  CHECK(singles >= 45);
  CHECK(singles <= 60);
}
