#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "tdscw/milp.hpp"

using namespace tdscw::milp;

namespace {

// Random binary program: mixed <= / >= / = rows with small integer data.
MilpModel random_binary_model(std::mt19937_64& rng, int nvars, int nrows) {
  MilpModel m;
  m.sense = rng() % 2 == 0 ? ObjSense::maximize : ObjSense::minimize;
  std::uniform_int_distribution<int> obj_dist(-6, 9);
  for (int j = 0; j < nvars; ++j) {
    m.add_binary("x" + std::to_string(j), obj_dist(rng));
  }
  std::uniform_int_distribution<int> coef_dist(-4, 6);
  std::uniform_int_distribution<int> len_dist(2, std::max(2, nvars / 2));
  for (int r = 0; r < nrows; ++r) {
    int len = len_dist(rng);
    std::vector<std::pair<int, double>> terms;
    std::vector<int> used;
    for (int k = 0; k < len; ++k) {
      int j = static_cast<int>(rng() % nvars);
      terms.push_back({j, static_cast<double>(coef_dist(rng))});
    }
    double pos = 0;
    for (auto& [j, c] : terms) pos += std::max(0.0, c);
    RowSense sense = RowSense::le;
    double rhs = 0;
    switch (rng() % 4) {
      case 0:
      case 1:
        sense = RowSense::le;
        rhs = static_cast<double>(rng() % std::max(1, static_cast<int>(pos) + 1));
        break;
      case 2:
        sense = RowSense::ge;
        rhs = static_cast<double>(rng() % 3);
        break;
      case 3:
        sense = RowSense::eq;
        rhs = static_cast<double>(rng() % 2 + 1);
        break;
    }
    m.add_row(std::move(terms), sense, rhs);
  }
  return m;
}

}  // namespace

TEST_CASE("two binaries, one packing row") {
  MilpModel m;
  m.sense = ObjSense::maximize;
  int x1 = m.add_binary("x1", 1.0);
  int x2 = m.add_binary("x2", 1.0);
  m.add_row({{x1, 1.0}, {x2, 1.0}}, RowSense::le, 1.0);
  MilpSolution sol = solve(m);
  CHECK(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.bound == doctest::Approx(1.0));
}

TEST_CASE("contradictory row is infeasible with a note") {
  MilpModel m;
  int x = m.add_binary("x", 1.0);
  m.add_row({{x, 0.0}}, RowSense::ge, 1.0);
  MilpSolution sol = solve(m);
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK_FALSE(sol.infeasibility_note.empty());
}

TEST_CASE("knapsack agrees with the exhaustive oracle") {
  std::mt19937_64 rng(4242);
  MilpModel m;
  m.sense = ObjSense::maximize;
  std::vector<std::pair<int, double>> weights;
  for (int j = 0; j < 15; ++j) {
    int id = m.add_binary("x" + std::to_string(j), static_cast<double>(1 + rng() % 20));
    weights.push_back({id, static_cast<double>(1 + rng() % 12)});
  }
  m.add_row(weights, RowSense::le, 30.0);
  MilpSolution bb = solve(m);
  MilpSolution bf = brute_force(m);
  CHECK(bb.status == SolveStatus::optimal);
  CHECK(bf.status == SolveStatus::optimal);
  CHECK(bb.objective == doctest::Approx(bf.objective).epsilon(1e-9));
}

TEST_CASE("solver matches brute force across random binary programs") {
  std::mt19937_64 rng(20240917);
  for (int t = 0; t < 60; ++t) {
    int nvars = 4 + static_cast<int>(rng() % 14);
    int nrows = 2 + static_cast<int>(rng() % 8);
    MilpModel m = random_binary_model(rng, nvars, nrows);
    MilpSolution bf = brute_force(m);
    MilpSolution bb = solve(m);
    if (bf.status == SolveStatus::infeasible) {
      CHECK(bb.status == SolveStatus::infeasible);
    } else {
      REQUIRE(bb.status == SolveStatus::optimal);
      CHECK(std::abs(bb.objective - bf.objective) <= 1e-6);
      // returned point must satisfy the model
      CHECK(m.first_violated_row(bb.values) < 0);
    }
  }
}

TEST_CASE("brute force capacity and trivial cases") {
  MilpModel m;
  for (int j = 0; j < 3; ++j) m.add_binary("x" + std::to_string(j), 1.0);
  MilpSolution sol = brute_force(m);
  CHECK(sol.objective == doctest::Approx(3.0));

  MilpModel zeros;
  for (int j = 0; j < 4; ++j) zeros.add_binary("z" + std::to_string(j), 0.0);
  zeros.add_row({{0, 1.0}, {1, 1.0}}, RowSense::le, 1.0);
  MilpSolution zsol = brute_force(zeros);
  CHECK(zsol.status == SolveStatus::optimal);
  CHECK(zsol.objective == doctest::Approx(0.0));

  MilpModel big;
  for (int j = 0; j < 26; ++j) big.add_binary("b" + std::to_string(j), 1.0);
  CHECK_THROWS_AS(brute_force(big), std::invalid_argument);
}

TEST_CASE("warm start never hurts") {
  std::mt19937_64 rng(555);
  for (int t = 0; t < 20; ++t) {
    MilpModel m = random_binary_model(rng, 12, 6);
    MilpSolution plain = solve(m);
    if (plain.status != SolveStatus::optimal) continue;
    SolveOptions opt;
    opt.warm_start = plain.values;
    MilpSolution warm = solve(m, opt);
    REQUIRE(warm.status == SolveStatus::optimal);
    if (m.sense == ObjSense::maximize) {
      CHECK(warm.objective >= plain.objective - 1e-9);
    } else {
      CHECK(warm.objective <= plain.objective + 1e-9);
    }
  }
}

TEST_CASE("repeat solves are deterministic") {
  std::mt19937_64 rng(777);
  MilpModel m = random_binary_model(rng, 16, 7);
  MilpSolution a = solve(m);
  MilpSolution b = solve(m);
  CHECK(a.status == b.status);
  if (a.status == SolveStatus::optimal) {
    CHECK(a.objective == b.objective);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("dual bound dominates the objective for maximization") {
  std::mt19937_64 rng(31337);
  for (int t = 0; t < 10; ++t) {
    MilpModel m = random_binary_model(rng, 14, 5);
    m.sense = ObjSense::maximize;
    MilpSolution sol = solve(m);
    if (sol.status == SolveStatus::optimal || sol.status == SolveStatus::feasible) {
      CHECK(sol.bound >= sol.objective - 1e-9);
    }
  }
}

TEST_CASE("mixed continuous variables solve through the LP") {
  MilpModel m;
  m.sense = ObjSense::maximize;
  int x = m.add_binary("x", 2.0);
  int y = m.add_continuous("y", 0.0, 10.0, 1.0);
  m.add_row({{x, 6.0}, {y, 1.0}}, RowSense::le, 9.0);
  MilpSolution sol = solve(m);
  REQUIRE(sol.status == SolveStatus::optimal);
  // x=1, y=3 gives 5; x=0, y=9 gives 9
  CHECK(sol.objective == doctest::Approx(9.0));
}

TEST_CASE("lp relaxation bounds the integer optimum") {
  MilpModel m;
  m.sense = ObjSense::maximize;
  for (int j = 0; j < 3; ++j) m.add_binary("x" + std::to_string(j), 2.0);
  m.add_row({{0, 1.0}, {1, 1.0}, {2, 1.0}}, RowSense::le, 1.5);
  MilpSolution lp = solve_relaxation(m);
  MilpSolution ip = solve(m);
  REQUIRE(lp.status == SolveStatus::optimal);
  REQUIRE(ip.status == SolveStatus::optimal);
  CHECK(lp.objective >= ip.objective - 1e-9);
  CHECK(lp.objective == doctest::Approx(3.0));
  CHECK(ip.objective == doctest::Approx(2.0));
}

TEST_CASE("lp export and reference parse round trip") {
  std::mt19937_64 rng(808);
  MilpModel m = random_binary_model(rng, 9, 5);
  std::string path = "/tmp/tdscw_test_model.lp";
  export_lp(m, path);
  MilpModel back = parse_lp(path);
  REQUIRE(back.num_vars() == m.num_vars());
  REQUIRE(back.num_rows() == m.num_rows());
  CHECK(back.sense == m.sense);
  for (int j = 0; j < m.num_vars(); ++j) {
    CHECK(back.var_names[j] == m.var_names[j]);
    CHECK(back.objective[j] == doctest::Approx(m.objective[j]));
    CHECK(back.lower[j] == doctest::Approx(m.lower[j]));
    CHECK(back.upper[j] == doctest::Approx(m.upper[j]));
    CHECK((back.var_kind[j] == m.var_kind[j]));
  }
  for (int r = 0; r < m.num_rows(); ++r) {
    CHECK((back.row_sense[r] == m.row_sense[r]));
    CHECK(back.rhs[r] == doctest::Approx(m.rhs[r]));
    REQUIRE(back.row_start[r + 1] - back.row_start[r] == m.row_start[r + 1] - m.row_start[r]);
    for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
      CHECK(back.col[k] == m.col[k]);
      CHECK(back.coef[k] == doctest::Approx(m.coef[k]));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("empty model exports a valid file") {
  MilpModel m;
  m.add_binary("x0", 1.0);
  std::string path = "/tmp/tdscw_test_empty.lp";
  export_lp(m, path);
  MilpModel back = parse_lp(path);
  CHECK(back.num_rows() == 0);
  CHECK(back.num_vars() == 1);
  std::remove(path.c_str());
}
