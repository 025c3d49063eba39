#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "isinglab/inequalities.hpp"

using namespace isinglab;

namespace {

InteractionMap nn_map(double j, int L) {
  InteractionMap J{Lattice(L)};
  for (int i = -L; i < L; ++i) J.add({i, i + 1}, j);
  return J;
}

}  // namespace

TEST_CASE("first inequality: expectations are nonnegative") {
  const auto J = nn_map(1.0, 2);
  const std::vector<int> A = {0, 1};
  const std::vector<int> B = {0, 2};
  const auto r = check_gks(J, 2, A, B, GksVariant::Griffiths1);
  REQUIRE(r.lhs == 0.0);
  REQUIRE(r.passed);
}

TEST_CASE("second inequality with A = B is the trivial variance bound") {
  const auto J = nn_map(0.8, 2);
  const std::vector<int> A = {-1, 1};
  const auto r = check_gks(J, 2, A, A, GksVariant::Griffiths2);
  // sigma_{AB} = sigma_empty = 1, so slack = 1 - <sigma_A>^2 >= 0
  REQUIRE(r.rhs == Catch::Approx(1.0));
  REQUIRE(r.passed);
  REQUIRE(r.slack >= 0.0);
}

TEST_CASE("third inequality on the spec instance") {
  const auto J = nn_map(1.0, 2);
  const std::vector<int> A = {0, 1};
  const std::vector<int> B = {0, 2};
  const auto r = check_gks(J, 2, A, B, GksVariant::Griffiths3, 1e-12);
  REQUIRE(r.passed);
  REQUIRE(r.slack >= 0.0);
}

TEST_CASE("all five variants hold on a coupled instance") {
  InteractionMap J{Lattice(2)};
  J.add({-2, -1}, 0.4);
  J.add({-1, 0}, 1.1);
  J.add({0, 1}, 0.7);
  J.add({1, 2}, 0.2);
  J.add({-1, 1}, 0.3);
  J.add({-2, 0, 1, 2}, 0.05);  // a genuine many-body coupling
  const std::vector<int> A = {-2, 0};
  const std::vector<int> B = {-1, 1};
  for (auto v : {GksVariant::Griffiths1, GksVariant::Griffiths2, GksVariant::Griffiths3,
                 GksVariant::CutMonotone, GksVariant::Thompson}) {
    const auto r = check_gks(J, 2, A, B, v);
    INFO(r.name << " slack=" << r.slack);
    REQUIRE(r.passed);
  }
}

TEST_CASE("uncoupled spins vanish") {
  // single free spin
  const auto free1 = check_uncoupled_zero(InteractionMap{Lattice(0)}, 0, 0, std::vector<int>{0});
  REQUIRE(free1.passed);

  // J = 0, odd-size B
  const auto free3 =
      check_uncoupled_zero(InteractionMap{Lattice(2)}, 2, 1, std::vector<int>{-1, 0, 1});
  REQUIRE(free3.passed);

  // nearest-neighbor coupling on sites >= 1 only; B = {-1, 0}
  InteractionMap J{Lattice(2)};
  J.add({1, 2}, 0.9);
  const auto r = check_uncoupled_zero(J, 2, 0, std::vector<int>{-1, 0});
  REQUIRE(r.passed);

  // unverifiable precondition is a domain error
  REQUIRE_THROWS_AS(check_uncoupled_zero(J, 2, 1, std::vector<int>{1}), std::invalid_argument);
}

TEST_CASE("recursive bound: trivial and equality cases") {
  // w = 0: both sides vanish
  const auto zero = lemma36_check(PairCoupling{}, 3, -1, 2);
  REQUIRE(zero.lhs == 0.0);
  REQUIRE(zero.rhs == 0.0);
  REQUIRE(zero.passed);

  // pure nearest neighbor: tanh(j)^{|i-j|} telescopes, equality both ways
  for (auto [i, j] : std::vector<std::pair<int, int>>{{-2, 2}, {2, -2}, {0, 1}}) {
    const auto r = lemma36_check(PairCoupling({1.1}), 4, i, j);
    REQUIRE(r.passed);
    REQUIRE(r.slack == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("recursive bound on the long-range spec instance") {
  const auto r = lemma36_check(PairCoupling({1.0, 0.05, 0.02}), 6, -2, 1);
  REQUIRE(r.passed);
  REQUIRE(r.slack >= 0.0);
}

TEST_CASE("susceptibility-sum bound") {
  // w = 0: lhs = 1 (only the i = 0 term), rhs = 2/(1 - 10 D eps) > 1
  const auto zero = corbound_check({PairCoupling{}, 0.05, 1.01, 8, 8});
  REQUIRE(zero.status == "ok");
  REQUIRE(zero.lhs == Catch::Approx(1.0));
  REQUIRE(zero.rhs == Catch::Approx(4.0404040404040403).epsilon(1e-12));
  REQUIRE(zero.passed);

  // w1 = 0, w2 = 0.05 with eps = 0.06: hypothesis holds since tanh(0.05) <= 0.06
  const auto small = corbound_check({PairCoupling({0.0, 0.05}), 0.06, 1.01, 8, 8});
  REQUIRE(small.status == "ok");
  REQUIRE(small.passed);

  // hypothesis violated is reported as such, not failed
  const auto bad = corbound_check({PairCoupling({0.1, 1.0}), 0.05, 1.01, 8, 8});
  REQUIRE(bad.status == "hypothesis_violated");
  REQUIRE(bad.passed);

  REQUIRE_THROWS_AS(corbound_check({PairCoupling{}, 0.2, 1.01, 4, 8}), std::invalid_argument);
  REQUIRE_THROWS_AS(corbound_check({PairCoupling{}, 0.05, 0.99, 4, 8}), std::invalid_argument);
}

TEST_CASE("randomized suites pass at tight tolerance") {
  long long gks_failures = 0;
  for (const auto& r : run_gks_suite(1000, 3, 7001, 1e-12)) {
    if (!r.passed) {
      ++gks_failures;
      UNSCOPED_INFO(r.name << " " << r.instance << " slack=" << r.slack);
    }
  }
  REQUIRE(gks_failures == 0);

  long long l36_failures = 0;
  for (const auto& r : run_lemma36_suite(200, 6, 7002, 1e-10)) {
    if (!r.passed) {
      ++l36_failures;
      UNSCOPED_INFO(r.instance << " slack=" << r.slack);
    }
  }
  REQUIRE(l36_failures == 0);

  for (const auto& r : run_monotonicity_suite(100, 4, 7003, 1e-12)) {
    INFO(r.instance << " slack=" << r.slack);
    REQUIRE(r.passed);
  }
}

TEST_CASE("default grid of the susceptibility-sum bound passes") {
  for (const auto& cfg : default_corbound_grid()) {
    const auto r = corbound_check(cfg);
    INFO(r.instance << " lhs=" << r.lhs << " rhs=" << r.rhs);
    REQUIRE(r.status == "ok");
    REQUIRE(r.passed);
  }
}
