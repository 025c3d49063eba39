#include <catch2/catch_amalgamated.hpp>

#include "isinglab/lattice.hpp"

using namespace isinglab;

TEST_CASE("lattice indexing") {
  Lattice lat(3);
  REQUIRE(lat.site_count() == 7);
  REQUIRE(lat.index(-3) == 0);
  REQUIRE(lat.index(3) == 6);
  REQUIRE(lat.contains(0));
  REQUIRE_FALSE(lat.contains(4));
  REQUIRE_THROWS_AS(Lattice(-1), std::invalid_argument);

  Lattice single(0);  // L = 0 single-spin lattice is legal
  REQUIRE(single.site_count() == 1);
}

TEST_CASE("spin configurations") {
  auto cfg = SpinConfiguration::from_mask(Lattice(1), 0b101u);
  REQUIRE(cfg.spin(-1) == 1);
  REQUIRE(cfg.spin(0) == -1);
  REQUIRE(cfg.spin(1) == 1);
  REQUIRE(cfg.product(std::vector<int>{}) == 1.0);  // sigma of the empty set
  REQUIRE(cfg.product(std::vector<int>{-1, 0}) == -1.0);

  REQUIRE_THROWS_AS(SpinConfiguration(Lattice(1), {1, 0, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(SpinConfiguration(Lattice(1), {1, 1}), std::invalid_argument);
}

TEST_CASE("interaction maps reject bad input") {
  InteractionMap J{Lattice(2)};
  REQUIRE_THROWS_AS(J.add({0, 1}, -0.5), std::invalid_argument);  // ferromagnetic only
  REQUIRE_THROWS_AS(J.add({0, 3}, 0.5), std::invalid_argument);   // outside lattice
  J.add({0, 1}, 0.5);
  J.add({-1, 1}, 0.25);
  REQUIRE(J.strength_of(std::vector<int>{0, 1}) == 0.5);
  REQUIRE(J.strength_of(std::vector<int>{-2, 2}) == 0.0);

  const auto cut = J.truncated({0, 1});
  REQUIRE(cut.strength_of(std::vector<int>{0, 1}) == 0.0);
  REQUIRE(cut.strength_of(std::vector<int>{-1, 1}) == 0.25);

  REQUIRE(J.site_uncoupled(-2));
  REQUIRE_FALSE(J.site_uncoupled(0));
}

TEST_CASE("pair couplings") {
  REQUIRE_THROWS_AS(PairCoupling({0.5, -1.0}), std::invalid_argument);

  PairCoupling w({1.0, 0.5});
  REQUIRE(w.range() == 2);
  REQUIRE(w.w(1) == 1.0);
  REQUIRE(w.w(3) == 0.0);
  REQUIRE(w.tau(1) == Catch::Approx(std::tanh(1.0)));
  REQUIRE(w.tail_tau_sum() == Catch::Approx(std::tanh(0.5)));

  PairCoupling padded({1.0, 0.0, 0.0});  // trailing zeros are not support
  REQUIRE(padded.range() == 1);
}

TEST_CASE("pair interaction lays out bonds") {
  // w1 = 1 on Lambda_1: exactly the two nearest-neighbor bonds
  const auto J1 = pair_interaction(PairCoupling({1.0}), 1);
  REQUIRE(J1.couplings().size() == 2);
  REQUIRE(J1.strength_of(std::vector<int>{-1, 0}) == 1.0);
  REQUIRE(J1.strength_of(std::vector<int>{0, 1}) == 1.0);
  REQUIRE(J1.strength_of(std::vector<int>{-1, 1}) == 0.0);

  // w = (1, 0.5): the distance-2 bond appears too
  const auto J2 = pair_interaction(PairCoupling({1.0, 0.5}), 1);
  REQUIRE(J2.couplings().size() == 3);
  REQUIRE(J2.strength_of(std::vector<int>{-1, 1}) == 0.5);

  // w = 0: empty coupling set
  REQUIRE(pair_interaction(PairCoupling{}, 2).couplings().empty());
}
