#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "isinglab/exact.hpp"
#include "isinglab/nearest_neighbor.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/stats.hpp"

using namespace isinglab;

namespace {

InteractionMap nn_map(double j, int L) {
  InteractionMap J{Lattice(L)};
  for (int i = -L; i < L; ++i) J.add({i, i + 1}, j);
  return J;
}

// All sorted site multisets of the given size over [-L, L].
void for_each_multiset(int L, int size, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> tuple(static_cast<std::size_t>(size), -L);
  while (true) {
    fn(tuple);
    int k = size - 1;
    while (k >= 0 && tuple[static_cast<std::size_t>(k)] == L) --k;
    if (k < 0) return;
    const int v = ++tuple[static_cast<std::size_t>(k)];
    for (int m = k + 1; m < size; ++m) tuple[static_cast<std::size_t>(m)] = v;
  }
}

}  // namespace

TEST_CASE("energy matches the defining sum") {
  // all spins up with nearest-neighbor coupling: E = -2 L j
  const auto up = SpinConfiguration::all_up(Lattice(2));
  REQUIRE(energy(up, nn_map(1.5, 2)) == Catch::Approx(-2 * 2 * 1.5));

  // empty interaction: E = 0
  REQUIRE(energy(up, InteractionMap{Lattice(2)}) == 0.0);

  // (+1, -1, +1) with j = 1: two sign changes, E = 2 j (n_sigma - L) = 2
  const SpinConfiguration alt(Lattice(1), {1, -1, 1});
  REQUIRE(energy(alt, nn_map(1.0, 1)) == Catch::Approx(2.0));

  // subset outside the configuration lattice is a domain error
  InteractionMap wide{Lattice(3)};
  wide.add({2, 3}, 1.0);
  REQUIRE_THROWS_AS(energy(alt, wide), std::invalid_argument);
}

TEST_CASE("partition function by enumeration") {
  // J = 0, L = 1: 2^3 configurations of weight 1
  REQUIRE(partition_exact(InteractionMap{Lattice(1)}, 1) == Catch::Approx(8.0).epsilon(1e-13));

  // j = 0 closed form: 2^{2L+1}
  REQUIRE(partition_exact(nn_map(0.0, 2), 2) == Catch::Approx(32.0).epsilon(1e-13));

  // j = 1, L = 1: 2 (e + 1/e)^2 = 19.0487827643345258...
  REQUIRE(partition_exact(nn_map(1.0, 1), 1) ==
          Catch::Approx(19.0487827643345258).epsilon(1e-13));

  // capacity gate
  REQUIRE_THROWS_AS(partition_exact(InteractionMap{Lattice(13)}, 13), capacity_error);
  REQUIRE_NOTHROW(partition_exact(InteractionMap{Lattice(13)}, 13, 27));
}

TEST_CASE("expectation values by enumeration") {
  // empty A
  REQUIRE(expectation_exact(nn_map(0.7, 2), 2, {}) == Catch::Approx(1.0));

  // uncoupled spin vanishes: no coupling touches site 2
  InteractionMap J{Lattice(2)};
  J.add({-1, 0}, 0.8);
  REQUIRE(expectation_exact(J, 2, {2}) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(expectation_exact(J, 2, {0, 2}) == Catch::Approx(0.0).margin(1e-14));

  // L = 0 single free spin
  REQUIRE(expectation_exact(InteractionMap{Lattice(0)}, 0, {0}) ==
          Catch::Approx(0.0).margin(1e-14));

  // nearest-neighbor two-point: tanh(j)
  REQUIRE(expectation_exact(nn_map(0.5, 2), 2, {0, 1}) ==
          Catch::Approx(0.4621171572600098).epsilon(1e-13));
}

TEST_CASE("closed nearest-neighbor forms") {
  REQUIRE(nn_partition_closed(0.0, 3) == Catch::Approx(128.0));
  REQUIRE(nn_partition_closed(1.0, 1) == Catch::Approx(19.0487827643345258).epsilon(1e-14));

  REQUIRE(nn_correlation_closed(1.3, {0}) == 0.0);  // odd count
  REQUIRE(nn_correlation_closed(1.3, {3, 3}) == 1.0);
  REQUIRE(nn_correlation_closed(0.5, {0, 2}) ==
          Catch::Approx(0.2135522670340726).epsilon(1e-13));
  REQUIRE_THROWS_AS(nn_correlation_closed(0.5, {2, 0}), std::invalid_argument);

  // log form survives couplings that would overflow exp
  REQUIRE(std::isfinite(nn_log_partition_closed(400.0, 1000)));
}

TEST_CASE("enumeration equals the closed forms on small chains") {
  for (int L = 0; L <= 3; ++L) {
    for (double j : {0.0, 0.3, 1.0, 2.0}) {
      const auto J = nn_map(j, L);
      REQUIRE(partition_exact(J, L) ==
              Catch::Approx(nn_partition_closed(j, L)).epsilon(1e-12));
      for (int size = 1; size <= 4; ++size) {
        for_each_multiset(L, size, [&](const std::vector<int>& tuple) {
          const double closed = nn_correlation_closed(j, tuple);
          const double exact = expectation_exact(J, L, tuple);
          REQUIRE(exact == Catch::Approx(closed).margin(1e-12));
        });
      }
    }
  }
}

TEST_CASE("pair correlation matrix agrees with per-subset enumeration") {
  const auto w = PairCoupling({0.8, 0.2});
  const auto J = pair_interaction(w, 2);
  const auto mat = pair_correlations_exact(J, 2);
  const int n = 5;
  for (int a = 0; a < n; ++a) {
    REQUIRE(mat[static_cast<std::size_t>(a) * n + a] == 1.0);
    for (int b = a + 1; b < n; ++b) {
      const double direct = expectation_exact(J, 2, {a - 2, b - 2});
      REQUIRE(mat[static_cast<std::size_t>(a) * n + b] == Catch::Approx(direct).margin(1e-13));
    }
  }
}

TEST_CASE("exact sampler reproduces closed-form moments") {
  // flip probability: 1/(1+e^{2j}), frozen limit checks
  REQUIRE(nn_bond_flip_probability(0.0) == Catch::Approx(0.5));
  REQUIRE(nn_bond_flip_probability(50.0) == Catch::Approx(0.0).margin(1e-40));

  // j_delta substitution: e^{2 j_delta} = 1/delta gives delta/(1+delta)
  const double delta = 0.02;
  const double j_delta = -0.5 * std::log(delta);
  REQUIRE(nn_bond_flip_probability(j_delta) ==
          Catch::Approx(delta / (1.0 + delta)).epsilon(1e-12));

  auto rng = CounterRng::stream(2024, 0);
  RunningMoments two, four;
  const double j = 1.0;
  for (int k = 0; k < 100000; ++k) {
    const auto cfg = sample_nn_chain(j, 3, rng);
    two.add(cfg.spin(0) * cfg.spin(3));
    four.add(cfg.spin(-2) * cfg.spin(-1) * cfg.spin(1) * cfg.spin(3));
  }
  const double ref2 = nn_correlation_closed(j, {0, 3});  // tanh(1)^3
  REQUIRE(ref2 == Catch::Approx(0.4417441517311526).epsilon(1e-13));
  REQUIRE(std::abs(two.mean - ref2) < 4.0 * two.std_error());

  const double ref4 = nn_correlation_closed(j, {-2, -1, 1, 3});
  REQUIRE(std::abs(four.mean - ref4) < 4.0 * four.std_error());
}
