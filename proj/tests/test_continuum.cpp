#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isinglab/continuum.hpp"
#include "isinglab/jump_process.hpp"

using namespace isinglab;

TEST_CASE("lattice index map") {
  REQUIRE(lattice_index(0.0, 0.3) == 0);
  REQUIRE(lattice_index(0.26, 0.1) == 3);
  REQUIRE(lattice_index(-0.26, 0.1) == -3);
  REQUIRE_THROWS_AS(lattice_index(1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(lattice_index(1.0, 1.5), std::invalid_argument);

  // sandwich: | |i(u) - i(v)| - |u-v|/delta | <= 1
  auto rng = CounterRng::stream(21, 0);
  for (int k = 0; k < 2000; ++k) {
    const double delta = rng.uniform(0.01, 0.9);
    const double u = rng.uniform(-5.0, 5.0), v = rng.uniform(-5.0, 5.0);
    const double gap = std::abs(static_cast<double>(lattice_index(u, delta) - lattice_index(v, delta)));
    REQUIRE(gap >= std::abs(u - v) / delta - 1.0 - 1e-9);
    REQUIRE(gap <= std::abs(u - v) / delta + 1.0 + 1e-9);
  }
}

TEST_CASE("scaling parameters") {
  const ScalingParams p(0.1, 1.0);
  REQUIRE(p.j_delta() == Catch::Approx(-0.5 * std::log(0.1)).epsilon(1e-15));
  REQUIRE(p.L_delta() == 10);
  REQUIRE(p.site_count() == 21);

  // algebraic identities of j_delta
  for (double d : {0.5, 0.1, 0.01, 0.001}) {
    const ScalingParams q(d, 1.0);
    REQUIRE(q.tanh_j_delta() == Catch::Approx(std::tanh(q.j_delta())).epsilon(1e-12));
    const double inv = 1.0 / (1.0 - q.tanh_j_delta());
    REQUIRE(inv == Catch::Approx((1.0 + d) / (2.0 * d)).epsilon(1e-12));
    REQUIRE(inv < 1.0 / d);
    REQUIRE(q.flip_probability() ==
            Catch::Approx(nn_bond_flip_probability(q.j_delta())).epsilon(1e-12));
  }

  REQUIRE_THROWS_AS(ScalingParams(1.2, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(ScalingParams(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("scaled pair couplings") {
  REQUIRE(scaled_pair_coupling(Kernel::zero(), 0.1).w.empty());

  const auto sc = scaled_pair_coupling(Kernel::exponential(1.0, 1.0), 0.1);
  REQUIRE(sc.w.w(10) == Catch::Approx(0.0036787944117144233).epsilon(1e-13));
  REQUIRE(sc.truncated_at > 0);

  // Riemann sum: (1/delta) sum_k w_k -> ||W||_1 / 2
  const double delta = 1e-3;
  const auto fine = scaled_pair_coupling(Kernel::exponential(1.0, 1.0), delta);
  double sum = 0.0;
  for (int k = 1; k <= fine.w.range(); ++k) sum += fine.w.w(k);
  REQUIRE(sum / delta == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("nearest-neighbor moments at spacing delta") {
  const ScalingParams p(0.01, 2.0);
  REQUIRE(discrete_moment_nn(p, {0.4, 0.4}) == 1.0);
  REQUIRE(discrete_moment_nn(p, {0.0, 0.3, 0.7}) == 0.0);  // odd
  REQUIRE_THROWS_AS(discrete_moment_nn(p, {0.5, 0.0}), std::invalid_argument);

  // frozen: ((1-d)/(1+d))^100 at d = 0.01 for times (0, 1)
  REQUIRE(discrete_moment_nn(p, {0.0, 1.0}) ==
          Catch::Approx(0.1353262606437916).epsilon(1e-13));

  // convergence toward e^{-2} along delta
  double prev_err = 1.0;
  for (double d : {0.1, 0.01, 0.001}) {
    const double v = discrete_moment_nn(ScalingParams(d, 2.0), {0.0, 1.0});
    const double err = std::abs(v - std::exp(-2.0));
    REQUIRE(err < prev_err);
    prev_err = err;
  }
  REQUIRE(prev_err <= 5e-3);

  // (tanh j_delta)^{1/delta} at delta = 1e-4 is within 3e-4 of e^{-2}
  const double v = std::pow(ScalingParams(1e-4, 1.0).tanh_j_delta(), 1e4);
  REQUIRE(std::abs(v - std::exp(-2.0)) <= 3e-4);
}

TEST_CASE("full discrete moments: exact, reweighted, and the zero shortcut") {
  const ScalingParams p(0.25, 1.0);
  const std::vector<double> times = {-0.5, 0.5};

  // W = 0: bit-identical to the closed nearest-neighbor form
  const auto zero = discrete_moment_full(p, times, Kernel::zero(), DiscreteMethod::ReweightedMC,
                                         100, 1);
  REQUIRE(zero.exact);
  REQUIRE(zero.value.mean == discrete_moment_nn(p, times));
  REQUIRE(zero.value.std_error == 0.0);

  // exact vs reweighted MC on an enumerable lattice
  const auto W = Kernel::exponential(1.0, 1.0);
  const auto exact = discrete_moment_full(p, times, W, DiscreteMethod::Exact);
  REQUIRE(exact.exact);
  const auto mc = discrete_moment_full(p, times, W, DiscreteMethod::ReweightedMC, 100000, 90210, 2);
  REQUIRE_FALSE(mc.exact);
  REQUIRE(mc.ess > 100.0);
  REQUIRE_FALSE(mc.ess_warning);
  REQUIRE(std::abs(mc.value.mean - exact.value.mean) < 4.0 * mc.value.std_error);

  // repeated times cancel pairwise
  const auto rep = discrete_moment_full(p, {0.3, 0.3}, W, DiscreteMethod::Exact);
  REQUIRE(rep.value.mean == Catch::Approx(1.0));

  REQUIRE_THROWS_AS(
      discrete_moment_full(p, times, W, DiscreteMethod::ReweightedMC, 0, 1),
      std::invalid_argument);
}

TEST_CASE("discrete susceptibility") {
  // single-site lattice: T < delta/2 leaves only the i = j = 0 term
  const ScalingParams single(0.5, 0.2);
  REQUIRE(single.L_delta() == 0);
  const auto s = susceptibility_discrete(single, Kernel::zero(), DiscreteMethod::Exact);
  REQUIRE(s.value.mean == Catch::Approx(0.5 * 0.5 / 0.2).epsilon(1e-14));

  // W = 0 closed form against frozen values, shrinking toward the continuum
  const double chi_ref = susceptibility_zero_kernel(2.0);
  const double frozen[] = {1.8600481165855715, 1.8025661329656899, 1.7757001850887587};
  double prev = 1.0;
  int k = 0;
  for (double d : {0.2, 0.1, 0.05}) {
    const auto v = susceptibility_discrete(ScalingParams(d, 2.0), Kernel::zero(),
                                           DiscreteMethod::Exact);
    REQUIRE(v.value.mean == Catch::Approx(frozen[k++]).epsilon(1e-12));
    const double err = std::abs(v.value.mean - chi_ref);
    REQUIRE(err < prev);
    prev = err;
  }

  // exact vs reweighted MC with a kernel, small lattice
  const ScalingParams p(0.25, 1.0);
  const auto W = Kernel::exponential(0.5, 1.0);
  const auto exact = susceptibility_discrete(p, W, DiscreteMethod::Exact);
  const auto mc = susceptibility_discrete(p, W, DiscreteMethod::ReweightedMC, 100000, 5150, 2);
  REQUIRE(std::abs(mc.value.mean - exact.value.mean) < 4.0 * mc.value.std_error);

  // Cauchy-style diagnostic at fixed small-norm W: successive halvings of
  // delta move the exact value less and less
  const auto Ws = Kernel::exponential(0.01, 1.0);
  double v_prev = 0.0, d_prev = 0.0;
  int step = 0;
  for (double d : {0.2, 0.1, 0.05}) {
    const double v =
        susceptibility_discrete(ScalingParams(d, 0.5), Ws, DiscreteMethod::Exact).value.mean;
    if (step >= 2) REQUIRE(std::abs(v - v_prev) < d_prev);
    if (step >= 1) d_prev = std::abs(v - v_prev);
    v_prev = v;
    ++step;
  }
}

TEST_CASE("flip rate matches the unit-intensity clock") {
  // expected sign changes per unit time = flip_prob / delta -> 1
  const ScalingParams p(0.02, 1.0);
  auto rng = CounterRng::stream(33, 0);
  RunningMoments flips;
  std::vector<int8_t> spins;
  for (int k = 0; k < 50000; ++k) {
    sample_nn_spins(p.j_delta(), p.site_count(), rng, spins);
    int f = 0;
    for (std::size_t b = 0; b + 1 < spins.size(); ++b)
      if (spins[b] != spins[b + 1]) ++f;
    flips.add(static_cast<double>(f));
  }
  const double per_unit_time = flips.mean / (2.0 * p.T);
  const double se = flips.std_error() / (2.0 * p.T);
  // rate is 1/(1+delta), approaching 1
  REQUIRE(std::abs(per_unit_time - 1.0 / (1.0 + p.delta)) < 4.0 * se);
}

TEST_CASE("tightness diagnostic") {
  const ScalingParams p(0.02, 1.0);
  REQUIRE_THROWS_AS(tightness_probability(p, 0.01, 100, 1), std::invalid_argument);

  const auto r = tightness_probability(p, 0.1, 20000, 2718, 2);
  REQUIRE(r.sample_count == 20000);
  REQUIRE(r.empirical_probability >= 0.0);
  REQUIRE(r.empirical_probability <= 1.0);
  // frozen bound value: T s (eps+delta) e^{2T+delta} + Poisson tail
  REQUIRE(r.analytic_bound == Catch::Approx(3.9649834509323806).epsilon(1e-12));
  REQUIRE(r.empirical_probability <= r.analytic_bound);

  // shrinking the gap shrinks the event
  const auto tighter = tightness_probability(p, 0.05, 20000, 2718, 2);
  REQUIRE(tighter.empirical_probability <= r.empirical_probability);

  // bound requires s_eps <= 1/eps
  REQUIRE_THROWS_AS(tightness_analytic_bound(1.0, 0.1, 0.01, 20.0), std::invalid_argument);
}

TEST_CASE("reweighting exponent matches the continuum double integral") {
  // The exponent is the ordered double sum over (i, j), i.e. the Riemann sum
  // of the full [-T,T]^2 integral: each unordered pair twice. Counting each
  // pair once instead lands far outside the finite-delta bias.
  const auto W = Kernel::exponential(0.2, 1.0);  // ||W||_1 = 0.4
  const double T = 1.0;
  const std::vector<double> times = {-0.5, 0.5};
  const double delta = 0.1;

  const auto ref = mc_weighted_moment(W, T, times, 200000, 5001, 4);
  const ScalingParams p(delta, T);
  const auto ordered = discrete_moment_full(p, times, W, DiscreteMethod::Exact);

  const auto scaled = scaled_pair_coupling(W, delta);
  const int L = p.L_delta();
  InteractionMap once{Lattice(L)};
  for (int i = -L; i < L; ++i) once.add({i, i + 1}, p.j_delta());
  for (int i = -L; i <= L; ++i)
    for (int k = 1; k <= std::min(scaled.w.range(), L - i); ++k)
      if (scaled.w.w(k) > 0.0) once.add({i, i + k}, scaled.w.w(k));
  const std::vector<int> sites = {static_cast<int>(lattice_index(-0.5, delta)),
                                  static_cast<int>(lattice_index(0.5, delta))};
  const double pair_counted_once = expectation_exact(once, L, sites);

  REQUIRE(std::abs(ordered.value.mean - ref.mean) < 0.012);
  REQUIRE(std::abs(pair_counted_once - ref.mean) > 0.02);
}

TEST_CASE("moment convergence toward the jump process") {
  // delta down 0.2 -> 0.05 at fixed small kernel: the discrepancy against
  // the jump-process reference shrinks
  const auto W = Kernel::exponential(0.01, 1.0);  // ||W||_1 = 0.02
  const std::vector<double> times = {-0.5, 0.5};

  auto rng = CounterRng::stream(99, 0);
  RunningMomentsK<2> ref_acc;
  for (int k = 0; k < 100000; ++k) {
    const auto path = sample_path(1.0, 1.0, rng);
    const double w = std::exp(interaction_double_integral(path, W));
    ref_acc.add({path.value_at(-0.5) * path.value_at(0.5) * w, w});
  }
  const auto ref = ratio_estimate(ref_acc, 99);

  double prev_gap = 10.0;
  for (double d : {0.2, 0.1, 0.05}) {
    const auto est = discrete_moment_full(ScalingParams(d, 1.0), times, W,
                                          DiscreteMethod::ReweightedMC, 100000, 4242, 2);
    const double gap = std::abs(est.value.mean - ref.mean);
    const double se = std::hypot(est.value.std_error, ref.std_error);
    REQUIRE(gap < prev_gap + 4.0 * se);
    prev_gap = gap;
  }
  REQUIRE(prev_gap <= 3.0 * std::hypot(0.004, ref.std_error) + 0.02);
}
