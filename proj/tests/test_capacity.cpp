#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "semioscope/capacity.hpp"
#include "semioscope/errors.hpp"
#include "semioscope/rng.hpp"

using namespace semioscope;

TEST_CASE("plateau-aware local maxima counting") {
  CHECK(count_local_maxima(std::vector<double>{}) == 0);
  CHECK(count_local_maxima(std::vector<double>{1.0}) == 1);
  CHECK(count_local_maxima(std::vector<double>{0, 0, 0, 0}) == 1);
  CHECK(count_local_maxima(std::vector<double>{0, 1, 2, 3}) == 1);
  CHECK(count_local_maxima(std::vector<double>{3, 2, 1, 0}) == 1);
  CHECK(count_local_maxima(std::vector<double>{0, 2, 1, 3, 0}) == 2);
  CHECK(count_local_maxima(std::vector<double>{0, 2, 2 + 1e-12, 1}) == 1);
  CHECK(count_local_maxima(std::vector<double>{1, 0, 1}) == 2);
}

TEST_CASE("grid helpers") {
  const auto g = log_spaced(0.05, 20.0, 33);
  CHECK(g.front() == 0.05);
  CHECK(g.back() == 20.0);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 5), DomainError);
  const auto l = linear_spaced(1.0, 2.0, 5);
  CHECK(l[2] == doctest::Approx(1.5));
}

TEST_CASE("profile of the identity channel has matching columns") {
  const Scenario idn = builtin_scenario("identity4");
  const auto grid = log_spaced(0.05, 20.0, 33);
  const ProfileCurve curve = profile(idn.source, idn.channel, grid);
  REQUIRE(curve.points.size() == grid.size());
  for (const auto& pt : curve.points) {
    CHECK(pt.decipherability_bits.value ==
          doctest::Approx(pt.breadth_bits.value).epsilon(1e-12));
    CHECK(pt.residual_ambiguity_bits.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pt.risk == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pt.decipherability_bits.value <= pt.breadth_bits.value + 1e-9);
  }
  CHECK(curve.unimodality_flag);
  CHECK(curve.audience_id == "identity");
}

TEST_CASE("profile of the constant channel is flat zero") {
  const Scenario cst = builtin_scenario("constant4");
  const ProfileCurve curve = profile(cst.source, cst.channel, log_spaced(0.1, 10, 16));
  for (const auto& pt : curve.points) {
    CHECK(pt.decipherability_bits.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(pt.risk == kDefaultRiskCap);
  }
  CHECK(curve.local_maxima_count == 1); // single plateau
  CHECK(curve.unimodality_flag);
}

TEST_CASE("profile rejects bad grids") {
  const Scenario idn = builtin_scenario("identity4");
  CHECK_THROWS_AS(profile(idn.source, idn.channel, std::vector<double>{}),
                  DomainError);
  CHECK_THROWS_AS(profile(idn.source, idn.channel, std::vector<double>{1.0, 0.5}),
                  DomainError);
  CHECK_THROWS_AS(profile(idn.source, idn.channel, std::vector<double>{-1.0, 0.5}),
                  DomainError);
}

TEST_CASE("lambda search on monotone and flat objectives") {
  const Scenario idn = builtin_scenario("identity4");
  const CapacityResult up = lambda_opt(idn.source, idn.channel, 0.05, 20, 33, 1e-4);
  CHECK(up.lambda_opt == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(up.unimodal);
  CHECK(up.capacity_bits.value ==
        doctest::Approx(breadth(idn.source, Lambda(20.0)).value).epsilon(1e-9));
  CHECK(up.breadth_at_opt_bits.value ==
        doctest::Approx(up.capacity_bits.value).epsilon(1e-9));

  const Scenario cst = builtin_scenario("constant4");
  const CapacityResult flat = lambda_opt(cst.source, cst.channel, 0.05, 20, 33, 1e-4);
  CHECK(flat.lambda_opt == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(flat.capacity_bits.value == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(lambda_opt(idn.source, idn.channel, 2.0, 1.0, 33, 1e-4), DomainError);
  CHECK_THROWS_AS(lambda_opt(idn.source, idn.channel, 0.1, 1.0, 2, 1e-4), DomainError);
  CHECK_THROWS_AS(lambda_opt(idn.source, idn.channel, 0.1, 1.0, 33, 0.0), DomainError);
}

TEST_CASE("lambda search agrees with a dense-grid oracle on tiered_default") {
  const Scenario t = builtin_scenario("tiered_default");
  const CapacityResult r = lambda_opt(t.source, t.channel, 0.05, 20, 33, 1e-4);
  CHECK(r.unimodal);

  const auto dense = log_spaced(0.05, 20.0, 4096);
  double best_d = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    const double d = decipherability(t.source, Lambda(dense[k]), t.channel).value;
    if (d > best_d) {
      best_d = d;
      best_k = k;
    }
  }
  CHECK(best_k > 0);
  CHECK(best_k + 1 < dense.size());
  CHECK(r.lambda_opt >= dense[best_k - 1]);
  CHECK(r.lambda_opt <= dense[best_k + 1]);
  CHECK(r.capacity_bits.value >= best_d - 1e-6);
  // invariant: the refined optimum dominates every coarse-grid point
  for (double lam : log_spaced(0.05, 20.0, 33)) {
    CHECK(r.capacity_bits.value >=
          decipherability(t.source, Lambda(lam), t.channel).value - 1e-9);
  }
}

TEST_CASE("blahut-arimoto closed forms") {
  for (std::size_t n : {2, 4, 8}) {
    std::vector<double> cells(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) cells[i * n + i] = 1.0;
    SemioticChannel idn("a", "c", ChannelMatrix(std::move(cells), n, n),
                        [&] {
                          std::vector<std::string> ids;
                          for (std::size_t i = 0; i < n; ++i)
                            ids.push_back("i" + std::to_string(i));
                          return ids;
                        }());
    const auto r = blahut_arimoto(idn, 1e-9, 1000);
    CHECK(r.converged);
    CHECK(r.capacity_bits.value ==
          doctest::Approx(std::log2(static_cast<double>(n))).epsilon(1e-9));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.input_dist[i] == doctest::Approx(1.0 / n).epsilon(1e-6));
    }
  }

  const Scenario cst = builtin_scenario("constant4");
  CHECK(blahut_arimoto(cst.channel, 1e-9, 1000).capacity_bits.value ==
        doctest::Approx(0.0).epsilon(1e-9));

  const Scenario bsc = builtin_scenario("bsc011");
  const double expected = 1.0 - (-0.11 * std::log2(0.11) - 0.89 * std::log2(0.89));
  CHECK(blahut_arimoto(bsc.channel, 1e-7, 10000).capacity_bits.value ==
        doctest::Approx(expected).epsilon(1e-7));

  CHECK_THROWS_AS(blahut_arimoto(bsc.channel, 0.0, 100), DomainError);
  CHECK_THROWS_AS(blahut_arimoto(bsc.channel, 1e-9, 0), DomainError);
}

TEST_CASE("blahut-arimoto flags non-convergence instead of throwing") {
  const Scenario t = builtin_scenario("tiered_default");
  const auto r = blahut_arimoto(t.channel, 1e-12, 1);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.capacity_bits.value >= 0.0);
}

TEST_CASE("blahut-arimoto is invariant under row permutations") {
  std::mt19937_64 rng(5150);
  const Scenario sc = reference_scenario({ScenarioSpec::Kind::random, 6, 0.0, 4, 12, 17});
  const double base = blahut_arimoto(sc.channel, 1e-9, 100000).capacity_bits.value;

  const std::size_t k = sc.channel.matrix.rows();
  std::vector<std::size_t> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> cells(k * sc.channel.matrix.cols());
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t i = 0; i < sc.channel.matrix.cols(); ++i) {
      cells[perm[m] * sc.channel.matrix.cols() + i] = sc.channel.matrix.at(m, i);
    }
  }
  SemioticChannel shuffled("a", "c",
                           ChannelMatrix(std::move(cells), k, sc.channel.matrix.cols()),
                           sc.channel.interpretation_ids);
  CHECK(blahut_arimoto(shuffled, 1e-9, 100000).capacity_bits.value ==
        doctest::Approx(base).epsilon(1e-8));
}

TEST_CASE("grid decipherability is dominated by the unconstrained capacity") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 2 + rng() % 10;
    const Scenario sc =
        reference_scenario({ScenarioSpec::Kind::random, k, 0.0, 4, 12, rng()});
    const double cap = blahut_arimoto(sc.channel, 1e-8, 200000).capacity_bits.value;
    for (double lam : log_spaced(0.05, 20.0, 17)) {
      CHECK(decipherability(sc.source, Lambda(lam), sc.channel).value <=
            cap + 1e-6);
    }
  }
}

TEST_CASE("adaptive controller walks up the identity objective") {
  const Scenario idn = builtin_scenario("identity4");
  AdaptConfig cfg;
  cfg.lambda_init = 2.0;
  cfg.step_init = 0.5;
  cfg.batch_size = 20000;
  cfg.shrink_factor = 0.5;
  cfg.max_rounds = 40;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto trace = adapt_lambda(make_scenario_sampler(idn, seed), cfg);
    REQUIRE(!trace.empty());
    if (trace.back().lambda >= 0.9 * cfg.lambda_max) ++hits;
  }
  CHECK(hits >= 9);
}

TEST_CASE("adaptive controller stalls on the constant channel") {
  const Scenario cst = builtin_scenario("constant4");
  AdaptConfig cfg;
  cfg.lambda_init = 1.0;
  cfg.step_init = 0.5;
  cfg.batch_size = 5000;
  cfg.shrink_factor = 0.5;
  cfg.max_rounds = 60;
  const auto trace = adapt_lambda(make_scenario_sampler(cst, 9), cfg);
  REQUIRE(!trace.empty());
  CHECK(trace.back().decipherability_hat.value < 0.01);
  // step shrinks during the run
  CHECK(trace.back().step < cfg.step_init);
}

TEST_CASE("adaptive controller config validation") {
  const Scenario idn = builtin_scenario("identity4");
  const auto sampler = make_scenario_sampler(idn, 1);
  AdaptConfig bad;
  bad.lambda_init = -1.0;
  CHECK_THROWS_AS(adapt_lambda(sampler, bad), DomainError);
  bad = AdaptConfig{};
  bad.shrink_factor = 1.5;
  CHECK_THROWS_AS(adapt_lambda(sampler, bad), DomainError);
  bad = AdaptConfig{};
  bad.lambda_init = 100.0; // above lambda_max
  CHECK_THROWS_AS(adapt_lambda(sampler, bad), DomainError);
}

TEST_CASE("safe mode trades breadth for the cap") {
  const Scenario idn = builtin_scenario("identity4");
  AdaptConfig cfg;
  cfg.lambda_init = 2.0;
  cfg.step_init = 0.5;
  cfg.batch_size = 20000;
  cfg.shrink_factor = 0.5;
  cfg.max_rounds = 40;
  cfg.safe_mode = true;
  cfg.breadth_cap = 1.2;
  const auto trace = adapt_lambda(make_scenario_sampler(idn, 4), cfg);
  REQUIRE(!trace.empty());
  // identity: D = S, so the penalized objective peaks where S ~ breadth_cap
  CHECK(trace.back().breadth_hat.value < 1.6);
}
