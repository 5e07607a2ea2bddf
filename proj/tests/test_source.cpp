#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "semioscope/errors.hpp"
#include "semioscope/rng.hpp"
#include "semioscope/source.hpp"

using namespace semioscope;

namespace {

SourceFamily family(std::vector<double> scores) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ids.push_back("m" + std::to_string(i));
  }
  return SourceFamily(std::move(ids), std::move(scores));
}

} // namespace

TEST_CASE("lambda validation") {
  CHECK_THROWS_AS(Lambda(0.0), DomainError);
  CHECK_THROWS_AS(Lambda(-1.0), DomainError);
  CHECK_THROWS_AS(Lambda(1e4), DomainError);
  CHECK(Lambda(1e3).value == 1e3);
}

TEST_CASE("source family validation") {
  CHECK_THROWS_AS(SourceFamily({}, {}), ValidationError);
  CHECK_THROWS_AS(SourceFamily({"a", "a"}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(SourceFamily({"a", "b"}, {0.0}), ShapeError);
  CHECK_THROWS_AS(SourceFamily({"a"}, {std::nan("")}), ValidationError);
}

TEST_CASE("equal scores give the uniform distribution at any temperature") {
  const SourceFamily f = family({1.7, 1.7, 1.7, 1.7, 1.7});
  for (double lam : {0.01, 1.0, 100.0}) {
    const ProbVector p = message_distribution(f, Lambda(lam));
    for (std::size_t i = 0; i < p.alphabet_size(); ++i) {
      CHECK(p[i] == doctest::Approx(0.2).epsilon(1e-12));
    }
    CHECK(breadth(f, Lambda(lam)).value ==
          doctest::Approx(std::log2(5.0)).epsilon(1e-12));
  }
}

TEST_CASE("two-point softmax matches the closed form") {
  const SourceFamily f = family({1.0, 0.0});
  const ProbVector p = message_distribution(f, Lambda(1.0));
  // e / (e + 1) evaluated in long double
  const long double e = std::exp(1.0L);
  CHECK(p[0] == doctest::Approx(static_cast<double>(e / (e + 1.0L))).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(static_cast<double>(1.0L / (e + 1.0L))).epsilon(1e-14));
  CHECK(p[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
}

TEST_CASE("low temperature concentrates on the argmax") {
  const SourceFamily f = family({5.0, 0.0, 0.0});
  const ProbVector p = message_distribution(f, Lambda(0.001));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(breadth(f, Lambda(0.001)).value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("low temperature with ties spreads over the argmax set") {
  const SourceFamily f = family({2.0, 2.0, -5.0, -7.0});
  const ProbVector p = message_distribution(f, Lambda(0.001));
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(breadth(f, Lambda(0.001)).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("breadth is nondecreasing on a temperature grid") {
  const SourceFamily f = family({0.0, -1.0, -2.0, -3.0});
  double prev = -1.0;
  for (int k = 0; k <= 40; ++k) {
    const double lam = 0.1 * std::pow(100.0, k / 40.0); // 0.1 .. 10
    const double s = breadth(f, Lambda(lam)).value;
    CHECK(s >= prev - 1e-9);
    prev = s;
  }
}

TEST_CASE("breadth monotonicity over random families") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 15;
    std::vector<double> scores(n);
    for (auto& s : scores) s = -3.0 + 6.0 * unit_double(rng);
    const SourceFamily f = family(scores);
    double prev = -1.0;
    for (int k = 0; k < 33; ++k) {
      const double lam = 0.05 * std::pow(400.0, k / 32.0);
      const double s = breadth(f, Lambda(lam)).value;
      CHECK(s >= prev - 1e-9);
      prev = s;
    }
    // high-temperature limit approaches log2 n
    CHECK(breadth(f, Lambda(1e3)).value ==
          doctest::Approx(std::log2(static_cast<double>(n))).epsilon(1e-4));
  }
}

TEST_CASE("softmax is invariant to score shifts") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<double> scores(n), shifted(n);
    const double shift = -10.0 + 20.0 * unit_double(rng);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = -2.0 + 4.0 * unit_double(rng);
      shifted[i] = scores[i] + shift;
    }
    const double lam = 0.2 + 5.0 * unit_double(rng);
    const ProbVector a = message_distribution(family(scores), Lambda(lam));
    const ProbVector b = message_distribution(family(shifted), Lambda(lam));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}
