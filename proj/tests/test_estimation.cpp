#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "semioscope/channel.hpp"
#include "semioscope/errors.hpp"
#include "semioscope/estimation.hpp"
#include "semioscope/io.hpp"

using namespace semioscope;

namespace {

CountTable table_2x2(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                     std::uint64_t d) {
  CountTable t;
  t.audience_id = "aud";
  t.context_id = "ctx";
  t.lambda = 1.0;
  t.message_ids = {"m0", "m1"};
  t.interpretation_ids = {"i0", "i1"};
  t.counts = {a, b, c, d};
  return t;
}

constexpr double kBscMi = 0.18872187554086717; // 1 - h(0.25)

} // namespace

TEST_CASE("ingest groups jsonl records") {
  std::istringstream in(
      R"({"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m0","interpretation_id":"i0"}
{"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m0","interpretation_id":"i1"}
{"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m1","interpretation_id":"i0"}
{"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m1","interpretation_id":"i1"}
)");
  const auto tables = ingest(in, RecordFormat::jsonl);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].total() == 4);
  CHECK(tables[0].message_ids == std::vector<std::string>{"m0", "m1"});
  CHECK(tables[0].counts == std::vector<std::uint64_t>{1, 1, 1, 1});
}

TEST_CASE("ingest splits groups by lambda") {
  std::istringstream in(
      R"({"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m0","interpretation_id":"i0"}
{"audience_id":"a","context_id":"c","lambda":2.0,"message_id":"m0","interpretation_id":"i0"}
)");
  const auto tables = ingest(in, RecordFormat::jsonl);
  REQUIRE(tables.size() == 2);
  CHECK(tables[0].lambda == 1.0);
  CHECK(tables[1].lambda == 2.0);
}

TEST_CASE("ingest error reporting") {
  std::istringstream bad_json("not json at all\n");
  CHECK_THROWS_WITH_AS(ingest(bad_json, RecordFormat::jsonl),
                       doctest::Contains("line 1"), ValidationError);

  std::istringstream missing(
      R"({"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m0"}
)");
  CHECK_THROWS_WITH_AS(ingest(missing, RecordFormat::jsonl),
                       doctest::Contains("interpretation_id"), ValidationError);

  std::istringstream second_line(
      R"({"audience_id":"a","context_id":"c","lambda":1.0,"message_id":"m","interpretation_id":"i"}
{"audience_id":"a"}
)");
  CHECK_THROWS_WITH_AS(ingest(second_line, RecordFormat::jsonl),
                       doctest::Contains("line 2"), ValidationError);

  std::istringstream negative(
      R"({"audience_id":"a","context_id":"c","lambda":-1.0,"message_id":"m","interpretation_id":"i"}
)");
  CHECK_THROWS_AS(ingest(negative, RecordFormat::jsonl), ValidationError);

  std::istringstream empty("");
  CHECK(ingest(empty, RecordFormat::jsonl).empty());
}

TEST_CASE("ingest reads csv with any column order") {
  std::istringstream in(
      "message_id,audience_id,lambda,interpretation_id,context_id\n"
      "m0,a,0.5,i0,c\n"
      "m1,a,0.5,i1,c\n");
  const auto tables = ingest(in, RecordFormat::csv);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].lambda == 0.5);
  CHECK(tables[0].total() == 2);

  std::istringstream missing("audience_id,context_id,message_id,interpretation_id\n");
  CHECK_THROWS_WITH_AS(ingest(missing, RecordFormat::csv),
                       doctest::Contains("lambda"), ValidationError);

  std::istringstream short_row(
      "audience_id,context_id,lambda,message_id,interpretation_id\n"
      "a,c,1.0,m0\n");
  CHECK_THROWS_WITH_AS(ingest(short_row, RecordFormat::csv),
                       doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("records round-trip through both serializations") {
  const Scenario t = builtin_scenario("tiered_default");
  const auto records =
      sample_interactions(t.source, Lambda(1.5), t.channel, 100000, 7);

  // expected counts straight from the record list
  std::map<std::pair<std::string, std::string>, std::uint64_t> expected;
  for (const auto& r : records) ++expected[{r.message_id, r.interpretation_id}];

  for (auto format : {RecordFormat::jsonl, RecordFormat::csv}) {
    std::ostringstream out;
    if (format == RecordFormat::jsonl) {
      write_records_jsonl(out, records);
    } else {
      write_records_csv(out, records);
    }
    std::istringstream in(out.str());
    const auto tables = ingest(in, format);
    REQUIRE(tables.size() == 1);
    const CountTable& table = tables[0];
    CHECK(table.lambda == 1.5);
    CHECK(table.total() == records.size());
    std::uint64_t checked = 0;
    for (std::size_t m = 0; m < table.message_ids.size(); ++m) {
      for (std::size_t i = 0; i < table.interpretation_ids.size(); ++i) {
        const auto it = expected.find(
            {table.message_ids[m], table.interpretation_ids[i]});
        const std::uint64_t want = it == expected.end() ? 0 : it->second;
        CHECK(table.count(m, i) == want);
        checked += table.count(m, i);
      }
    }
    CHECK(checked == records.size());
  }
}

TEST_CASE("entropy estimators") {
  CHECK(estimate_entropy(table_2x2(5, 0, 0, 0), Axis::message,
                         EstimatorMethod::plugin).value == 0.0);

  CountTable equal = table_2x2(3, 3, 3, 3);
  CHECK(estimate_entropy(equal, Axis::message, EstimatorMethod::plugin).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  // counts (3,1) along the message axis
  CountTable t = table_2x2(3, 0, 1, 0);
  const double plugin =
      estimate_entropy(t, Axis::message, EstimatorMethod::plugin).value;
  CHECK(plugin == doctest::Approx(0.8112781244591328).epsilon(1e-12));
  const double mm =
      estimate_entropy(t, Axis::message, EstimatorMethod::miller_madow).value;
  // oracle: plugin + (K-1) / (2 N ln 2) evaluated in long double
  const long double bump = 1.0L / (8.0L * std::numbers::ln2_v<long double>);
  CHECK(mm == doctest::Approx(plugin + static_cast<double>(bump)).epsilon(1e-14));
  CHECK(mm == doctest::Approx(0.9916150045702533).epsilon(1e-12));
}

TEST_CASE("mutual information estimators") {
  CHECK(estimate_mutual_information(table_2x2(7, 0, 0, 0),
                                    EstimatorMethod::plugin).value == 0.0);
  CHECK(estimate_mutual_information(table_2x2(4, 0, 0, 4),
                                    EstimatorMethod::plugin).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  // miller-madow correction: +1 support term each marginal, -3 joint
  CountTable t = table_2x2(40, 10, 10, 40);
  const double plugin = estimate_mutual_information(t, EstimatorMethod::plugin).value;
  const double mm = estimate_mutual_information(t, EstimatorMethod::miller_madow).value;
  const double n_ln2 = 2.0 * 100.0 * std::numbers::ln2_v<double>;
  CHECK(mm == doctest::Approx(plugin + (1.0 + 1.0 - 3.0) / n_ln2).epsilon(1e-12));
}

TEST_CASE("conditional entropy estimator mirrors the identity") {
  for (auto method : {EstimatorMethod::plugin, EstimatorMethod::miller_madow}) {
    CountTable t = table_2x2(30, 10, 5, 55);
    const double h = estimate_conditional_entropy(t, method).value;
    const double expected =
        estimate_entropy(t, Axis::interpretation, method).value -
        estimate_mutual_information(t, method).value;
    CHECK(h == doctest::Approx(std::max(0.0, expected)).epsilon(1e-12));
  }
  CHECK(estimate_conditional_entropy(table_2x2(9, 0, 0, 0),
                                     EstimatorMethod::plugin).value == 0.0);
}

TEST_CASE("plugin mutual information stays close to the law on BSC samples") {
  const Scenario bsc = builtin_scenario("bsc025");
  const auto records =
      sample_interactions(bsc.source, Lambda(1.0), bsc.channel, 200000, 99);
  const CountTable t = count_records(records);
  CHECK(std::abs(estimate_mutual_information(t, EstimatorMethod::plugin).value -
                 kBscMi) < 0.01);
  // empirical D never exceeds empirical S by more than estimator bias
  CHECK(estimate_mutual_information(t, EstimatorMethod::plugin).value <=
        estimate_entropy(t, Axis::message, EstimatorMethod::plugin).value + 0.02);
}

TEST_CASE("plugin error shrinks with sample size on the BSC fixture") {
  const Scenario bsc = builtin_scenario("bsc025");
  double mean_err[3] = {0, 0, 0};
  const std::size_t sizes[3] = {1000, 10000, 100000};
  for (int which = 0; which < 3; ++which) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto records = sample_interactions(bsc.source, Lambda(1.0),
                                               bsc.channel, sizes[which],
                                               1000 + seed);
      const double est = estimate_mutual_information(count_records(records),
                                                     EstimatorMethod::plugin).value;
      mean_err[which] += std::abs(est - kBscMi) / 20.0;
    }
  }
  CHECK(mean_err[0] > mean_err[1]);
  CHECK(mean_err[1] > mean_err[2]);
}

TEST_CASE("miller-madow correction is bounded") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    CountTable t = table_2x2(rng() % 50, rng() % 50, rng() % 50, 1 + rng() % 50);
    for (auto axis : {Axis::message, Axis::interpretation}) {
      const double plugin = estimate_entropy(t, axis, EstimatorMethod::plugin).value;
      const double mm = estimate_entropy(t, axis, EstimatorMethod::miller_madow).value;
      const double cap =
          1.0 / (2.0 * static_cast<double>(t.total()) * std::numbers::ln2_v<double>);
      CHECK(mm >= plugin);
      CHECK(mm - plugin <= cap + 1e-15);
    }
    CHECK(estimate_mutual_information(t, EstimatorMethod::plugin).value >= 0.0);
    CHECK(estimate_conditional_entropy(t, EstimatorMethod::plugin).value >= 0.0);
  }
}

TEST_CASE("additive smoothing spreads mass over empty cells") {
  CountTable t = table_2x2(10, 0, 0, 0);
  const double unsmoothed =
      estimate_entropy(t, Axis::message, EstimatorMethod::plugin, 0.0).value;
  const double smoothed =
      estimate_entropy(t, Axis::message, EstimatorMethod::plugin, 1.0).value;
  CHECK(unsmoothed == 0.0);
  CHECK(smoothed > 0.0);
  CHECK_THROWS_AS(estimate_entropy(t, Axis::message, EstimatorMethod::plugin, -0.5),
                  DomainError);
}

TEST_CASE("bootstrap intervals behave") {
  CountTable degenerate = table_2x2(25, 0, 0, 0);
  const auto ci = bootstrap_ci(degenerate, Statistic::mi, 200, 3, 0.95);
  CHECK(ci.point.value == 0.0);
  CHECK(ci.ci_low.value == 0.0);
  CHECK(ci.ci_high.value == 0.0);

  CountTable t = table_2x2(40, 10, 10, 40);
  const auto a = bootstrap_ci(t, Statistic::mi, 300, 17, 0.9);
  const auto b = bootstrap_ci(t, Statistic::mi, 300, 17, 0.9);
  CHECK(a.ci_low.value == b.ci_low.value);
  CHECK(a.ci_high.value == b.ci_high.value);
  CHECK(a.ci_low.value <= a.point.value);
  CHECK(a.point.value <= a.ci_high.value);
  CHECK(a.n_bootstrap == 300);
  CHECK(a.level == 0.9);

  CHECK_THROWS_AS(bootstrap_ci(t, Statistic::mi, 50, 1, 0.95), DomainError);
  CHECK_THROWS_AS(bootstrap_ci(t, Statistic::mi, 200, 1, 1.5), DomainError);
}

TEST_CASE("empirical profile over sampled tiered tables") {
  const Scenario t = builtin_scenario("tiered_default");
  std::vector<CountTable> tables;
  const auto grid = std::vector<double>{0.2, 0.5, 1.0, 2.0, 4.0, 8.0};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    tables.push_back(count_records(sample_interactions(
        t.source, Lambda(grid[k]), t.channel, 50000, 9000 + k)));
  }
  const EmpiricalProfile ep =
      empirical_profile(tables, EstimatorMethod::plugin, std::nullopt);
  REQUIRE(ep.curve.points.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double analytic =
        decipherability(t.source, Lambda(grid[k]), t.channel).value;
    CHECK(std::abs(ep.curve.points[k].decipherability_bits.value - analytic) < 0.02);
  }

  // duplicate lambda rejected
  tables.push_back(tables.back());
  CHECK_THROWS_AS(empirical_profile(tables, EstimatorMethod::plugin, std::nullopt),
                  DomainError);
  // mixed channels rejected
  std::vector<CountTable> mixed = {tables[0], tables[1]};
  mixed[1].audience_id = "other";
  CHECK_THROWS_AS(empirical_profile(mixed, EstimatorMethod::plugin, std::nullopt),
                  DomainError);
}

TEST_CASE("empirical profile carries bootstrap bands when asked") {
  const Scenario bsc = builtin_scenario("bsc025");
  std::vector<CountTable> tables = {count_records(
      sample_interactions(bsc.source, Lambda(1.0), bsc.channel, 20000, 5))};
  BootstrapConfig cfg{200, 77, 0.95};
  const EmpiricalProfile ep =
      empirical_profile(tables, EstimatorMethod::plugin, cfg);
  REQUIRE(ep.has_ci);
  REQUIRE(ep.decipherability_ci.size() == 1);
  CHECK(ep.decipherability_ci[0].low <= ep.curve.points[0].decipherability_bits.value);
  CHECK(ep.decipherability_ci[0].high >= ep.curve.points[0].decipherability_bits.value);
  CHECK(ep.decipherability_ci[0].low < ep.decipherability_ci[0].high);
}
