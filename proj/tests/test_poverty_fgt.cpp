#include "povgini/error.hpp"
#include "povgini/poverty_fgt.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace povgini;

namespace {

std::vector<double> random_incomes(std::mt19937_64& rng, std::size_t n) {
  std::lognormal_distribution<double> d(6.5, 0.8);
  std::bernoulli_distribution zero(0.05);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(zero(rng) ? 0.0 : d(rng));
  return out;
}

} // namespace

TEST_CASE("fgt_index worked example") {
  const std::vector<double> y{350, 700, 1050, 140};
  const PovertyLine z(700);
  const auto p0 = fgt_index(y, z, 0);
  const auto p1 = fgt_index(y, z, 1);
  const auto p2 = fgt_index(y, z, 2);
  // poor records are 350 (gap 0.5) and 140 (gap 0.8)
  CHECK(p0.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p1.value == doctest::Approx(0.325).epsilon(1e-15));
  CHECK(p2.value == doctest::Approx(0.2225).epsilon(1e-15));
  CHECK(p0.poor_count == 2);
  CHECK(p0.sample_size == 4);
}

TEST_CASE("fgt_index boundary cases") {
  const PovertyLine z(700);
  const std::vector<double> rich{700, 800, 5000};
  const std::vector<double> broke{0, 0, 0};
  for (double a : {0.0, 1.0, 2.0, 0.5, 3.0})
    CHECK(fgt_index(rich, z, a).value == 0.0);
  for (double a : {0.0, 1.0, 2.0})
    CHECK(fgt_index(broke, z, a).value == 1.0);
  // alpha = 0 is an exact headcount ratio
  const std::vector<double> mixed{0, 100, 699.999, 700, 701, 2000, 10};
  const auto h = fgt_index(mixed, z, 0);
  CHECK(h.value == 4.0 / 7.0);
  CHECK(h.poor_count == 4);
}

TEST_CASE("fgt_index errors") {
  const PovertyLine z(700);
  const std::vector<double> y{1, 2};
  const std::vector<double> zero_w{0, 0};
  const std::vector<double> short_w{1};
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind([&] { fgt_index(std::vector<double>{}, z, 0); }) == ErrorKind::EmptyDataset);
  CHECK(kind([&] { fgt_index(y, zero_w, z, 0); }) == ErrorKind::DegenerateWeights);
  CHECK(kind([&] { fgt_index(y, z, -1); }) == ErrorKind::Parameter);
  CHECK(kind([&] { fgt_index(y, short_w, z, 1); }) == ErrorKind::Parameter);
  CHECK(kind([&] { fgt_index(std::vector<double>{-5, 10}, z, 1); }) == ErrorKind::Parameter);
}

TEST_CASE("unit-weight path bit-matches the weighted path") {
  std::mt19937_64 rng(5);
  const PovertyLine z(700);
  for (int t = 0; t < 50; ++t) {
    const auto y = random_incomes(rng, 1 + t * 3);
    const std::vector<double> ones(y.size(), 1.0);
    for (double a : {0.0, 1.0, 2.0, 1.5})
      CHECK(fgt_index(y, z, a).value == fgt_index(y, ones, z, a).value);
  }
}

TEST_CASE("fgt_index matches the naive loop and is monotone in alpha") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> wd(0.1, 3.0);
  const PovertyLine z(700);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(t % 50);
    const auto y = random_incomes(rng, n);
    std::vector<double> w(n, 1.0);
    if (t % 2)
      for (auto& x : w)
        x = wd(rng);
    double prev = 2.0;
    for (int a : {0, 1, 2}) {
      const double v = fgt_index(y, w, z, a).value;
      CHECK(std::fabs(v - oracle::fgt_loop(y, w, z.z(), a)) <= 1e-12);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("FGT axioms: scale, replication, anonymity, augmentation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> extra(0.0, 300.0);
  for (int t = 0; t < 100; ++t) {
    const auto y = random_incomes(rng, 30);
    const PovertyLine z(700);
    const double c = 0.37 + t * 0.11;
    std::vector<double> scaled;
    for (double v : y)
      scaled.push_back(v * c);
    std::vector<double> twice = y;
    twice.insert(twice.end(), y.begin(), y.end());
    std::vector<double> reversed(y.rbegin(), y.rend());
    std::vector<double> more = y;
    for (auto& v : more)
      v += extra(rng);

    for (double a : {0.0, 1.0, 2.0}) {
      const double base = fgt_index(y, z, a).value;
      CHECK(std::fabs(fgt_index(scaled, PovertyLine(700 * c), a).value - base) <= 1e-12);
      CHECK(std::fabs(fgt_index(twice, z, a).value - base) <= 1e-12);
      CHECK(std::fabs(fgt_index(reversed, z, a).value - base) <= 1e-12);
      CHECK(fgt_index(more, z, a).value <= base);
    }
  }
}

TEST_CASE("percent_change") {
  CHECK(*percent_change(0.4094, 0.2336) == doctest::Approx(-42.9409).epsilon(1e-6));
  CHECK(*percent_change(0.1032, 0.0344) == doctest::Approx(-66.6667).epsilon(1e-6));
  CHECK_FALSE(percent_change(0.0, 0.1).has_value());
  CHECK(*percent_change(0.2, 0.2) == 0.0);
}

TEST_CASE("poverty_table layout and base handling") {
  // farm, nonfarm, transfer per household
  const auto data = testgen::dataset_from({{350, 0, 0}, {700, 0, 0}, {1050, 0, 0}, {140, 600, 50}});
  const auto table = poverty_table(data, canonical_bundles(), PovertyLine(700), {0, 1, 2});
  REQUIRE(table.rows.size() == 3);
  REQUIRE(table.bundles.size() == 4);
  CHECK(table.bundles.front() == "farm");
  for (const auto& row : table.rows) {
    CHECK(row.indices.size() == 4);
    CHECK(row.pct_change.size() == 3);
  }
  CHECK(table.rows[0].indices[0].value == 0.5);
  CHECK(table.rows[1].indices[0].value == doctest::Approx(0.325));
  // adding non-farm lifts household 4 out of poverty: P0 0.5 -> 0.25
  CHECK(table.rows[0].indices[1].value == 0.25);
  CHECK(*table.rows[0].pct_change[0] == doctest::Approx(-50.0));

  SUBCASE("base moved to the front") {
    auto bundles = canonical_bundles();
    std::swap(bundles[0], bundles[3]);
    const auto t = poverty_table(data, bundles, PovertyLine(700), {0});
    CHECK(t.bundles.front() == "farm");
  }
  SUBCASE("missing base") {
    auto bundles = canonical_bundles();
    bundles.erase(bundles.begin());
    CHECK_THROWS_AS(poverty_table(data, bundles, PovertyLine(700), {0}), Error);
  }
  SUBCASE("null percent change when the base index is zero") {
    const auto rich = testgen::dataset_from({{800, 10, 0}, {900, 0, 5}});
    const auto t = poverty_table(rich, canonical_bundles(), PovertyLine(700), {0, 1, 2});
    for (const auto& row : t.rows)
      for (const auto& p : row.pct_change)
        CHECK_FALSE(p.has_value());
  }
}
