#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citemap/common.hpp"
#include "citemap/lotka.hpp"
#include "oracles.hpp"

using namespace citemap;

namespace {

LotkaFit make_fit(double c, double alpha) {
  LotkaFit f;
  f.c = c;
  f.alpha = alpha;
  return f;
}

std::vector<TailPoint> exact_tail(double alpha, int max_n) {
  std::vector<TailPoint> pts;
  double z = 0.0;
  for (int n = 1; n <= max_n; ++n) z += std::pow(n, -alpha);
  for (int n = 1; n <= max_n; ++n) pts.push_back({static_cast<double>(n), std::pow(n, -alpha) / z, 1.0});
  return pts;
}

}  // namespace

TEST_CASE("predict") {
  CHECK(lotka_predict(make_fit(0.1, 2.0), 1) == 0.1);
  CHECK(lotka_predict(make_fit(0.1, 2.0), 2) == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(lotka_predict(make_fit(0.12, 1.5), 3) == doctest::Approx(0.0230940107675850306).epsilon(1e-14));
  CHECK_THROWS_AS(lotka_predict(make_fit(0.1, 2.0), 0), ConfigError);
}

TEST_CASE("exact 1/n^2 tail is recovered by every method") {
  const auto pts = exact_tail(2.0, 100);
  for (auto m : {LotkaMethod::LogLog, LotkaMethod::LogLogUnweighted, LotkaMethod::Anchored,
                 LotkaMethod::MaximumLikelihood}) {
    auto f = fit_lotka_points(pts, m);
    CHECK(std::fabs(f.alpha - 2.0) <= 1e-9);
    CHECK(f.c == doctest::Approx(pts[0].p).epsilon(1e-9));
    CHECK(f.fit_error <= 1e-9);
    CHECK(f.n_points == 100);
  }
}

TEST_CASE("anchored fit uses the observed single-citation share") {
  // Tail shares chosen so that p(1) = 0.12 exactly.
  CitationHistogram h(0, 1, {80, 12, 5, 2, 1});
  LotkaOptions o;
  o.method = LotkaMethod::Anchored;
  auto f = fit_lotka(h, o);
  CHECK(f.c == doctest::Approx(0.12).epsilon(1e-15));
  REQUIRE(f.c_observed.has_value());
  CHECK(*f.c_observed == doctest::Approx(0.12));
}

TEST_CASE("three-point hand regression") {
  // Tail points (1, 8/23), (2, 4/23), (4, 1/23): slope -1.5 in log-log space,
  // intercept (19/6) ln 2 - ln 23.
  CitationHistogram h(0, 1, {10, 8, 4, 0, 1});
  LotkaOptions o;
  o.method = LotkaMethod::LogLogUnweighted;
  auto f = fit_lotka(h, o);
  CHECK(f.n_points == 3);
  CHECK(f.alpha == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.c == doctest::Approx(0.39042158202065147).epsilon(1e-14));

  auto rows = fit_report(h, f);
  REQUIRE(rows.size() == 4);
  const double expected[] = {-0.04259549506412973, 0.03587816939406961, -0.07513666849235423,
                             -0.005324436883016217};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].n == i + 1);
    CHECK(rows[i].residual == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(rows[i].residual == doctest::Approx(rows[i].observed - rows[i].predicted));
  }
}

TEST_CASE("too few tail points") {
  CHECK_THROWS_AS(fit_lotka(CitationHistogram(0, 1, {10, 3})), DataError);
  CHECK_THROWS_AS(fit_lotka(CitationHistogram(0, 1, {10, 0, 0})), DataError);
}

TEST_CASE("shallow tails are flagged, not clamped") {
  std::vector<TailPoint> pts = exact_tail(0.5, 20);
  auto f = fit_lotka_points(pts);
  CHECK(f.alpha == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.alpha_out_of_range);
}

TEST_CASE("exact power law gives vanishing residuals") {
  const auto pts = exact_tail(2.5, 40);
  std::vector<std::uint64_t> counts = {0};
  for (const auto& p : pts) counts.push_back(static_cast<std::uint64_t>(std::llround(p.p * 1e12)));
  CitationHistogram h(0, 1, counts);
  auto f = fit_lotka(h);
  for (const auto& row : fit_report(h, f)) CHECK(std::fabs(row.residual) < 1e-9);
}

TEST_CASE("noisy samples fit with bounded log error") {
  auto draws = oracle::zipf_samples(2.0, 200, 20000, 17);
  std::vector<std::uint64_t> counts(201, 0);
  for (auto v : draws) ++counts[v];
  CitationHistogram h(0, 1, counts);
  auto f = fit_lotka(h);
  CHECK(f.fit_error > 0.0);
  CHECK(f.fit_error < 1.5);
  CHECK(std::fabs(f.alpha - 2.0) < 0.15);
}

TEST_CASE("scaling all tail counts leaves alpha unchanged") {
  std::mt19937 rng(31);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint64_t> counts(3 + rng() % 30);
    for (auto& c : counts) c = rng() % 100;
    counts[1] = 1 + rng() % 100;
    counts[2] = 1 + rng() % 100;
    const std::uint64_t k = 2 + rng() % 9;
    auto scaled = counts;
    for (auto& c : scaled) c *= k;
    for (auto m : {LotkaMethod::LogLog, LotkaMethod::LogLogUnweighted, LotkaMethod::Anchored,
                   LotkaMethod::MaximumLikelihood}) {
      LotkaOptions o;
      o.method = m;
      auto a = fit_lotka(CitationHistogram(0, 1, counts), o);
      auto b = fit_lotka(CitationHistogram(0, 1, scaled), o);
      CHECK(a.alpha == doctest::Approx(b.alpha).epsilon(1e-9));
      CHECK(a.c == doctest::Approx(b.c).epsilon(1e-9));
    }
  }
}

TEST_CASE("min_count drops sparse bins") {
  CitationHistogram h(0, 1, {10, 8, 4, 0, 1});
  CHECK(tail_points(h, 1).size() == 3);
  CHECK(tail_points(h, 2).size() == 2);
  CHECK(tail_points(h, 1)[0].weight == 8.0);
}

TEST_CASE("serialized fit") {
  CitationHistogram h(0, 1, {10, 8, 4, 0, 1});
  auto f = fit_lotka(h);
  std::ostringstream out;
  write_lotka_json(out, f, fit_report(h, f));
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["method"] == "loglog");
  CHECK(j["report"].size() == 4);
  CHECK(parse_lotka_method("mle") == LotkaMethod::MaximumLikelihood);
  CHECK_THROWS_AS(parse_lotka_method("bogus"), ConfigError);
}
