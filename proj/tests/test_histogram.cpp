#include <doctest.h>

#include <random>
#include <sstream>

#include "citemap/common.hpp"
#include "citemap/histogram.hpp"

using namespace citemap;

TEST_CASE("histogram of a point mass") {
  const std::vector<std::uint64_t> c = {5, 5, 5, 5};
  auto h = build_histogram(c);
  CHECK(h.n_samples() == 4);
  CHECK(h.probability_at(5) == 1.0);
  for (std::uint64_t v = 0; v < 5; ++v) CHECK(h.probability_at(v) == 0.0);
}

TEST_CASE("histogram of [0,0,1,2]") {
  const std::vector<std::uint64_t> c = {0, 0, 1, 2};
  auto h = build_histogram(c);
  REQUIRE(h.size() == 3);
  CHECK(h.probabilities() == std::vector<double>{0.5, 0.25, 0.25});
  CHECK(h.lower_edge(2) == 2);
  CHECK(h.upper_edge(2) == 3u);
}

TEST_CASE("empty citation list is an error") {
  CHECK_THROWS_AS(build_histogram(std::span<const std::uint64_t>{}), DataError);
}

TEST_CASE("wider bins and overflow") {
  const std::vector<std::uint64_t> c = {0, 1, 2, 3, 4, 9, 30};
  BinningSpec spec;
  spec.bin_width = 2;
  auto h = build_histogram(c, spec);
  CHECK(h.lower_edge(1) == 2);
  CHECK(h.count(0) == 2);
  CHECK(h.count(1) == 2);
  CHECK(h.count(15) == 1);

  spec.max_bin = 4;
  spec.include_overflow = true;
  auto o = build_histogram(c, spec);
  REQUIRE(o.has_overflow());
  CHECK(o.size() == 3);
  CHECK(o.count(2) == 3);
  CHECK(o.lower_edge(2) == 4);
  CHECK_FALSE(o.upper_edge(2).has_value());
  CHECK(o.n_samples() == 7);

  spec.include_overflow = false;
  auto d = build_histogram(c, spec);
  CHECK(d.size() == 2);
  CHECK(d.n_samples() == 4);
  CHECK(d.n_dropped() == 3);

  BinningSpec bad;
  bad.bin_width = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("probabilities sum to one and bins are contiguous") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> c(1 + rng() % 200);
    for (auto& v : c) v = rng() % 2 ? 0 : rng() % 60;
    BinningSpec spec;
    spec.bin_width = 1 + rng() % 4;
    auto h = build_histogram(c, spec);
    double s = 0.0;
    for (double p : h.probabilities()) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < h.size(); ++i) CHECK(*h.upper_edge(i) == h.lower_edge(i + 1));
    CHECK(h.n_samples() == c.size());
  }
}

TEST_CASE("align_support") {
  CitationHistogram p(0, 1, {1, 1, 1, 1});
  CitationHistogram q(0, 1, {1, 1, 1, 1, 1, 1});
  auto [pa, qa] = align_support(p, q);
  CHECK(pa.size() == 6);
  CHECK(pa.count(4) == 0);
  CHECK(pa.count(5) == 0);
  CHECK(qa == q);

  auto [same_p, same_q] = align_support(p, p);
  CHECK(same_p == p);
  CHECK(same_q == p);

  CitationHistogram r(2, 1, {1, 2, 3});
  CitationHistogram s(0, 1, {4, 3, 2, 1});
  auto [ra, sa] = align_support(r, s);
  CHECK(ra.first_edge() == 0);
  CHECK(sa.first_edge() == 0);
  CHECK(ra.size() == 5);
  CHECK(sa.size() == 5);
  CHECK(ra.count(0) == 0);
  CHECK(ra.count(4) == 3);
  CHECK(sa.count(4) == 0);
  CHECK(ra.probabilities()[2] == r.probabilities()[0]);

  CitationHistogram w(0, 2, {1, 1});
  CHECK_THROWS_AS(align_support(p, w), DataError);
}

TEST_CASE("csv output marks the overflow edge") {
  CitationHistogram h(0, 1, {2, 1, 1}, true);
  std::ostringstream out;
  write_histogram_csv(out, h);
  CHECK(out.str() == "l_lower,l_upper,count,probability\n0,1,2,0.5\n1,2,1,0.25\n2,inf,1,0.25\n");
}
