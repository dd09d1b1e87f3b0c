#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citemap/heliomap.hpp"

using namespace citemap;

namespace {

PublisherStats pub(std::string name, std::uint64_t nr, double avg,
                   std::vector<std::uint64_t> hist = {1}, std::uint64_t issn_only = 0) {
  PublisherStats s;
  s.publisher = std::move(name);
  s.nr_bc = nr;
  s.citation_average = avg;
  s.total_citations = static_cast<std::uint64_t>(avg * static_cast<double>(nr));
  s.issn_only = issn_only;
  s.histogram = CitationHistogram(0, 1, std::move(hist));
  return s;
}

InfoGainResult gain(std::string label, double g) {
  InfoGainResult r;
  r.input_label = std::move(label);
  r.gain = g;
  return r;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

const CitationHistogram kDisc(0, 1, {80, 10, 5, 3, 2}, false, "SCI");

}  // namespace

TEST_CASE("three publishers: angles and radii") {
  std::vector<PublisherStats> st = {pub("Low", 30, 1.0), pub("High", 10, 3.0), pub("Mid", 20, 2.0)};
  std::vector<InfoGainResult> g = {gain("High", 0.1), gain("Mid", 0.2), gain("Low", 0.4)};
  auto l = layout_map(kDisc, st, g);
  REQUIRE(l.dots.size() == 3);
  CHECK(l.center_label == "SCI");
  CHECK(l.dots[0].label == "High");
  CHECK(l.dots[1].label == "Mid");
  CHECK(l.dots[2].label == "Low");
  CHECK(l.dots[0].angle == 0.0);
  CHECK(l.dots[1].angle == doctest::Approx(120.0));
  CHECK(l.dots[2].angle == doctest::Approx(240.0));
  CHECK(l.dots[0].radius == doctest::Approx(120.0));
  CHECK(l.dots[1].radius == doctest::Approx(180.0));
  CHECK(l.dots[2].radius == doctest::Approx(300.0));
  CHECK(l.dots[2].area == doctest::Approx(2400.0));
  CHECK(l.dots[0].area == doctest::Approx(800.0));
}

TEST_CASE("single publisher sits at 0 degrees on the outer ring") {
  std::vector<PublisherStats> st = {pub("Only", 5, 1.0)};
  std::vector<InfoGainResult> g = {gain("Only", 0.3)};
  auto l = layout_map(kDisc, st, g);
  REQUIRE(l.dots.size() == 1);
  CHECK(l.dots[0].angle == 0.0);
  CHECK(l.dots[0].radius == doctest::Approx(300.0));
}

TEST_CASE("all-zero gains collapse to the inner ring") {
  std::vector<PublisherStats> st = {pub("A", 5, 1.0), pub("B", 4, 2.0)};
  std::vector<InfoGainResult> g = {gain("A", 0.0), gain("B", 0.0)};
  auto l = layout_map(kDisc, st, g);
  for (const auto& d : l.dots) CHECK(d.radius == 60.0);
}

TEST_CASE("layout errors") {
  std::vector<PublisherStats> none;
  std::vector<InfoGainResult> g;
  CHECK_THROWS_AS(layout_map(kDisc, none, g), DataError);
  std::vector<PublisherStats> st = {pub("Named", 5, 1.0)};
  try {
    layout_map(kDisc, st, g);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("Named") != std::string::npos);
  }
}

TEST_CASE("excluded publishers leave the map but are kept aside") {
  std::vector<PublisherStats> st = {pub("Big", 50, 1.0), pub("Serial", 40, 9.0), pub("Small", 10, 2.0)};
  std::vector<InfoGainResult> g = {gain("Big", 0.1), gain("Serial", 3.0), gain("Small", 0.2)};
  MapConfig c;
  c.excluded = {"Serial"};
  auto l = layout_map(kDisc, st, g, c);
  REQUIRE(l.dots.size() == 2);
  for (const auto& d : l.dots) CHECK(d.label != "Serial");
  REQUIRE(l.excluded.size() == 1);
  CHECK(l.excluded[0].excluded_outlier);
  CHECK(l.dots[0].label == "Small");
  CHECK(l.dots[1].radius == doctest::Approx(180.0));
}

TEST_CASE("top-k after exclusion") {
  std::vector<PublisherStats> st;
  std::vector<InfoGainResult> g;
  for (int i = 0; i < 12; ++i) {
    const std::string n = "P" + std::to_string(10 + i);
    st.push_back(pub(n, 100 - i, 0.1 * i));
    g.push_back(gain(n, 0.01 * (i + 1)));
  }
  MapConfig c;
  CHECK(layout_map(kDisc, st, g, c).dots.size() == 12);
  c.top_k = 5;
  auto l = layout_map(kDisc, st, g, c);
  REQUIRE(l.dots.size() == 5);
  for (const auto& d : l.dots) CHECK(d.nr_bc >= 96);
}

TEST_CASE("layout invariants over random inputs") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 18);
    std::vector<PublisherStats> st;
    std::vector<InfoGainResult> g;
    for (int i = 0; i < n; ++i) {
      const std::string name = "pub" + std::to_string(i);
      st.push_back(pub(name, 1 + rng() % 5000, std::round(u(rng) * 40) / 10.0));
      g.push_back(gain(name, u(rng) * 2.0));
    }
    MapConfig c;
    c.radius_scale = trial % 2 ? RadiusScale::Log : RadiusScale::Linear;
    auto l = layout_map(kDisc, st, g, c);
    std::uint64_t nr_max = 0;
    for (const auto& d : l.dots) nr_max = std::max(nr_max, d.nr_bc);
    for (std::size_t i = 0; i < l.dots.size(); ++i) {
      const auto& d = l.dots[i];
      CHECK(d.angle == doctest::Approx(360.0 * static_cast<double>(i) / static_cast<double>(n)));
      CHECK(d.radius >= c.r_min);
      CHECK(d.radius <= c.r_max + 1e-9);
      CHECK(std::fabs(d.area / c.area_max - static_cast<double>(d.nr_bc) / static_cast<double>(nr_max)) <= 1e-9);
      if (i > 0) CHECK(l.dots[i - 1].citation_average >= d.citation_average);
      for (const auto& e : l.dots) {
        if (d.gain < e.gain) CHECK(d.radius <= e.radius);
      }
    }
  }
}

TEST_CASE("colour bands follow gain quartiles") {
  std::vector<PublisherStats> st;
  std::vector<InfoGainResult> g;
  for (int i = 0; i < 8; ++i) {
    const std::string n = "Q" + std::to_string(i);
    st.push_back(pub(n, 10, 1.0 * i));
    g.push_back(gain(n, 0.1 * (i + 1)));
  }
  auto l = layout_map(kDisc, st, g);
  int lowest = 4;
  int highest = -1;
  for (const auto& d : l.dots) {
    CHECK(d.color_band >= 0);
    CHECK(d.color_band <= 3);
    if (d.gain == doctest::Approx(0.1)) lowest = d.color_band;
    if (d.gain == doctest::Approx(0.8)) highest = d.color_band;
  }
  CHECK(lowest == 0);
  CHECK(highest == 3);
}

TEST_CASE("polar coordinates") {
  auto p = polar_to_screen(400, 400, 100, 90);
  CHECK(p.x == doctest::Approx(500.0));
  CHECK(p.y == doctest::Approx(400.0));
  auto top = polar_to_screen(400, 400, 100, 0);
  CHECK(top.x == doctest::Approx(400.0));
  CHECK(top.y == doctest::Approx(300.0));
}

TEST_CASE("svg structure") {
  std::vector<PublisherStats> st = {pub("Low", 30, 1.0), pub("High", 10, 3.0), pub("Mid & Co", 20, 2.0)};
  std::vector<InfoGainResult> g = {gain("High", 0.1), gain("Mid & Co", 0.2), gain("Low", 0.4)};
  auto l = layout_map(kDisc, st, g);
  const auto svg = render_svg(l);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(count_of(svg, "class=\"dot\"") == 3);
  CHECK(count_of(svg, "class=\"center\"") == 1);
  CHECK(svg.find("Mid &amp; Co") != std::string::npos);
  CHECK(svg == render_svg(l));

  // The 120 degree dot (Mid) at radius 180: 400 + 180 sin 120 = 555.88, 400 - 180 cos 120 = 490.
  CHECK(svg.find("cx=\"555.88\" cy=\"490.00\"") != std::string::npos);

  HelioLayout empty;
  CHECK_THROWS_AS(render_svg(empty), DataError);
}

TEST_CASE("svg dot at 90 degrees sits right of the centre") {
  std::vector<PublisherStats> st;
  std::vector<InfoGainResult> g;
  for (int i = 0; i < 4; ++i) {
    const std::string n = std::string(1, static_cast<char>('A' + i));
    st.push_back(pub(n, 10, 4.0 - i));
    g.push_back(gain(n, 0.5));
  }
  auto l = layout_map(kDisc, st, g);
  REQUIRE(l.dots[1].angle == 90.0);
  const auto svg = render_svg(l);
  CHECK(svg.find("cx=\"700.00\" cy=\"400.00\"") != std::string::npos);
}

TEST_CASE("outlier flags") {
  // The discipline reaches its 99th percentile in the bin at 3 citations.
  CitationHistogram disc(0, 1, std::vector<std::uint64_t>{900, 60, 25, 10, 5}, false, "SCI");
  std::vector<PublisherStats> st = {
      pub("Normal", 100, 0.2, {90, 6, 3, 1, 0}),
      pub("Also", 100, 0.2, {91, 6, 2, 1, 0}),
      pub("Third", 100, 0.2, {89, 7, 2, 1, 1}),
      pub("Serial", 10, 20.0, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 9}, 8),
      pub("Issn", 4, 0.2, {4}, 3),
  };
  std::vector<InfoGainResult> g = {gain("Normal", 0.01), gain("Also", 0.012), gain("Third", 0.02),
                                   gain("Serial", 4.0), gain("Issn", 0.015)};
  auto flags = flag_outliers(disc, st, g);
  REQUIRE(flags.size() == 2);
  CHECK(flags[0].label == "Serial");
  CHECK(flags[0].reasons.size() == 2);
  CHECK(flags[1].label == "Issn");
  CHECK(flags[1].reasons.size() == 1);
  CHECK(flags[1].reasons[0].find("ISSN") != std::string::npos);

  // A publisher with the discipline's own distribution has zero gain.
  std::vector<PublisherStats> same = {pub("Twin", 1000, 0.2, {900, 60, 25, 10, 5})};
  std::vector<InfoGainResult> zero = {gain("Twin", 0.0)};
  CHECK(flag_outliers(disc, same, zero).empty());
}

TEST_CASE("layout json") {
  std::vector<PublisherStats> st = {pub("A", 3, 2.0), pub("B", 1, 1.0)};
  std::vector<InfoGainResult> g = {gain("A", 0.1), gain("B", 0.2)};
  std::ostringstream out;
  write_layout_json(out, layout_map(kDisc, st, g));
  auto j = nlohmann::json::parse(out.str());
  CHECK(j["dots"].size() == 2);
  CHECK(j["dots"][0]["label"] == "A");
}
