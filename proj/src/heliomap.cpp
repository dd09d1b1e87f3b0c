#include "citemap/heliomap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citemap/common.hpp"

namespace citemap {

namespace {

void validate(const MapConfig& c) {
  if (c.top_k < 1) throw ConfigError("map top-k must be >= 1");
  if (!(c.r_min >= 0.0) || !(c.r_max >= c.r_min)) throw ConfigError("map radii need 0 <= r_min <= r_max");
  if (!(c.area_max > 0.0)) throw ConfigError("map area_max must be positive");
}

// Linear-interpolated quantile of sorted values (the common "type 7" rule).
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

}  // namespace

HelioLayout layout_map(const CitationHistogram& discipline_hist,
                       std::span<const PublisherStats> stats,
                       std::span<const InfoGainResult> gains, const MapConfig& config) {
  validate(config);
  if (stats.empty()) throw DataError("map needs at least one publisher");

  std::map<std::string, double> gain_of;
  for (const auto& g : gains) gain_of[g.input_label] = g.gain;

  std::vector<const PublisherStats*> ordered;
  for (const auto& s : stats) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    if (a->nr_bc != b->nr_bc) return a->nr_bc > b->nr_bc;
    return a->publisher < b->publisher;
  });

  HelioLayout layout;
  layout.center_label = discipline_hist.label();
  layout.config = config;

  auto make_dot = [&](const PublisherStats& s) {
    auto it = gain_of.find(s.publisher);
    if (it == gain_of.end()) throw DataError("no information gain for publisher '" + s.publisher + "'");
    HelioDot d;
    d.label = s.publisher;
    d.gain = it->second;
    d.citation_average = s.citation_average;
    d.nr_bc = s.nr_bc;
    return d;
  };

  for (const auto* s : ordered) {
    if (config.excluded.count(s->publisher)) {
      HelioDot d;
      d.label = s->publisher;
      d.citation_average = s->citation_average;
      d.nr_bc = s->nr_bc;
      if (auto it = gain_of.find(s->publisher); it != gain_of.end()) d.gain = it->second;
      d.excluded_outlier = true;
      layout.excluded.push_back(std::move(d));
    } else if (layout.dots.size() < config.top_k) {
      layout.dots.push_back(make_dot(*s));
    }
  }
  if (layout.dots.empty()) throw DataError("every publisher was excluded from the map");

  std::sort(layout.dots.begin(), layout.dots.end(), [](const HelioDot& a, const HelioDot& b) {
    if (a.citation_average != b.citation_average) return a.citation_average > b.citation_average;
    return a.label < b.label;
  });

  const double m = static_cast<double>(layout.dots.size());
  double g_max = 0.0;
  double g_min_pos = 0.0;
  std::uint64_t nr_max = 0;
  std::vector<double> sorted_gains;
  for (const auto& d : layout.dots) {
    g_max = std::max(g_max, d.gain);
    if (d.gain > 0.0 && (g_min_pos == 0.0 || d.gain < g_min_pos)) g_min_pos = d.gain;
    nr_max = std::max(nr_max, d.nr_bc);
    sorted_gains.push_back(d.gain);
  }
  std::sort(sorted_gains.begin(), sorted_gains.end());
  layout.band_thresholds = {quantile(sorted_gains, 0.25), quantile(sorted_gains, 0.5),
                            quantile(sorted_gains, 0.75)};

  const double span = config.r_max - config.r_min;
  for (std::size_t j = 0; j < layout.dots.size(); ++j) {
    auto& d = layout.dots[j];
    d.angle = 360.0 * static_cast<double>(j) / m;
    double frac = 0.0;
    if (g_max > 0.0) {
      if (config.radius_scale == RadiusScale::Linear) {
        frac = d.gain / g_max;
      } else {
        frac = std::log1p(d.gain / g_min_pos) / std::log1p(g_max / g_min_pos);
      }
    }
    d.radius = config.r_min + span * frac;
    d.area = config.area_max * static_cast<double>(d.nr_bc) / static_cast<double>(nr_max);
    d.color_band = 0;
    for (double t : layout.band_thresholds) d.color_band += d.gain > t ? 1 : 0;
  }
  for (auto& d : layout.excluded) {
    d.area = config.area_max * static_cast<double>(d.nr_bc) / static_cast<double>(nr_max);
  }
  return layout;
}

std::vector<OutlierFlag> flag_outliers(const CitationHistogram& discipline_hist,
                                       std::span<const PublisherStats> stats,
                                       std::span<const InfoGainResult> gains,
                                       const OutlierConfig& config) {
  std::map<std::string, double> gain_of;
  std::vector<double> all;
  for (const auto& g : gains) {
    gain_of[g.input_label] = g.gain;
    all.push_back(g.gain);
  }
  std::sort(all.begin(), all.end());
  const double median = all.empty() ? 0.0 : quantile(all, 0.5);

  // Lower edge of the first discipline bin whose cumulative share reaches the quantile.
  std::uint64_t quantile_edge = 0;
  if (discipline_hist.n_samples() > 0) {
    const double need = config.discipline_quantile * static_cast<double>(discipline_hist.n_samples());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < discipline_hist.size(); ++i) {
      acc += discipline_hist.count(i);
      quantile_edge = discipline_hist.lower_edge(i);
      if (static_cast<double>(acc) >= need) break;
    }
  }

  std::vector<OutlierFlag> flags;
  for (const auto& s : stats) {
    OutlierFlag f{s.publisher, {}};
    if (2 * s.issn_only > s.nr_bc) {
      f.reasons.push_back("serial-like: " + std::to_string(s.issn_only) + " of " +
                          std::to_string(s.nr_bc) + " records have an ISSN and no ISBN");
    }
    if (auto it = gain_of.find(s.publisher); it != gain_of.end()) {
      double beyond = 0.0;
      const auto& h = s.histogram;
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (h.lower_edge(i) > quantile_edge) beyond += h.probability(i);
      }
      if (it->second > config.gain_factor * median && beyond >= config.tail_probability) {
        f.reasons.push_back("heavy tail: gain " + format_fixed(it->second, 4) + " exceeds " +
                            format_double(config.gain_factor) + "x the median " +
                            format_fixed(median, 4) + " with probability " +
                            format_fixed(beyond, 4) + " above " +
                            std::to_string(quantile_edge) + " citations");
      }
    }
    if (!f.reasons.empty()) flags.push_back(std::move(f));
  }
  return flags;
}

Point polar_to_screen(double cx, double cy, double radius, double angle_deg) {
  const double t = angle_deg * std::numbers::pi / 180.0;
  return {cx + radius * std::sin(t), cy - radius * std::cos(t)};
}

std::string render_svg(const HelioLayout& layout, const SvgStyle& style) {
  if (layout.dots.empty()) throw DataError("cannot render a map with no publishers");
  const double cx = style.width / 2.0;
  const double cy = style.height / 2.0;
  std::ostringstream svg;
  svg << R"(<?xml version="1.0" encoding="UTF-8"?>)" << '\n'
      << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << style.width << R"(" height=")"
      << style.height << R"(" viewBox="0 0 )" << style.width << ' ' << style.height << R"(" font-family=")"
      << xml_escape(style.font_family) << R"(" font-size=")" << style.font_size << "\">\n";
  svg << R"(  <rect x="0" y="0" width=")" << style.width << R"(" height=")" << style.height
      << R"(" fill=")" << xml_escape(style.background) << "\"/>\n";
  for (double r : {layout.config.r_min, layout.config.r_max}) {
    svg << R"(  <circle class="guide" cx=")" << num(cx) << R"(" cy=")" << num(cy) << R"(" r=")"
        << num(r) << R"(" fill="none" stroke="#cccccc" stroke-dasharray="4 4"/>)" << '\n';
  }
  svg << R"(  <circle class="center" cx=")" << num(cx) << R"(" cy=")" << num(cy)
      << R"(" r="10" fill="#333333"/>)" << '\n';
  svg << R"(  <text class="center-label" x=")" << num(cx) << R"(" y=")" << num(cy + 24)
      << R"(" text-anchor="middle">)" << xml_escape(layout.center_label) << "</text>\n";

  for (const auto& d : layout.dots) {
    const Point p = polar_to_screen(cx, cy, d.radius, d.angle);
    const double r = std::sqrt(d.area / std::numbers::pi);
    const auto band = static_cast<std::size_t>(std::clamp(d.color_band, 0, 3));
    svg << R"(  <circle class="dot" cx=")" << num(p.x) << R"(" cy=")" << num(p.y) << R"(" r=")"
        << num(r) << R"(" fill=")" << xml_escape(style.palette[band])
        << R"(" fill-opacity="0.85" stroke="#333333" stroke-width="0.5"><title>)"
        << xml_escape(d.label) << " | gain " << format_fixed(d.gain, 4) << " | average "
        << format_fixed(d.citation_average, 2) << " | chapters " << d.nr_bc
        << "</title></circle>\n";
    if (style.labels) {
      const Point t = polar_to_screen(cx, cy, d.radius + r + 6.0, d.angle);
      const double s = std::sin(d.angle * std::numbers::pi / 180.0);
      const char* anchor = s > 0.2 ? "start" : (s < -0.2 ? "end" : "middle");
      svg << R"(  <text class="dot-label" x=")" << num(t.x) << R"(" y=")" << num(t.y + 4.0)
          << R"(" text-anchor=")" << anchor << "\">" << xml_escape(d.label) << "</text>\n";
    }
  }

  // Legend: gain bands, then a size scale for the largest dot and a quarter of it.
  double y = 20.0;
  svg << R"(  <g class="legend">)" << '\n';
  svg << R"(    <text x="10" y=")" << num(y) << R"(">Information gain</text>)" << '\n';
  const auto& th = layout.band_thresholds;
  const std::array<std::string, 4> ranges = {
      "<= " + format_fixed(th[0], 4), format_fixed(th[0], 4) + " - " + format_fixed(th[1], 4),
      format_fixed(th[1], 4) + " - " + format_fixed(th[2], 4), "> " + format_fixed(th[2], 4)};
  for (std::size_t b = 0; b < 4; ++b) {
    y += 16.0;
    svg << R"(    <rect class="legend-band" x="10" y=")" << num(y - 10.0)
        << R"(" width="12" height="12" fill=")" << xml_escape(style.palette[b]) << "\"/>\n";
    svg << R"(    <text x="28" y=")" << num(y) << "\">" << xml_escape(ranges[b]) << "</text>\n";
  }
  std::uint64_t nr_max = 0;
  for (const auto& d : layout.dots) nr_max = std::max(nr_max, d.nr_bc);
  y += 28.0;
  svg << R"(    <text x="10" y=")" << num(y) << R"(">Book chapters</text>)" << '\n';
  for (double frac : {1.0, 0.25}) {
    const double r = std::sqrt(layout.config.area_max * frac / std::numbers::pi);
    y += 2.0 * r + 6.0;
    svg << R"(    <circle class="legend-size" cx=")" << num(10.0 + r) << R"(" cy=")" << num(y - r)
        << R"(" r=")" << num(r) << R"(" fill="none" stroke="#333333"/>)" << '\n';
    svg << R"(    <text x=")" << num(16.0 + 2.0 * r) << R"(" y=")" << num(y - r + 4.0) << "\">"
        << static_cast<std::uint64_t>(std::llround(static_cast<double>(nr_max) * frac))
        << "</text>\n";
  }
  svg << "  </g>\n</svg>\n";
  return svg.str();
}

void write_layout_json(std::ostream& out, const HelioLayout& layout) {
  auto dot_json = [](const HelioDot& d) {
    nlohmann::ordered_json o;
    o["label"] = d.label;
    o["angle"] = d.angle;
    o["radius"] = d.radius;
    o["area"] = d.area;
    o["color_band"] = d.color_band;
    o["gain"] = d.gain;
    o["citation_average"] = d.citation_average;
    o["nr_bc"] = d.nr_bc;
    o["excluded_outlier"] = d.excluded_outlier;
    return o;
  };
  nlohmann::ordered_json o;
  o["center"] = layout.center_label;
  o["dots"] = nlohmann::ordered_json::array();
  for (const auto& d : layout.dots) o["dots"].push_back(dot_json(d));
  o["excluded"] = nlohmann::ordered_json::array();
  for (const auto& d : layout.excluded) o["excluded"].push_back(dot_json(d));
  o["band_thresholds"] = layout.band_thresholds;
  const auto& c = layout.config;
  o["config"] = {{"top_k", c.top_k},
                 {"r_min", c.r_min},
                 {"r_max", c.r_max},
                 {"area_max", c.area_max},
                 {"radius_scale", c.radius_scale == RadiusScale::Linear ? "linear" : "log"},
                 {"excluded", c.excluded}};
  out << o.dump(2) << '\n';
}

}  // namespace citemap
