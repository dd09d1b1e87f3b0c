#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "citemap/histogram.hpp"
#include "citemap/indicators.hpp"
#include "citemap/infogain.hpp"

namespace citemap {

enum class RadiusScale { Linear, Log };

struct MapConfig {
  std::size_t top_k = 20;
  double r_min = 60.0;
  double r_max = 300.0;
  double area_max = 2400.0;  // display area of the largest publisher's dot
  RadiusScale radius_scale = RadiusScale::Linear;
  /// Publishers left off the map. They still appear in HelioLayout::excluded.
  std::set<std::string> excluded;
};

struct HelioDot {
  std::string label;
  double angle = 0.0;  // degrees clockwise from 12 o'clock
  double radius = 0.0;
  double area = 0.0;
  int color_band = 0;  // 0 (lowest gain quartile) .. 3
  double gain = 0.0;
  double citation_average = 0.0;
  std::uint64_t nr_bc = 0;
  bool excluded_outlier = false;
};

/// Publishers around a discipline: the highest citation average sits at
/// 0 degrees and averages decrease clockwise, with equal angular spacing.
/// Radius grows with information gain and dot area with chapter count.
struct HelioLayout {
  std::string center_label;
  std::vector<HelioDot> dots;
  /// Excluded publishers, flagged excluded_outlier; angle and radius are zero.
  std::vector<HelioDot> excluded;
  /// Quartile thresholds of the mapped gains; band = thresholds strictly below the gain.
  std::array<double, 3> band_thresholds{};
  MapConfig config;
};

/// `stats` is the discipline's publisher_stats; `gains` must hold a result
/// (by input_label) for every publisher that lands on the map. Throws
/// DataError on empty stats or a missing gain, ConfigError on a bad config.
HelioLayout layout_map(const CitationHistogram& discipline_hist,
                       std::span<const PublisherStats> stats,
                       std::span<const InfoGainResult> gains, const MapConfig& config = {});

struct OutlierConfig {
  /// Gain must exceed this multiple of the median gain ...
  double gain_factor = 5.0;
  /// ... while the publisher puts at least this much probability ...
  double tail_probability = 0.01;
  /// ... above the discipline's citation bin at this quantile.
  double discipline_quantile = 0.99;
};

struct OutlierFlag {
  std::string label;
  std::vector<std::string> reasons;
};

/// Advisory flags for serial-like publishers: (a) most records are ISSN-only,
/// or (b) an outsized gain together with a heavy tail beyond the discipline's
/// upper quantile. Flags never exclude anything on their own.
std::vector<OutlierFlag> flag_outliers(const CitationHistogram& discipline_hist,
                                       std::span<const PublisherStats> stats,
                                       std::span<const InfoGainResult> gains,
                                       const OutlierConfig& config = {});

struct SvgStyle {
  int width = 800;
  int height = 800;
  std::array<std::string, 4> palette = {"#2c7bb6", "#abd9e9", "#fdae61", "#d7191c"};
  std::string background = "#ffffff";
  std::string font_family = "sans-serif";
  int font_size = 11;
  bool labels = true;
};

/// Standalone SVG. Dots use class "dot", the centre class "center". Output
/// depends only on the arguments. Throws DataError on a layout with no dots.
std::string render_svg(const HelioLayout& layout, const SvgStyle& style = {});

/// Screen position of a polar point: angle clockwise from straight up.
struct Point {
  double x;
  double y;
};
Point polar_to_screen(double cx, double cy, double radius, double angle_deg);

void write_layout_json(std::ostream& out, const HelioLayout& layout);

}  // namespace citemap
