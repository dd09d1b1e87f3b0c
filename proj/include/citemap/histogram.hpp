#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace citemap {

/// Bin layout for citation histograms: bins [l, l + width) starting at 0.
struct BinningSpec {
  std::uint64_t bin_width = 1;
  /// Upper cap l_n. Counts >= max_bin fall into an overflow bin when
  /// include_overflow is set, and are dropped otherwise.
  std::optional<std::uint64_t> max_bin;
  bool include_overflow = false;

  /// Throws ConfigError if width is 0 or max_bin is not a positive multiple of width.
  void validate() const;
};

/// Citation-count histogram holding exact integer counts; probabilities are
/// derived on demand as count / n_samples.
class CitationHistogram {
 public:
  CitationHistogram() = default;

  /// Bins start at `first_edge` and are spaced by `bin_width`. When
  /// `overflow` is set the last bin is open-ended.
  CitationHistogram(std::uint64_t first_edge, std::uint64_t bin_width,
                    std::vector<std::uint64_t> counts, bool overflow = false,
                    std::string label = {});

  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::uint64_t bin_width() const { return width_; }
  std::uint64_t first_edge() const { return first_; }
  std::uint64_t lower_edge(std::size_t i) const { return first_ + i * width_; }
  /// nullopt for the overflow bin.
  std::optional<std::uint64_t> upper_edge(std::size_t i) const;
  bool has_overflow() const { return overflow_; }
  bool is_overflow_bin(std::size_t i) const { return overflow_ && i + 1 == counts_.size(); }

  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t n_samples() const { return n_samples_; }
  /// Samples discarded above max_bin when overflow was off.
  std::uint64_t n_dropped() const { return dropped_; }

  double probability(std::size_t i) const;
  std::vector<double> probabilities() const;
  /// Probability of the bin containing `value`; 0 outside the grid.
  double probability_at(std::uint64_t value) const;
  /// Sum of l_i * p_i, using the lower edge as the overflow bin's value.
  double mean_lower_edge() const;

  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }
  void set_dropped(std::uint64_t dropped) { dropped_ = dropped; }

  friend bool operator==(const CitationHistogram&, const CitationHistogram&) = default;

 private:
  std::uint64_t first_ = 0;
  std::uint64_t width_ = 1;
  std::vector<std::uint64_t> counts_;
  bool overflow_ = false;
  std::uint64_t n_samples_ = 0;
  std::uint64_t dropped_ = 0;
  std::string label_;
};

/// Tallies counts into bins spanning 0 through the maximum observed value
/// (or through max_bin). Throws DataError on an empty input.
CitationHistogram build_histogram(std::span<const std::uint64_t> citation_counts,
                                  const BinningSpec& spec = {}, std::string label = {});

/// Re-expresses both histograms over the union of their bin ranges, padding
/// with zero-count bins. Throws DataError on mismatched width, misaligned
/// edges or differing overflow layouts.
std::pair<CitationHistogram, CitationHistogram> align_support(const CitationHistogram& p,
                                                              const CitationHistogram& q);

/// Columns l_lower, l_upper, count, probability. Overflow upper edge is "inf".
void write_histogram_csv(std::ostream& out, const CitationHistogram& hist, bool header = true);

}  // namespace citemap
