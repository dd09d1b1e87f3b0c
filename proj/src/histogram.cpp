#include "citemap/histogram.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "citemap/common.hpp"
#include "citemap/delimited.hpp"

namespace citemap {

void BinningSpec::validate() const {
  if (bin_width < 1) throw ConfigError("bin width must be >= 1");
  if (max_bin && (*max_bin == 0 || *max_bin % bin_width != 0)) {
    throw ConfigError("max_bin must be a positive multiple of the bin width");
  }
}

CitationHistogram::CitationHistogram(std::uint64_t first_edge, std::uint64_t bin_width,
                                     std::vector<std::uint64_t> counts, bool overflow,
                                     std::string label)
    : first_(first_edge),
      width_(bin_width),
      counts_(std::move(counts)),
      overflow_(overflow && !counts_.empty()),
      label_(std::move(label)) {
  if (width_ == 0) throw DataError("histogram bin width must be >= 1");
  if (first_ % width_ != 0) throw DataError("histogram first edge must lie on the bin grid");
  n_samples_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::optional<std::uint64_t> CitationHistogram::upper_edge(std::size_t i) const {
  if (is_overflow_bin(i)) return std::nullopt;
  return lower_edge(i) + width_;
}

double CitationHistogram::probability(std::size_t i) const {
  if (n_samples_ == 0) return 0.0;
  return static_cast<double>(counts_[i]) / static_cast<double>(n_samples_);
}

std::vector<double> CitationHistogram::probabilities() const {
  std::vector<double> p(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) p[i] = probability(i);
  return p;
}

double CitationHistogram::probability_at(std::uint64_t value) const {
  if (counts_.empty() || value < first_) return 0.0;
  std::size_t i = (value - first_) / width_;
  if (i >= counts_.size()) {
    if (!overflow_) return 0.0;
    i = counts_.size() - 1;
  }
  return probability(i);
}

double CitationHistogram::mean_lower_edge() const {
  double m = 0.0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    m += static_cast<double>(lower_edge(i)) * probability(i);
  }
  return m;
}

CitationHistogram build_histogram(std::span<const std::uint64_t> citation_counts,
                                  const BinningSpec& spec, std::string label) {
  spec.validate();
  if (citation_counts.empty()) {
    throw DataError("cannot build a histogram from no samples" +
                    (label.empty() ? std::string() : " (" + label + ")"));
  }
  const std::uint64_t w = spec.bin_width;
  const std::uint64_t max_seen = *std::max_element(citation_counts.begin(), citation_counts.end());
  std::size_t n_bins = static_cast<std::size_t>(max_seen / w) + 1;
  bool overflow = false;
  std::size_t capped_bins = 0;
  if (spec.max_bin) {
    capped_bins = static_cast<std::size_t>(*spec.max_bin / w);
    if (max_seen >= *spec.max_bin) {
      overflow = spec.include_overflow;
      n_bins = capped_bins + (overflow ? 1 : 0);
    }
  }
  std::vector<std::uint64_t> counts(n_bins, 0);
  std::uint64_t dropped = 0;
  for (std::uint64_t c : citation_counts) {
    if (spec.max_bin && c >= *spec.max_bin) {
      if (overflow) {
        ++counts[capped_bins];
      } else {
        ++dropped;
      }
      continue;
    }
    ++counts[static_cast<std::size_t>(c / w)];
  }
  if (dropped == citation_counts.size()) {
    throw DataError("every sample lies above max_bin" +
                    (label.empty() ? std::string() : " (" + label + ")"));
  }
  // Trailing bins above the kept maximum carry nothing when samples were dropped.
  if (!overflow) {
    while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
  }
  CitationHistogram h(0, w, std::move(counts), overflow, std::move(label));
  h.set_dropped(dropped);
  return h;
}

std::pair<CitationHistogram, CitationHistogram> align_support(const CitationHistogram& p,
                                                              const CitationHistogram& q) {
  if (p.bin_width() != q.bin_width()) {
    throw DataError("cannot align histograms with bin widths " + std::to_string(p.bin_width()) +
                    " and " + std::to_string(q.bin_width()));
  }
  if (p.empty() || q.empty()) throw DataError("cannot align an empty histogram");
  const std::uint64_t w = p.bin_width();
  auto last_edge = [](const CitationHistogram& h) { return h.lower_edge(h.size() - 1); };
  if (p.has_overflow() && q.has_overflow() && last_edge(p) != last_edge(q)) {
    throw DataError("histograms have different overflow edges");
  }
  const std::uint64_t lo = std::min(p.first_edge(), q.first_edge());
  std::uint64_t hi = std::max(last_edge(p), last_edge(q));
  const bool overflow = p.has_overflow() || q.has_overflow();
  if (overflow) {
    const auto& o = p.has_overflow() ? p : q;
    const auto& other = p.has_overflow() ? q : p;
    if (last_edge(other) > last_edge(o)) {
      throw DataError("histogram bins extend past the other histogram's overflow edge");
    }
    hi = last_edge(o);
  }
  const std::size_t n = static_cast<std::size_t>((hi - lo) / w) + 1;
  auto expand = [&](const CitationHistogram& h) {
    std::vector<std::uint64_t> c(n, 0);
    const std::size_t offset = static_cast<std::size_t>((h.first_edge() - lo) / w);
    for (std::size_t i = 0; i < h.size(); ++i) c[offset + i] = h.count(i);
    CitationHistogram out(lo, w, std::move(c), overflow, h.label());
    out.set_dropped(h.n_dropped());
    return out;
  };
  return {expand(p), expand(q)};
}

void write_histogram_csv(std::ostream& out, const CitationHistogram& hist, bool header) {
  if (header) out << "l_lower,l_upper,count,probability\n";
  for (std::size_t i = 0; i < hist.size(); ++i) {
    auto up = hist.upper_edge(i);
    out << hist.lower_edge(i) << ',' << (up ? std::to_string(*up) : std::string("inf")) << ','
        << hist.count(i) << ',' << format_double(hist.probability(i)) << '\n';
  }
}

}  // namespace citemap
