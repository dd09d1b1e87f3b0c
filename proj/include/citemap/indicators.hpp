#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "citemap/common.hpp"
#include "citemap/corpus.hpp"
#include "citemap/histogram.hpp"

namespace citemap {

enum class StddevKind { Population, Sample };

struct IndicatorOptions {
  std::size_t top_k = 20;
  StddevKind stddev = StddevKind::Population;
};

/// Descriptive indicators for one scope. Percentages are on a 0-100 scale
/// and kept at full precision.
struct IndicatorSet {
  std::string scope;
  std::uint64_t nr_bc = 0;
  double pct_bc_of_total = 0.0;  // against distinct records in the corpus
  std::uint64_t total_citations = 0;
  double pct_citations_of_total = 0.0;
  double citation_average = 0.0;
  double citation_stddev = 0.0;
  std::uint64_t nr_publishers = 0;
  double pct_bc_top = 0.0;  // share of the top_k publishers
  std::uint64_t max_citations = 0;
  double pct_non_cited = 0.0;
  /// Distinct-record totals the "% of total" fields were computed against.
  std::uint64_t corpus_records = 0;
  std::uint64_t corpus_citations = 0;
};

struct PublisherStats {
  std::string publisher;
  std::uint64_t nr_bc = 0;
  std::uint64_t total_citations = 0;
  double citation_average = 0.0;
  std::uint64_t issn_only = 0;  // records with an ISSN and no ISBN
  CitationHistogram histogram;
};

/// `records` is the whole distinct corpus; the scope picks the subset.
/// Throws DataError naming the scope when it holds no records.
IndicatorSet compute_indicators(std::span<const CitationRecord> records, const Scope& scope,
                                const IndicatorOptions& options = {});

/// One entry per publisher in scope, by nr_bc descending then name.
std::vector<PublisherStats> publisher_stats(std::span<const CitationRecord> records,
                                            const Scope& scope, const BinningSpec& binning = {});

struct TopPublishers {
  std::vector<PublisherStats> top;
  double coverage = 0.0;  // percent of the scope's chapters
};

/// `stats` must be a full publisher_stats result for one scope. k larger
/// than the publisher count returns everything. Throws ConfigError if k == 0.
TopPublishers top_publishers(std::span<const PublisherStats> stats, std::size_t k);

/// Chapter and citation totals per publication year.
struct YearGroup {
  std::uint64_t nr_bc = 0;
  std::uint64_t total_citations = 0;
};
std::map<int, YearGroup> group_by_year(std::span<const CitationRecord> records, const Scope& scope);

/// One JSON object per indicator set.
void write_indicators_json(std::ostream& out, const std::vector<IndicatorSet>& sets);

/// Rows are indicators, columns are scopes, rounded for display: integer
/// percentages and two-decimal averages.
void write_indicator_table(std::ostream& out, const std::vector<IndicatorSet>& sets);

}  // namespace citemap
