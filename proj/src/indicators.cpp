#include "citemap/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace citemap {

namespace {

double percent(double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; }

}  // namespace

IndicatorSet compute_indicators(std::span<const CitationRecord> records, const Scope& scope,
                                const IndicatorOptions& options) {
  IndicatorSet s;
  s.scope = scope_label(scope);
  std::vector<std::uint64_t> cites;
  std::uint64_t uncited = 0;
  for (const auto& r : records) {
    s.corpus_records += 1;
    s.corpus_citations += r.citations;
    if (!r.in_scope(scope)) continue;
    cites.push_back(r.citations);
    s.total_citations += r.citations;
    s.max_citations = std::max(s.max_citations, r.citations);
    if (r.citations == 0) ++uncited;
  }
  if (cites.empty()) throw DataError("no records in scope " + s.scope);

  s.nr_bc = cites.size();
  const double n = static_cast<double>(s.nr_bc);
  s.pct_bc_of_total = percent(n, static_cast<double>(s.corpus_records));
  s.pct_citations_of_total =
      percent(static_cast<double>(s.total_citations), static_cast<double>(s.corpus_citations));
  s.citation_average = static_cast<double>(s.total_citations) / n;
  double ss = 0.0;
  for (auto c : cites) {
    const double d = static_cast<double>(c) - s.citation_average;
    ss += d * d;
  }
  const double dof = options.stddev == StddevKind::Sample ? n - 1.0 : n;
  s.citation_stddev = dof > 0.0 ? std::sqrt(ss / dof) : 0.0;
  s.pct_non_cited = percent(static_cast<double>(uncited), n);

  auto stats = publisher_stats(records, scope);
  s.nr_publishers = stats.size();
  s.pct_bc_top = top_publishers(stats, options.top_k).coverage;
  return s;
}

std::vector<PublisherStats> publisher_stats(std::span<const CitationRecord> records,
                                            const Scope& scope, const BinningSpec& binning) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<PublisherStats> stats;
  std::vector<std::vector<std::uint64_t>> samples;
  for (const auto& r : records) {
    if (!r.in_scope(scope)) continue;
    auto [it, inserted] = index.try_emplace(r.publisher, stats.size());
    if (inserted) {
      stats.push_back({});
      stats.back().publisher = r.publisher;
      samples.emplace_back();
    }
    auto& ps = stats[it->second];
    ps.nr_bc += 1;
    ps.total_citations += r.citations;
    if (r.issn_only()) ps.issn_only += 1;
    samples[it->second].push_back(r.citations);
  }
  if (stats.empty()) throw DataError("no records in scope " + scope_label(scope));
  for (std::size_t i = 0; i < stats.size(); ++i) {
    auto& ps = stats[i];
    ps.citation_average = static_cast<double>(ps.total_citations) / static_cast<double>(ps.nr_bc);
    ps.histogram = build_histogram(samples[i], binning, ps.publisher);
  }
  std::sort(stats.begin(), stats.end(), [](const auto& a, const auto& b) {
    if (a.nr_bc != b.nr_bc) return a.nr_bc > b.nr_bc;
    return a.publisher < b.publisher;
  });
  return stats;
}

TopPublishers top_publishers(std::span<const PublisherStats> stats, std::size_t k) {
  if (k == 0) throw ConfigError("top-k must be >= 1");
  std::vector<PublisherStats> sorted(stats.begin(), stats.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.nr_bc != b.nr_bc) return a.nr_bc > b.nr_bc;
    return a.publisher < b.publisher;
  });
  std::uint64_t total = 0;
  for (const auto& s : sorted) total += s.nr_bc;
  if (sorted.size() > k) sorted.resize(k);
  std::uint64_t covered = 0;
  for (const auto& s : sorted) covered += s.nr_bc;
  return {std::move(sorted), percent(static_cast<double>(covered), static_cast<double>(total))};
}

std::map<int, YearGroup> group_by_year(std::span<const CitationRecord> records,
                                       const Scope& scope) {
  std::map<int, YearGroup> out;
  for (const auto& r : records) {
    if (!r.in_scope(scope)) continue;
    auto& g = out[r.year];
    g.nr_bc += 1;
    g.total_citations += r.citations;
  }
  return out;
}

void write_indicators_json(std::ostream& out, const std::vector<IndicatorSet>& sets) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sets) {
    nlohmann::ordered_json o;
    o["scope"] = s.scope;
    o["nr_bc"] = s.nr_bc;
    o["pct_bc_of_total"] = s.pct_bc_of_total;
    o["total_citations"] = s.total_citations;
    o["pct_citations_of_total"] = s.pct_citations_of_total;
    o["citation_average"] = s.citation_average;
    o["citation_stddev"] = s.citation_stddev;
    o["nr_publishers"] = s.nr_publishers;
    o["pct_bc_top"] = s.pct_bc_top;
    o["max_citations"] = s.max_citations;
    o["pct_non_cited"] = s.pct_non_cited;
    o["corpus_records"] = s.corpus_records;
    o["corpus_citations"] = s.corpus_citations;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

void write_indicator_table(std::ostream& out, const std::vector<IndicatorSet>& sets) {
  auto row = [&](std::string_view name, auto&& cell) {
    out << name;
    for (const auto& s : sets) out << ',' << cell(s);
    out << '\n';
  };
  auto pct = [](double v) { return format_fixed(v, 0) + "%"; };
  row("INDICATORS", [](const IndicatorSet& s) { return s.scope; });
  row("Nr BC", [](const IndicatorSet& s) { return std::to_string(s.nr_bc); });
  row("% BC From the total Database", [&](const IndicatorSet& s) { return pct(s.pct_bc_of_total); });
  row("Total Citations", [](const IndicatorSet& s) { return std::to_string(s.total_citations); });
  row("% Citations From the total Database",
      [&](const IndicatorSet& s) { return pct(s.pct_citations_of_total); });
  row("Citation Average", [](const IndicatorSet& s) { return format_fixed(s.citation_average, 2); });
  row("Citation Average Standard Deviation",
      [](const IndicatorSet& s) { return format_fixed(s.citation_stddev, 2); });
  row("Nr Academic Publishers", [](const IndicatorSet& s) { return std::to_string(s.nr_publishers); });
  row("% BC - Top Publishers", [&](const IndicatorSet& s) { return pct(s.pct_bc_top); });
  row("Nr of citation most cited BC",
      [](const IndicatorSet& s) { return std::to_string(s.max_citations); });
  row("% of Non-Cited BC", [&](const IndicatorSet& s) { return pct(s.pct_non_cited); });
}

}  // namespace citemap
