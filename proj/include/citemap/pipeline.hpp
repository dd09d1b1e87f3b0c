#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "citemap/corpus.hpp"
#include "citemap/heliomap.hpp"
#include "citemap/histogram.hpp"
#include "citemap/indicators.hpp"
#include "citemap/infogain.hpp"
#include "citemap/lotka.hpp"

namespace citemap {

/// Fully resolved settings for one analysis run.
struct RunConfig {
  std::vector<std::filesystem::path> records;
  std::optional<std::filesystem::path> aliases;
  std::optional<std::filesystem::path> categories;
  /// Empty means every discipline present in the corpus.
  std::vector<Discipline> disciplines;
  std::size_t top_k = 20;
  InfoGainOptions gain;
  std::string log_base_label = "nats";
  BinningSpec binning;
  LotkaOptions lotka;
  StddevKind stddev = StddevKind::Population;
  OutlierConfig outliers;
  /// Publishers kept off every map; never filled automatically.
  std::set<std::string> exclude;
  MapConfig map;
  SvgStyle style;
  std::filesystem::path output_dir = "citemap-out";
  std::size_t jobs = 1;

  /// Throws ConfigError on bad values or missing input files.
  void validate() const;
};

/// Reads keys present in `j` on top of `base`. Throws ConfigError on bad types or values.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

/// Loads aliases and categories named by the config (defaults when absent) and ingests the records.
Corpus load_corpus(const RunConfig& config);

/// Everything computed for one discipline ahead of fitting and mapping.
struct DisciplineAnalysis {
  Discipline discipline = Discipline::Science;
  CitationHistogram histogram;
  std::vector<PublisherStats> stats;      // all publishers, by volume
  std::vector<PublisherStats> selection;  // top-k non-excluded plus excluded ones present
  GainRanking ranking;                    // over the selection
  std::vector<OutlierFlag> flags;
};

/// Throws DataError when the discipline holds no records or a gain fails.
DisciplineAnalysis analyze_discipline(std::span<const CitationRecord> records, Discipline d,
                                      const RunConfig& config);

/// Columns rank, label, gain, citation_average, nr_bc, smoothing_applied, excluded.
void write_gain_ranking_csv(std::ostream& out, const DisciplineAnalysis& analysis,
                            const std::set<std::string>& excluded);

/// Histogram rows prefixed with a publisher column.
void write_publisher_histograms_csv(std::ostream& out, std::span<const PublisherStats> stats);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

struct PipelineResult {
  nlohmann::json manifest;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::pair<Discipline, OutlierFlag>> flags;
  std::vector<Diagnostic> diagnostics;
};

/// Runs ingest through map rendering for each selected discipline and writes
/// per-discipline artifacts plus manifest.json under config.output_dir. Files
/// are written only once every step has succeeded; on failure the manifest
/// records status "failed" and the error is rethrown.
PipelineResult run_pipeline(const RunConfig& config);

/// Names of the per-discipline artifact files, in manifest order.
const std::vector<std::string>& discipline_artifact_names();

}  // namespace citemap
