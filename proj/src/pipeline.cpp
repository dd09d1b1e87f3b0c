#include "citemap/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "citemap/delimited.hpp"

namespace citemap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_settings(const RunConfig& c) {
  if (c.top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!(c.gain.scale >= 0.0)) throw ConfigError("gain scale must be >= 0");
  c.binning.validate();
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.style.width < 1 || c.style.height < 1) throw ConfigError("SVG canvas must be at least 1x1");
  if (!(c.outliers.discipline_quantile > 0.0 && c.outliers.discipline_quantile <= 1.0)) {
    throw ConfigError("outlier quantile must lie in (0, 1]");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (records.empty()) throw ConfigError("no record files given");
  for (const auto& p : records) {
    if (!fs::exists(p)) throw ConfigError("record file '" + p.string() + "' does not exist");
  }
  if (aliases && !fs::exists(*aliases)) {
    throw ConfigError("alias file '" + aliases->string() + "' does not exist");
  }
  if (categories && !fs::exists(*categories)) {
    throw ConfigError("category map '" + categories->string() + "' does not exist");
  }
  check_settings(*this);
}

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::vector<Discipline> parse_codes(const std::vector<std::string>& codes) {
  std::vector<Discipline> out;
  for (const auto& c : codes) {
    auto d = parse_discipline_code(c);
    if (!d) throw ConfigError("unknown discipline code '" + c + "' (expected AH, SCI, SOC or ET)");
    if (std::find(out.begin(), out.end(), *d) == out.end()) out.push_back(*d);
  }
  return out;
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig c) {
  try {
    if (j.contains("records")) {
      c.records.clear();
      const auto& r = j.at("records");
      if (r.is_string()) {
        c.records.emplace_back(r.get<std::string>());
      } else {
        for (const auto& p : r) c.records.emplace_back(p.get<std::string>());
      }
    }
    if (j.contains("aliases")) {
      c.aliases = j.at("aliases").is_null() ? std::nullopt
                                            : std::optional<fs::path>(j.at("aliases").get<std::string>());
    }
    if (j.contains("categories")) {
      c.categories = j.at("categories").is_null()
                         ? std::nullopt
                         : std::optional<fs::path>(j.at("categories").get<std::string>());
    }
    if (j.contains("disciplines")) c.disciplines = parse_codes(j.at("disciplines").get<std::vector<std::string>>());
    read_into(j, "top_k", c.top_k);
    if (j.contains("gain")) {
      const auto& g = j.at("gain");
      read_into(g, "scale", c.gain.scale);
      read_into(g, "log_base_label", c.log_base_label);
      if (g.contains("smoothing")) c.gain.smoothing = parse_smoothing(g.at("smoothing").get<std::string>());
    }
    if (j.contains("binning")) {
      const auto& b = j.at("binning");
      read_into(b, "bin_width", c.binning.bin_width);
      if (b.contains("max_bin")) {
        c.binning.max_bin = b.at("max_bin").is_null()
                                ? std::nullopt
                                : std::optional<std::uint64_t>(b.at("max_bin").get<std::uint64_t>());
      }
      read_into(b, "include_overflow", c.binning.include_overflow);
    }
    if (j.contains("lotka")) {
      const auto& l = j.at("lotka");
      if (l.contains("method")) c.lotka.method = parse_lotka_method(l.at("method").get<std::string>());
      read_into(l, "min_count", c.lotka.min_count);
    }
    if (j.contains("stddev")) {
      const auto s = j.at("stddev").get<std::string>();
      if (s == "population") {
        c.stddev = StddevKind::Population;
      } else if (s == "sample") {
        c.stddev = StddevKind::Sample;
      } else {
        throw ConfigError("stddev must be 'population' or 'sample'");
      }
    }
    if (j.contains("outliers")) {
      const auto& o = j.at("outliers");
      read_into(o, "gain_factor", c.outliers.gain_factor);
      read_into(o, "tail_probability", c.outliers.tail_probability);
      read_into(o, "discipline_quantile", c.outliers.discipline_quantile);
    }
    if (j.contains("exclude")) c.exclude = j.at("exclude").get<std::set<std::string>>();
    if (j.contains("map")) {
      const auto& m = j.at("map");
      read_into(m, "r_min", c.map.r_min);
      read_into(m, "r_max", c.map.r_max);
      read_into(m, "area_max", c.map.area_max);
      if (m.contains("radius_scale")) {
        const auto s = m.at("radius_scale").get<std::string>();
        if (s == "linear") {
          c.map.radius_scale = RadiusScale::Linear;
        } else if (s == "log") {
          c.map.radius_scale = RadiusScale::Log;
        } else {
          throw ConfigError("radius_scale must be 'linear' or 'log'");
        }
      }
    }
    if (j.contains("style")) {
      const auto& s = j.at("style");
      read_into(s, "width", c.style.width);
      read_into(s, "height", c.style.height);
      read_into(s, "background", c.style.background);
      read_into(s, "font_family", c.style.font_family);
      read_into(s, "font_size", c.style.font_size);
      read_into(s, "labels", c.style.labels);
      if (s.contains("palette")) {
        auto pal = s.at("palette").get<std::vector<std::string>>();
        if (pal.size() != 4) throw ConfigError("style palette needs exactly 4 colours");
        std::copy(pal.begin(), pal.end(), c.style.palette.begin());
      }
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read_into(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_settings(c);
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["records"] = json::array();
  for (const auto& p : c.records) j["records"].push_back(p.generic_string());
  j["aliases"] = c.aliases ? json(c.aliases->generic_string()) : json(nullptr);
  j["categories"] = c.categories ? json(c.categories->generic_string()) : json(nullptr);
  j["disciplines"] = json::array();
  for (auto d : c.disciplines) j["disciplines"].push_back(discipline_code(d));
  j["top_k"] = c.top_k;
  j["gain"] = {{"scale", c.gain.scale},
               {"log_base_label", c.log_base_label},
               {"smoothing", smoothing_name(c.gain.smoothing)}};
  j["binning"] = {{"bin_width", c.binning.bin_width},
                  {"max_bin", c.binning.max_bin ? json(*c.binning.max_bin) : json(nullptr)},
                  {"include_overflow", c.binning.include_overflow}};
  j["lotka"] = {{"method", lotka_method_name(c.lotka.method)}, {"min_count", c.lotka.min_count}};
  j["stddev"] = c.stddev == StddevKind::Population ? "population" : "sample";
  j["outliers"] = {{"gain_factor", c.outliers.gain_factor},
                   {"tail_probability", c.outliers.tail_probability},
                   {"discipline_quantile", c.outliers.discipline_quantile}};
  j["exclude"] = c.exclude;
  j["map"] = {{"r_min", c.map.r_min},
              {"r_max", c.map.r_max},
              {"area_max", c.map.area_max},
              {"radius_scale", c.map.radius_scale == RadiusScale::Linear ? "linear" : "log"}};
  j["style"] = {{"width", c.style.width},         {"height", c.style.height},
                {"background", c.style.background}, {"font_family", c.style.font_family},
                {"font_size", c.style.font_size},   {"labels", c.style.labels},
                {"palette", c.style.palette}};
  j["output_dir"] = c.output_dir.generic_string();
  j["jobs"] = c.jobs;
  return j;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  RunConfig c = run_config_from_json(j);
  // Relative paths in a config file are relative to the file itself.
  const fs::path base = path.parent_path();
  auto rebase = [&](fs::path& p) {
    if (p.is_relative()) p = base / p;
  };
  for (auto& p : c.records) rebase(p);
  if (c.aliases) rebase(*c.aliases);
  if (c.categories) rebase(*c.categories);
  if (j.contains("output_dir")) rebase(c.output_dir);
  return c;
}

Corpus load_corpus(const RunConfig& config) {
  const AliasTable aliases = config.aliases ? load_alias_table(*config.aliases) : AliasTable{};
  const CategoryMap categories =
      config.categories ? load_category_map(*config.categories) : default_category_map();
  return ingest(config.records, aliases, categories);
}

DisciplineAnalysis analyze_discipline(std::span<const CitationRecord> records, Discipline d,
                                      const RunConfig& config) {
  DisciplineAnalysis a;
  a.discipline = d;
  std::vector<std::uint64_t> cites;
  for (const auto& r : records) {
    if (r.in_scope(d)) cites.push_back(r.citations);
  }
  if (cites.empty()) throw DataError("no records in discipline " + std::string(discipline_code(d)));
  a.histogram = build_histogram(cites, config.binning, std::string(discipline_code(d)));
  a.stats = publisher_stats(records, d, config.binning);

  std::size_t kept = 0;
  for (const auto& s : a.stats) {
    if (config.exclude.count(s.publisher)) {
      a.selection.push_back(s);
    } else if (kept < config.top_k) {
      a.selection.push_back(s);
      ++kept;
    }
  }
  std::vector<std::pair<std::string, CitationHistogram>> inputs;
  for (const auto& s : a.selection) inputs.emplace_back(s.publisher, s.histogram);
  a.ranking = rank_by_gain(a.histogram, inputs, config.gain);
  if (!a.ranking.failures.empty()) {
    std::string msg = "information gain failed in " + std::string(discipline_code(d)) + ":";
    for (const auto& f : a.ranking.failures) msg += " [" + f.label + ": " + f.message + "]";
    throw DataError(msg);
  }
  a.flags = flag_outliers(a.histogram, a.selection, a.ranking.ranked, config.outliers);
  return a;
}

void write_gain_ranking_csv(std::ostream& out, const DisciplineAnalysis& analysis,
                            const std::set<std::string>& excluded) {
  out << "rank,label,gain,citation_average,nr_bc,smoothing_applied,excluded\n";
  std::size_t rank = 0;
  for (const auto& r : analysis.ranking.ranked) {
    const auto it = std::find_if(analysis.selection.begin(), analysis.selection.end(),
                                 [&](const auto& s) { return s.publisher == r.input_label; });
    const double avg = it != analysis.selection.end() ? it->citation_average : 0.0;
    const std::uint64_t nr = it != analysis.selection.end() ? it->nr_bc : 0;
    out << ++rank << ',' << delimited::quote_field(r.input_label) << ',' << format_double(r.gain)
        << ',' << format_double(avg) << ',' << nr << ',' << (r.smoothing_applied ? 1 : 0) << ','
        << (excluded.count(r.input_label) ? 1 : 0) << '\n';
  }
}

void write_publisher_histograms_csv(std::ostream& out, std::span<const PublisherStats> stats) {
  out << "publisher,l_lower,l_upper,count,probability\n";
  for (const auto& s : stats) {
    std::ostringstream rows;
    write_histogram_csv(rows, s.histogram, false);
    std::istringstream lines(rows.str());
    std::string line;
    const auto label = delimited::quote_field(s.publisher);
    while (std::getline(lines, line)) out << label << ',' << line << '\n';
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

const std::vector<std::string>& discipline_artifact_names() {
  static const std::vector<std::string> names = {
      "indicators.json", "histogram.csv", "publisher_histograms.csv", "gain_ranking.csv",
      "lotka.json",      "layout.json",   "map.svg"};
  return names;
}

namespace {

struct Artifact {
  std::string path;  // relative to the output directory
  std::string content;
};

struct DisciplineOutput {
  std::vector<Artifact> artifacts;
  std::vector<OutlierFlag> flags;
};

DisciplineOutput build_discipline(const Corpus& corpus, Discipline d, const RunConfig& config) {
  const auto analysis = analyze_discipline(corpus.records, d, config);
  const std::string dir = std::string(discipline_code(d)) + "/";
  DisciplineOutput out;
  out.flags = analysis.flags;
  auto add = [&](const std::string& name, const std::string& content) {
    out.artifacts.push_back({dir + name, content});
  };

  IndicatorOptions iopts;
  iopts.top_k = config.top_k;
  iopts.stddev = config.stddev;
  std::ostringstream s;
  write_indicators_json(s, {compute_indicators(corpus.records, d, iopts)});
  add("indicators.json", s.str());

  s.str({});
  write_histogram_csv(s, analysis.histogram);
  add("histogram.csv", s.str());

  s.str({});
  write_publisher_histograms_csv(s, analysis.stats);
  add("publisher_histograms.csv", s.str());

  s.str({});
  write_gain_ranking_csv(s, analysis, config.exclude);
  add("gain_ranking.csv", s.str());

  const auto fit = fit_lotka(analysis.histogram, config.lotka);
  s.str({});
  write_lotka_json(s, fit, fit_report(analysis.histogram, fit));
  add("lotka.json", s.str());

  MapConfig mc = config.map;
  mc.top_k = config.top_k;
  mc.excluded = config.exclude;
  const auto layout = layout_map(analysis.histogram, analysis.selection, analysis.ranking.ranked, mc);
  s.str({});
  write_layout_json(s, layout);
  add("layout.json", s.str());

  add("map.svg", render_svg(layout, config.style));
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw DataError("cannot write '" + path.string() + "'");
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  PipelineResult result;
  json manifest;
  manifest["config"] = run_config_to_json(config);

  auto fail = [&](const std::string& message) {
    manifest["status"] = "failed";
    manifest["error"] = message;
    manifest["outputs"] = json::array();
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    std::ofstream f(config.output_dir / "manifest.json");
    f << manifest.dump(2) << '\n';
  };

  try {
    const Corpus corpus = load_corpus(config);
    result.diagnostics = corpus.diagnostics;
    if (corpus.records.empty()) throw DataError("the record files contain no valid records");

    std::vector<Discipline> disciplines = config.disciplines;
    if (disciplines.empty()) {
      for (Discipline d : kAllDisciplines) {
        if (std::any_of(corpus.records.begin(), corpus.records.end(),
                        [d](const auto& r) { return r.disciplines.contains(d); })) {
          disciplines.push_back(d);
        }
      }
      if (disciplines.empty()) throw DataError("no record maps to any discipline");
    }

    std::vector<Artifact> artifacts;
    IndicatorOptions iopts;
    iopts.top_k = config.top_k;
    iopts.stddev = config.stddev;
    std::vector<IndicatorSet> sets = {compute_indicators(corpus.records, std::nullopt, iopts)};
    for (Discipline d : disciplines) sets.push_back(compute_indicators(corpus.records, d, iopts));
    std::ostringstream table;
    write_indicator_table(table, sets);
    artifacts.push_back({"indicators_table.csv", table.str()});

    std::vector<DisciplineOutput> outputs(disciplines.size());
    if (config.jobs > 1) {
      std::vector<std::future<DisciplineOutput>> futures;
      for (Discipline d : disciplines) {
        futures.push_back(std::async(std::launch::async,
                                     [&, d] { return build_discipline(corpus, d, config); }));
      }
      for (std::size_t i = 0; i < futures.size(); ++i) outputs[i] = futures[i].get();
    } else {
      for (std::size_t i = 0; i < disciplines.size(); ++i) {
        outputs[i] = build_discipline(corpus, disciplines[i], config);
      }
    }

    json flags = json::array();
    for (std::size_t i = 0; i < disciplines.size(); ++i) {
      for (auto& a : outputs[i].artifacts) artifacts.push_back(std::move(a));
      for (const auto& f : outputs[i].flags) {
        flags.push_back({{"discipline", discipline_code(disciplines[i])},
                         {"publisher", f.label},
                         {"reasons", f.reasons},
                         {"excluded", config.exclude.count(f.label) > 0}});
        result.flags.emplace_back(disciplines[i], f);
      }
    }

    json listed = json::array();
    for (const auto& a : artifacts) {
      const fs::path target = config.output_dir / a.path;
      write_file(target, a.content);
      result.outputs.push_back(target);
      listed.push_back({{"path", a.path}, {"sha256", sha256_hex(a.content)}, {"bytes", a.content.size()}});
    }
    json diags = json::array();
    for (const auto& d : corpus.diagnostics) diags.push_back(d.to_string());
    manifest["status"] = "complete";
    manifest["disciplines"] = json::array();
    for (auto d : disciplines) manifest["disciplines"].push_back(discipline_code(d));
    manifest["records"] = corpus.records.size();
    manifest["unmapped_records"] = corpus.unmapped_count();
    manifest["diagnostics"] = std::move(diags);
    manifest["outlier_flags"] = std::move(flags);
    manifest["outputs"] = std::move(listed);
    write_file(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
    result.outputs.push_back(config.output_dir / "manifest.json");
  } catch (const std::exception& e) {
    for (const auto& p : result.outputs) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    result.outputs.clear();
    fail(e.what());
    throw;
  }
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace citemap
