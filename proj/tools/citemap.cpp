// citemap: command-line front end. Each subcommand loads inputs, calls one
// library operation and writes its result.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "citemap/corpus.hpp"
#include "citemap/heliomap.hpp"
#include "citemap/histogram.hpp"
#include "citemap/indicators.hpp"
#include "citemap/infogain.hpp"
#include "citemap/lotka.hpp"
#include "citemap/pipeline.hpp"
#include "citemap/synth.hpp"

namespace fs = std::filesystem;
using namespace citemap;

namespace {

/// Flags shared by every analysis subcommand; empty values leave the config untouched.
struct CommonFlags {
  std::string config;
  std::vector<std::string> records;
  std::string aliases;
  std::string categories;
  std::size_t top_k = 0;
  std::vector<std::string> exclude;
  std::size_t bin_width = 0;
  std::uint64_t max_bin = 0;
  bool overflow = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run configuration");
    app->add_option("-r,--records", records, "Record files (.csv or .jsonl)");
    app->add_option("--aliases", aliases, "Publisher alias table");
    app->add_option("--categories", categories, "Subject category to discipline map");
    app->add_option("-k,--top-k", top_k, "Number of top publishers");
    app->add_option("--exclude", exclude, "Publisher to keep off maps (repeatable)");
    app->add_option("--bin-width", bin_width, "Histogram bin width");
    app->add_option("--max-bin", max_bin, "Histogram cap");
    app->add_flag("--overflow", overflow, "Keep counts above --max-bin in an overflow bin");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    if (!records.empty()) c.records.assign(records.begin(), records.end());
    if (!aliases.empty()) c.aliases = aliases;
    if (!categories.empty()) c.categories = categories;
    if (top_k > 0) c.top_k = top_k;
    for (const auto& e : exclude) c.exclude.insert(e);
    if (bin_width > 0) c.binning.bin_width = bin_width;
    if (max_bin > 0) c.binning.max_bin = max_bin;
    if (overflow) c.binning.include_overflow = true;
    return c;
  }
};

Scope parse_scope(const std::string& text) {
  if (text == "ALL") return std::nullopt;
  auto d = parse_discipline_code(text);
  if (!d) throw ConfigError("unknown discipline '" + text + "' (expected AH, SCI, SOC, ET or ALL)");
  return d;
}

Discipline require_discipline(const std::string& text) {
  auto s = parse_scope(text);
  if (!s) throw ConfigError("this command needs a single discipline, not ALL");
  return *s;
}

/// Writes to the named file, or stdout when the name is empty or "-".
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << content;
}

Corpus load_checked(const RunConfig& config) {
  config.validate();
  auto corpus = load_corpus(config);
  for (const auto& d : corpus.diagnostics) std::cerr << "warning: " << d.to_string() << '\n';
  return corpus;
}

void print_flags(Discipline d, const std::vector<OutlierFlag>& flags,
                 const std::set<std::string>& excluded) {
  for (const auto& f : flags) {
    std::cerr << "outlier flag [" << discipline_code(d) << "] " << f.label
              << (excluded.count(f.label) ? " (excluded)" : " (not excluded; pass --exclude to drop)")
              << '\n';
    for (const auto& r : f.reasons) std::cerr << "  - " << r << '\n';
  }
}

const CitationHistogram& find_publisher(const std::vector<PublisherStats>& stats,
                                        const std::string& name) {
  for (const auto& s : stats) {
    if (s.publisher == name) return s.histogram;
  }
  throw DataError("publisher '" + name + "' has no records in scope");
}

CitationHistogram scope_histogram(const Corpus& corpus, const Scope& scope,
                                  const BinningSpec& binning) {
  std::vector<std::uint64_t> cites;
  for (const auto& r : corpus.records) {
    if (r.in_scope(scope)) cites.push_back(r.citations);
  }
  return build_histogram(cites, binning, scope_label(scope));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation histogram, information gain and heliocentric map toolkit"};
  app.require_subcommand(1);

  CommonFlags common;

  // ingest-check
  auto* ingest = app.add_subcommand("ingest-check", "Parse and resolve records, report diagnostics");
  bool strict = false;
  common.attach(ingest);
  ingest->add_flag("--strict", strict, "Exit with status 1 when any diagnostic is raised");

  // indicators
  auto* ind = app.add_subcommand("indicators", "Per-discipline indicator set");
  std::vector<std::string> ind_scopes;
  std::string ind_format = "table";
  std::string stddev;
  std::string group_by;
  std::string ind_out;
  common.attach(ind);
  ind->add_option("-d,--discipline", ind_scopes, "AH, SCI, SOC, ET or ALL (repeatable)");
  ind->add_option("--format", ind_format, "table or json")->check(CLI::IsMember({"table", "json"}));
  ind->add_option("--stddev", stddev, "population or sample")->check(CLI::IsMember({"population", "sample"}));
  ind->add_option("--group-by", group_by, "Per-group counts instead of indicators")->check(CLI::IsMember({"year"}));
  ind->add_option("-o,--output", ind_out, "Output file (default stdout)");

  // histogram
  auto* hist = app.add_subcommand("histogram", "Citation histogram for a discipline or publisher");
  std::string hist_scope = "ALL";
  std::string hist_publisher;
  std::string hist_out;
  common.attach(hist);
  hist->add_option("-d,--discipline", hist_scope, "AH, SCI, SOC, ET or ALL");
  hist->add_option("-p,--publisher", hist_publisher, "Canonical publisher name");
  hist->add_option("-o,--output", hist_out, "Output file (default stdout)");

  // gain
  auto* gain = app.add_subcommand("gain", "Rank top publishers by information gain against a discipline");
  std::string gain_disc;
  std::optional<double> scale;
  std::string smoothing;
  std::string gain_out;
  common.attach(gain);
  gain->add_option("-d,--discipline", gain_disc, "AH, SCI, SOC or ET")->required();
  gain->add_option("--scale", scale, "Non-negative multiplier of the divergence");
  gain->add_option("--smoothing", smoothing, "additive, error or restrict");
  gain->add_option("-o,--output", gain_out, "Output file (default stdout)");

  // lotka
  auto* lotka = app.add_subcommand("lotka", "Fit Lotka's law to the cited tail");
  std::string lotka_scope = "ALL";
  std::string lotka_publisher;
  std::string method;
  std::uint64_t min_count = 0;
  bool lotka_csv = false;
  std::string lotka_out;
  common.attach(lotka);
  lotka->add_option("-d,--discipline", lotka_scope, "AH, SCI, SOC, ET or ALL");
  lotka->add_option("-p,--publisher", lotka_publisher, "Canonical publisher name");
  lotka->add_option("--method", method, "loglog, loglog-unweighted, anchored or mle");
  lotka->add_option("--min-count", min_count, "Skip tail bins observed fewer times");
  lotka->add_flag("--csv", lotka_csv, "Write the per-bin report as delimited text");
  lotka->add_option("-o,--output", lotka_out, "Output file (default stdout)");

  // map
  auto* map = app.add_subcommand("map", "Lay out and render a heliocentric clockwise map");
  std::string map_disc;
  std::string svg_out;
  std::string layout_out;
  std::string radius_scale;
  common.attach(map);
  map->add_option("-d,--discipline", map_disc, "AH, SCI, SOC or ET")->required();
  map->add_option("--svg", svg_out, "SVG output file (default stdout)");
  map->add_option("--layout", layout_out, "Layout JSON output file");
  map->add_option("--radius-scale", radius_scale, "linear or log")->check(CLI::IsMember({"linear", "log"}));

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run every stage and write artifacts plus a manifest");
  std::string out_dir;
  std::vector<std::string> pipe_disc;
  std::size_t jobs = 0;
  common.attach(pipe);
  pipe->add_option("-o,--out", out_dir, "Output directory");
  pipe->add_option("-d,--discipline", pipe_disc, "Restrict to these disciplines (repeatable)");
  pipe->add_option("-j,--jobs", jobs, "Process disciplines in parallel");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic record file");
  std::string spec_path;
  std::string synth_out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t n_records = 0;
  synth->add_option("--spec", spec_path, "JSON synth spec")->required();
  synth->add_option("-o,--output", synth_out, "Record file to write (.csv or .jsonl)")->required();
  synth->add_option("--seed", seed, "Override the seed given in --spec")->each([&](const std::string&) { seed_set = true; });
  synth->add_option("-n,--n-records", n_records, "Override the record count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*ingest) {
      const auto config = common.resolve();
      config.validate();
      const auto corpus = load_corpus(config);
      std::cout << "records: " << corpus.records.size() << '\n';
      for (Discipline d : kAllDisciplines) {
        const auto n = std::count_if(corpus.records.begin(), corpus.records.end(),
                                     [d](const auto& r) { return r.disciplines.contains(d); });
        std::cout << discipline_code(d) << ": " << n << '\n';
      }
      std::cout << "unmapped: " << corpus.unmapped_count() << '\n';
      std::set<std::string> unaliased;
      for (const auto& r : corpus.records) {
        if (r.unaliased) unaliased.insert(r.publisher);
      }
      std::cout << "unaliased publishers: " << unaliased.size() << '\n';
      std::cout << "diagnostics: " << corpus.diagnostics.size() << '\n';
      for (const auto& d : corpus.diagnostics) std::cout << "  " << d.to_string() << '\n';
      return strict && !corpus.diagnostics.empty() ? 1 : 0;
    }

    if (*ind) {
      auto config = common.resolve();
      if (!stddev.empty()) config.stddev = stddev == "sample" ? StddevKind::Sample : StddevKind::Population;
      const auto corpus = load_checked(config);
      std::vector<Scope> scopes;
      if (ind_scopes.empty()) {
        scopes.push_back(std::nullopt);
        for (Discipline d : kAllDisciplines) {
          if (std::any_of(corpus.records.begin(), corpus.records.end(),
                          [d](const auto& r) { return r.disciplines.contains(d); })) {
            scopes.push_back(d);
          }
        }
      } else {
        for (const auto& s : ind_scopes) scopes.push_back(parse_scope(s));
      }
      std::ostringstream out;
      if (group_by == "year") {
        out << "scope,year,nr_bc,total_citations\n";
        for (const auto& scope : scopes) {
          for (const auto& [year, g] : group_by_year(corpus.records, scope)) {
            out << scope_label(scope) << ',' << year << ',' << g.nr_bc << ',' << g.total_citations << '\n';
          }
        }
      } else {
        IndicatorOptions opts{config.top_k, config.stddev};
        std::vector<IndicatorSet> sets;
        for (const auto& scope : scopes) sets.push_back(compute_indicators(corpus.records, scope, opts));
        if (ind_format == "json") {
          write_indicators_json(out, sets);
        } else {
          write_indicator_table(out, sets);
        }
      }
      emit(ind_out, out.str());
      return 0;
    }

    if (*hist) {
      const auto config = common.resolve();
      const auto corpus = load_checked(config);
      const Scope scope = parse_scope(hist_scope);
      std::ostringstream out;
      if (hist_publisher.empty()) {
        write_histogram_csv(out, scope_histogram(corpus, scope, config.binning));
      } else {
        const auto stats = publisher_stats(corpus.records, scope, config.binning);
        write_histogram_csv(out, find_publisher(stats, hist_publisher));
      }
      emit(hist_out, out.str());
      return 0;
    }

    if (*gain) {
      auto config = common.resolve();
      if (scale) config.gain.scale = *scale;
      if (!smoothing.empty()) config.gain.smoothing = parse_smoothing(smoothing);
      const auto corpus = load_checked(config);
      const Discipline d = require_discipline(gain_disc);
      const auto analysis = analyze_discipline(corpus.records, d, config);
      print_flags(d, analysis.flags, config.exclude);
      std::ostringstream out;
      write_gain_ranking_csv(out, analysis, config.exclude);
      emit(gain_out, out.str());
      return 0;
    }

    if (*lotka) {
      auto config = common.resolve();
      if (!method.empty()) config.lotka.method = parse_lotka_method(method);
      if (min_count > 0) config.lotka.min_count = min_count;
      const auto corpus = load_checked(config);
      const Scope scope = parse_scope(lotka_scope);
      CitationHistogram h;
      if (lotka_publisher.empty()) {
        h = scope_histogram(corpus, scope, config.binning);
      } else {
        h = find_publisher(publisher_stats(corpus.records, scope, config.binning), lotka_publisher);
      }
      const auto fit = fit_lotka(h, config.lotka);
      if (fit.alpha_out_of_range) {
        std::cerr << "warning: fitted alpha " << fit.alpha << " is below 1\n";
      }
      std::ostringstream out;
      if (lotka_csv) {
        write_lotka_report_csv(out, fit_report(h, fit));
      } else {
        write_lotka_json(out, fit, fit_report(h, fit));
      }
      emit(lotka_out, out.str());
      return 0;
    }

    if (*map) {
      auto config = common.resolve();
      if (!radius_scale.empty()) {
        config.map.radius_scale = radius_scale == "log" ? RadiusScale::Log : RadiusScale::Linear;
      }
      const auto corpus = load_checked(config);
      const Discipline d = require_discipline(map_disc);
      const auto analysis = analyze_discipline(corpus.records, d, config);
      print_flags(d, analysis.flags, config.exclude);
      MapConfig mc = config.map;
      mc.top_k = config.top_k;
      mc.excluded = config.exclude;
      const auto layout = layout_map(analysis.histogram, analysis.selection, analysis.ranking.ranked, mc);
      if (!layout_out.empty()) {
        std::ostringstream l;
        write_layout_json(l, layout);
        emit(layout_out, l.str());
      }
      emit(svg_out, render_svg(layout, config.style));
      return 0;
    }

    if (*pipe) {
      auto config = common.resolve();
      if (!out_dir.empty()) config.output_dir = out_dir;
      if (!pipe_disc.empty()) {
        config.disciplines.clear();
        for (const auto& s : pipe_disc) config.disciplines.push_back(require_discipline(s));
      }
      if (jobs > 0) config.jobs = jobs;
      const auto result = run_pipeline(config);
      for (const auto& d : result.diagnostics) std::cerr << "warning: " << d.to_string() << '\n';
      for (const auto& [d, f] : result.flags) print_flags(d, {f}, config.exclude);
      std::cout << "wrote " << result.outputs.size() << " files to " << config.output_dir.string() << '\n';
      return 0;
    }

    if (*synth) {
      std::ifstream in(spec_path);
      if (!in) throw ConfigError("cannot open synth spec '" + spec_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("synth spec: " + std::string(e.what()));
      }
      if (seed_set) j["seed"] = seed;
      if (n_records > 0) j["n_records"] = n_records;
      const auto spec = synth_spec_from_json(j);
      const auto records = generate(spec);
      std::ostringstream out;
      write_records(out, records, detect_record_format(synth_out));
      emit(synth_out, out.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
