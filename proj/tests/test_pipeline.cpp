#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "citemap/pipeline.hpp"
#include "citemap/synth.hpp"

using namespace citemap;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("citemap-test-" + tag + "-" + std::to_string(std::rand()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Twelve book publishers in every discipline plus one serial-like publisher
// with a heavy tail.
SynthSpec fixture_spec() {
  SynthSpec s;
  s.seed = 77;
  s.n_records = 6000;
  s.model = {0.8, 2.0, 200};
  for (int i = 0; i < 12; ++i) {
    s.publishers.push_back({"Press " + std::string(1, static_cast<char>('A' + i)), 12.0 - i, std::nullopt, false});
  }
  s.publishers.push_back({"Serial Reviews", 2.0, CitationModel{0.05, 1.2, 150}, true});
  s.disciplines = {{Discipline::ArtsHumanities, 1.0},
                   {Discipline::Science, 1.0},
                   {Discipline::SocialSciences, 1.0},
                   {Discipline::EngineeringTechnology, 1.0}};
  return s;
}

fs::path write_fixture(const fs::path& dir) {
  const fs::path records = dir / "records.csv";
  std::ofstream out(records);
  write_records(out, generate(fixture_spec()), RecordFormat::Delimited);
  return records;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CITEMAP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("full run writes every artifact and a manifest") {
  TempDir tmp("full");
  RunConfig c;
  c.records = {write_fixture(tmp.path)};
  c.output_dir = tmp.path / "out";
  c.exclude = {"Serial Reviews"};
  auto r = run_pipeline(c);

  CHECK(r.manifest["status"] == "complete");
  CHECK(r.manifest["disciplines"].size() == 4);
  for (const char* code : {"AH", "SCI", "SOC", "ET"}) {
    for (const auto& name : discipline_artifact_names()) {
      CHECK(fs::exists(c.output_dir / code / name));
    }
  }
  CHECK(fs::exists(c.output_dir / "indicators_table.csv"));
  CHECK(fs::exists(c.output_dir / "manifest.json"));
  CHECK(r.manifest["outputs"].size() == 1 + 4 * discipline_artifact_names().size());

  for (const auto& o : r.manifest["outputs"]) {
    const auto content = slurp(c.output_dir / o["path"].get<std::string>());
    CHECK(sha256_hex(content) == o["sha256"].get<std::string>());
    CHECK(content.size() == o["bytes"].get<std::size_t>());
  }

  // The planted serial publisher is flagged in every discipline, kept out of
  // the maps and still ranked with the excluded marker.
  CHECK(r.flags.size() >= 4);
  for (const char* code : {"AH", "SCI", "SOC", "ET"}) {
    const auto layout = nlohmann::json::parse(slurp(c.output_dir / code / "layout.json"));
    CHECK(layout["dots"].size() == 12);
    for (const auto& d : layout["dots"]) CHECK(d["label"] != "Serial Reviews");
    REQUIRE(layout["excluded"].size() == 1);
    CHECK(layout["excluded"][0]["label"] == "Serial Reviews");

    const auto ranking = slurp(c.output_dir / code / "gain_ranking.csv");
    const auto pos = ranking.find("Serial Reviews");
    REQUIRE(pos != std::string::npos);
    const auto line_end = ranking.find('\n', pos);
    CHECK(ranking.substr(line_end - 2, 2) == ",1");

    const auto svg = slurp(c.output_dir / code / "map.svg");
    CHECK(svg.find("Serial Reviews") == std::string::npos);
  }
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("repeated runs and parallel runs agree") {
  TempDir tmp("repeat");
  RunConfig c;
  c.records = {write_fixture(tmp.path)};
  c.output_dir = tmp.path / "a";
  auto a = run_pipeline(c);
  c.output_dir = tmp.path / "b";
  c.jobs = 4;
  auto b = run_pipeline(c);
  CHECK(a.manifest["outputs"] == b.manifest["outputs"]);
}

TEST_CASE("failure leaves a failed manifest") {
  TempDir tmp("fail");
  RunConfig c;
  c.records = {write_fixture(tmp.path)};
  c.output_dir = tmp.path / "out";
  c.gain.smoothing = SmoothingPolicy::Error;
  CHECK_THROWS_AS(run_pipeline(c), DataError);
  const auto m = nlohmann::json::parse(slurp(c.output_dir / "manifest.json"));
  CHECK(m["status"] == "failed");
  CHECK(m["error"].get<std::string>().find("information gain") != std::string::npos);
  CHECK(m["outputs"].empty());
  CHECK_FALSE(fs::exists(c.output_dir / "SCI" / "map.svg"));
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.records = {"/nonexistent/records.csv"};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"top_k": 0})")), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"gain": {"scale": -2}})")), ConfigError);
}

TEST_CASE("config file paths resolve next to the file") {
  TempDir tmp("cfg");
  write_fixture(tmp.path);
  std::ofstream(tmp.path / "run.json") << R"({"records": ["records.csv"], "top_k": 5, "output_dir": "o",
    "gain": {"smoothing": "restrict"}, "disciplines": ["SCI"]})";
  auto c = load_run_config(tmp.path / "run.json");
  REQUIRE(c.records.size() == 1);
  CHECK(c.records[0] == tmp.path / "records.csv");
  CHECK(c.output_dir == tmp.path / "o");
  CHECK(c.top_k == 5);
  CHECK(c.gain.smoothing == SmoothingPolicy::RestrictToCommonSupport);
  CHECK(c.disciplines == std::vector<Discipline>{Discipline::Science});
  auto echoed = run_config_from_json(run_config_to_json(c));
  CHECK(run_config_to_json(echoed) == run_config_to_json(c));
}

TEST_CASE("analysis keeps k at the publisher count when fewer exist") {
  TempDir tmp("topk");
  RunConfig c;
  c.records = {write_fixture(tmp.path)};
  auto corpus = load_corpus(c);
  auto a = analyze_discipline(corpus.records, Discipline::Science, c);
  CHECK(a.stats.size() == 13);
  CHECK(a.selection.size() == 13);
  CHECK(a.ranking.ranked.size() == 13);
}

TEST_CASE("command-line exit codes") {
  TempDir tmp("cli");
  const auto records = write_fixture(tmp.path).string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("indicators --records /nonexistent.csv") == 2);
  CHECK(run_cli("indicators --records " + records) == 0);
  CHECK(run_cli("gain -d SCI --records " + records + " --scale -1") == 2);
  CHECK(run_cli("gain -d SCI --records " + records + " --smoothing error") == 1);
  CHECK(run_cli("lotka -d SCI --records " + records + " --method mle") == 0);
  CHECK(run_cli("map -d ET --records " + records + " --svg " + (tmp.path / "m.svg").string()) == 0);
  CHECK(fs::exists(tmp.path / "m.svg"));
  CHECK(run_cli("pipeline --records " + records + " -o " + (tmp.path / "p").string()) == 0);
  CHECK(fs::exists(tmp.path / "p" / "manifest.json"));

  std::ofstream(tmp.path / "bad.csv") << "record_id,publisher_raw,year,citations,categories,has_isbn,has_issn\n"
                                       << "x,A,2007,oops,SCI,1,0\n";
  CHECK(run_cli("ingest-check --records " + (tmp.path / "bad.csv").string()) == 0);
  CHECK(run_cli("ingest-check --strict --records " + (tmp.path / "bad.csv").string()) == 1);
}
