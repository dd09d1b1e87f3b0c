#include "citemap/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "citemap/delimited.hpp"

namespace citemap {

namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "record_id", "publisher_raw", "year", "citations", "categories", "has_isbn", "has_issn"};

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
  text = delimited::trim(text);
  if (text.empty()) return false;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

bool parse_flag(std::string_view text, bool& out) {
  text = delimited::trim(text);
  if (text == "0" || text == "false") {
    out = false;
    return true;
  }
  if (text == "1" || text == "true") {
    out = true;
    return true;
  }
  return false;
}

// Builds a record from named string fields; returns an error message or empty.
std::string fill_record(CitationRecord& rec, std::string_view id, std::string_view publisher,
                        std::string_view year, std::string_view citations,
                        std::vector<std::string> categories, std::string_view isbn,
                        std::string_view issn) {
  rec.record_id = std::string(delimited::trim(id));
  if (rec.record_id.empty()) return "empty record_id";
  rec.publisher_raw = std::string(publisher);
  rec.publisher = clean_name(publisher);
  if (rec.publisher.empty()) return "empty publisher_raw";
  if (!parse_int(year, rec.year)) return "invalid year '" + std::string(year) + "'";
  std::int64_t cites = 0;
  if (!parse_int(citations, cites)) return "invalid citations '" + std::string(citations) + "'";
  if (cites < 0) return "negative citations " + std::to_string(cites);
  rec.citations = static_cast<std::uint64_t>(cites);
  rec.categories = std::move(categories);
  if (rec.categories.empty()) return "no subject categories";
  if (!parse_flag(isbn, rec.has_isbn)) return "invalid has_isbn '" + std::string(isbn) + "'";
  if (!parse_flag(issn, rec.has_issn)) return "invalid has_issn '" + std::string(issn) + "'";
  return {};
}

struct Row {
  CitationRecord record;
  std::size_t line;
};

void parse_delimited(std::istream& in, std::string_view source, std::vector<Row>& rows,
                     std::vector<Diagnostic>& diags) {
  std::string line;
  std::size_t line_no = 0;
  std::array<std::size_t, kColumns.size()> index{};
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (delimited::trim(line).empty()) continue;
    std::vector<std::string> fields;
    try {
      fields = delimited::split_line(line);
    } catch (const DataError& e) {
      if (!have_header) throw DataError(std::string(source) + ": header: " + e.what());
      diags.push_back({std::string(source), line_no, e.what()});
      continue;
    }
    if (!have_header) {
      for (std::size_t c = 0; c < kColumns.size(); ++c) {
        auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end()) {
          throw DataError(std::string(source) + ": header row lacks column '" +
                          std::string(kColumns[c]) + "'");
        }
        index[c] = static_cast<std::size_t>(it - fields.begin());
      }
      have_header = true;
      continue;
    }
    const std::size_t needed = *std::max_element(index.begin(), index.end()) + 1;
    if (fields.size() < needed) {
      diags.push_back({std::string(source), line_no,
                       "expected " + std::to_string(needed) + " fields, got " +
                           std::to_string(fields.size())});
      continue;
    }
    Row row{{}, line_no};
    auto err = fill_record(row.record, fields[index[0]], fields[index[1]], fields[index[2]],
                           fields[index[3]], delimited::split_list(fields[index[4]]),
                           fields[index[5]], fields[index[6]]);
    if (!err.empty()) {
      diags.push_back({std::string(source), line_no, err});
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw DataError(std::string(source) + ": read error");
}

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number()) return v.dump();
  throw DataError("unexpected value " + v.dump());
}

void parse_jsonl(std::istream& in, std::string_view source, std::vector<Row>& rows,
                 std::vector<Diagnostic>& diags) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (delimited::trim(line).empty()) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw DataError("line is not a JSON object");
      for (auto col : kColumns) {
        if (!obj.contains(col)) throw DataError("missing field '" + std::string(col) + "'");
      }
      std::vector<std::string> cats;
      const auto& jc = obj["categories"];
      if (jc.is_array()) {
        for (const auto& c : jc) {
          auto s = std::string(delimited::trim(json_scalar_text(c)));
          if (!s.empty()) cats.push_back(std::move(s));
        }
      } else {
        cats = delimited::split_list(json_scalar_text(jc));
      }
      Row row{{}, line_no};
      auto err = fill_record(row.record, json_scalar_text(obj["record_id"]),
                             json_scalar_text(obj["publisher_raw"]), json_scalar_text(obj["year"]),
                             json_scalar_text(obj["citations"]), std::move(cats),
                             json_scalar_text(obj["has_isbn"]), json_scalar_text(obj["has_issn"]));
      if (!err.empty()) throw DataError(err);
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      diags.push_back({std::string(source), line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const DataError& e) {
      diags.push_back({std::string(source), line_no, e.what()});
    }
  }
  if (in.bad()) throw DataError(std::string(source) + ": read error");
}

// Keeps the last occurrence of every record_id, at the position of that occurrence.
void drop_duplicates(std::vector<Row>& rows, std::string_view source,
                     std::vector<Diagnostic>& diags) {
  std::unordered_map<std::string, std::size_t> last;
  for (std::size_t i = 0; i < rows.size(); ++i) last[rows[i].record.record_id] = i;
  if (last.size() == rows.size()) return;
  std::unordered_map<std::string, std::size_t> first_line;
  std::vector<Row> kept;
  kept.reserve(last.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& id = rows[i].record.record_id;
    auto [it, inserted] = first_line.try_emplace(id, rows[i].line);
    if (!inserted) {
      diags.push_back({std::string(source), rows[i].line,
                       "duplicate record_id '" + id + "' (previous at line " +
                           std::to_string(it->second) + "); this occurrence wins"});
      it->second = rows[i].line;
    }
    if (last[id] == i) kept.push_back(std::move(rows[i]));
  }
  rows = std::move(kept);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::size_t DisciplineSet::size() const {
  std::size_t n = 0;
  for (Discipline d : kAllDisciplines) n += contains(d) ? 1 : 0;
  return n;
}

std::vector<Discipline> DisciplineSet::to_vector() const {
  std::vector<Discipline> out;
  for (Discipline d : kAllDisciplines) {
    if (contains(d)) out.push_back(d);
  }
  return out;
}

std::string clean_name(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string alias_key(std::string_view raw) {
  std::string key = clean_name(raw);
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key;
}

void AliasTable::add(std::string_view raw, std::string_view canonical) {
  const std::string canon = clean_name(canonical);
  const std::string raw_key = alias_key(raw);
  const std::string canon_key = alias_key(canon);
  if (raw_key.empty() || canon.empty()) throw DataError("alias entry with empty name");
  auto check = [&](const std::string& key, const std::string& target) {
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second != target) {
      throw DataError("alias '" + key + "' maps to both '" + it->second + "' and '" + target + "'");
    }
  };
  check(canon_key, canon);
  check(raw_key, canon);
  entries_[canon_key] = canon;
  entries_[raw_key] = canon;
}

const std::string* AliasTable::find(std::string_view cleaned) const {
  auto it = entries_.find(alias_key(cleaned));
  return it == entries_.end() ? nullptr : &it->second;
}

void CategoryMap::add(std::string_view category, DisciplineSet disciplines) {
  if (disciplines.empty()) {
    throw DataError("category '" + std::string(category) + "' maps to no discipline");
  }
  auto key = std::string(delimited::trim(category));
  if (key.empty()) throw DataError("empty category name");
  entries_[key].merge(disciplines);
}

const DisciplineSet* CategoryMap::find(std::string_view category) const {
  auto it = entries_.find(delimited::trim(category));
  return it == entries_.end() ? nullptr : &it->second;
}

CategoryMap default_category_map() {
  CategoryMap map;
  for (Discipline d : kAllDisciplines) {
    map.add(discipline_code(d), {d});
    map.add(discipline_name(d), {d});
  }
  return map;
}

RecordFormat detect_record_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? RecordFormat::JsonLines : RecordFormat::Delimited;
}

ParseResult parse_records(std::istream& in, RecordFormat format, std::string_view source) {
  if (!in.good() && !in.eof()) throw DataError(std::string(source) + ": stream is not readable");
  std::vector<Row> rows;
  ParseResult result;
  if (format == RecordFormat::Delimited) {
    parse_delimited(in, source, rows, result.diagnostics);
  } else {
    parse_jsonl(in, source, rows, result.diagnostics);
  }
  drop_duplicates(rows, source, result.diagnostics);
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  result.records.reserve(rows.size());
  for (auto& r : rows) result.records.push_back(std::move(r.record));
  return result;
}

ParseResult parse_record_files(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::future<ParseResult>> jobs;
  jobs.reserve(paths.size());
  for (const auto& p : paths) {
    jobs.push_back(std::async(std::launch::async, [p] {
      auto in = open_input(p);
      return parse_records(in, detect_record_format(p), p.string());
    }));
  }
  ParseResult merged;
  std::vector<Row> rows;
  for (auto& job : jobs) {
    auto part = job.get();
    for (auto& r : part.records) rows.push_back({std::move(r), 0});
    merged.diagnostics.insert(merged.diagnostics.end(), part.diagnostics.begin(),
                              part.diagnostics.end());
  }
  if (paths.size() > 1) drop_duplicates(rows, "<merged>", merged.diagnostics);
  std::stable_sort(merged.diagnostics.begin(), merged.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::tie(a.source, a.line) < std::tie(b.source, b.line);
                   });
  for (auto& r : rows) merged.records.push_back(std::move(r.record));
  return merged;
}

void write_records(std::ostream& out, const std::vector<CitationRecord>& records,
                   RecordFormat format) {
  if (format == RecordFormat::Delimited) {
    out << "record_id,publisher_raw,year,citations,categories,has_isbn,has_issn\n";
    for (const auto& r : records) {
      std::string cats;
      for (std::size_t i = 0; i < r.categories.size(); ++i) {
        if (i) cats.push_back(';');
        cats += r.categories[i];
      }
      out << delimited::join_fields({r.record_id, r.publisher_raw, std::to_string(r.year),
                                     std::to_string(r.citations), cats, r.has_isbn ? "1" : "0",
                                     r.has_issn ? "1" : "0"})
          << '\n';
    }
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["record_id"] = r.record_id;
    obj["publisher_raw"] = r.publisher_raw;
    obj["year"] = r.year;
    obj["citations"] = r.citations;
    obj["categories"] = r.categories;
    obj["has_isbn"] = r.has_isbn;
    obj["has_issn"] = r.has_issn;
    out << obj.dump() << '\n';
  }
}

NormalizedName normalize_publisher(std::string_view raw, const AliasTable& aliases) {
  auto cleaned = clean_name(raw);
  if (cleaned.empty()) throw DataError("empty publisher name");
  if (const auto* canon = aliases.find(cleaned)) return {*canon, true};
  return {std::move(cleaned), false};
}

CitationRecord assign_disciplines(CitationRecord record, const CategoryMap& map,
                                  std::vector<Diagnostic>& diagnostics) {
  record.disciplines = {};
  for (const auto& cat : record.categories) {
    if (const auto* ds = map.find(cat)) {
      record.disciplines.merge(*ds);
    } else {
      diagnostics.push_back(
          {"record " + record.record_id, 0, "unmapped subject category '" + cat + "'"});
    }
  }
  record.unmapped = record.disciplines.empty();
  return record;
}

namespace {

// Two-column files with an optional header row; returns (line, a, b) triples.
struct Pair {
  std::size_t line;
  std::string a, b;
};

std::vector<Pair> read_pairs(std::istream& in, std::string_view source,
                             std::string_view header_a) {
  if (!in) throw DataError(std::string(source) + ": stream is not readable");
  std::vector<Pair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = delimited::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> f;
    try {
      f = delimited::split_line(line);
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (f.size() != 2) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) +
                      ": expected 2 fields, got " + std::to_string(f.size()));
    }
    if (out.empty() && f[0] == header_a) continue;
    out.push_back({line_no, std::move(f[0]), std::move(f[1])});
  }
  return out;
}

}  // namespace

AliasTable load_alias_table(std::istream& in, std::string_view source) {
  AliasTable table;
  for (const auto& p : read_pairs(in, source, "raw_name")) {
    try {
      table.add(p.a, p.b);
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ":" + std::to_string(p.line) + ": " + e.what());
    }
  }
  return table;
}

CategoryMap load_category_map(std::istream& in, std::string_view source) {
  CategoryMap map;
  for (const auto& p : read_pairs(in, source, "category")) {
    DisciplineSet ds;
    for (const auto& code : delimited::split_list(p.b)) {
      auto d = parse_discipline_code(code);
      if (!d) {
        throw DataError(std::string(source) + ":" + std::to_string(p.line) +
                        ": unknown discipline code '" + code + "'");
      }
      ds.insert(*d);
    }
    try {
      map.add(p.a, ds);
    } catch (const DataError& e) {
      throw DataError(std::string(source) + ":" + std::to_string(p.line) + ": " + e.what());
    }
  }
  return map;
}

AliasTable load_alias_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_alias_table(in, path.string());
}

CategoryMap load_category_map(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_category_map(in, path.string());
}

std::size_t Corpus::unmapped_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.unmapped; }));
}

std::vector<CitationRecord> Corpus::in_scope(const Scope& scope) const {
  std::vector<CitationRecord> out;
  for (const auto& r : records) {
    if (r.in_scope(scope)) out.push_back(r);
  }
  return out;
}

void resolve_records(std::vector<CitationRecord>& records, const AliasTable& aliases,
                     const CategoryMap& categories, std::vector<Diagnostic>& diagnostics) {
  for (auto& rec : records) {
    auto norm = normalize_publisher(rec.publisher_raw, aliases);
    rec.publisher = std::move(norm.name);
    rec.unaliased = !norm.aliased;
    rec = assign_disciplines(std::move(rec), categories, diagnostics);
  }
}

Corpus ingest(const std::vector<std::filesystem::path>& record_files, const AliasTable& aliases,
              const CategoryMap& categories) {
  auto parsed = parse_record_files(record_files);
  Corpus corpus{std::move(parsed.records), std::move(parsed.diagnostics)};
  resolve_records(corpus.records, aliases, categories, corpus.diagnostics);
  return corpus;
}

}  // namespace citemap
