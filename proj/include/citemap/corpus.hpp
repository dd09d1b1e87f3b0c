#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "citemap/common.hpp"

namespace citemap {

/// Set of disciplines stored as a bitmask.
class DisciplineSet {
 public:
  DisciplineSet() = default;
  DisciplineSet(std::initializer_list<Discipline> ds) {
    for (Discipline d : ds) insert(d);
  }

  void insert(Discipline d) { bits_ |= bit(d); }
  void merge(DisciplineSet other) { bits_ |= other.bits_; }
  bool contains(Discipline d) const { return (bits_ & bit(d)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::size_t size() const;
  std::vector<Discipline> to_vector() const;

  friend bool operator==(DisciplineSet, DisciplineSet) = default;

 private:
  static std::uint8_t bit(Discipline d) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d)); }
  std::uint8_t bits_ = 0;
};

/// One book chapter.
struct CitationRecord {
  std::string record_id;
  std::string publisher_raw;
  std::string publisher;  // canonical name once normalized
  int year = 0;
  std::uint64_t citations = 0;
  std::vector<std::string> categories;
  DisciplineSet disciplines;
  bool has_isbn = false;
  bool has_issn = false;
  bool unaliased = false;  // publisher had no alias entry
  bool unmapped = false;   // no category resolved to a discipline

  bool in_scope(const Scope& scope) const {
    return scope ? disciplines.contains(*scope) : true;
  }
  /// Serial-style record: carries an ISSN but no ISBN.
  bool issn_only() const { return has_issn && !has_isbn; }
};

/// Publisher alias table. Keys are case-folded, whitespace-collapsed raw names.
/// Every canonical name is registered as its own alias.
class AliasTable {
 public:
  AliasTable() = default;

  /// Throws DataError if the entry would make a canonical name map elsewhere.
  void add(std::string_view raw, std::string_view canonical);

  const std::string* find(std::string_view cleaned) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

/// Subject category -> disciplines. Category keys match exactly after trimming.
class CategoryMap {
 public:
  CategoryMap() = default;

  /// Throws DataError on an empty discipline set.
  void add(std::string_view category, DisciplineSet disciplines);
  const DisciplineSet* find(std::string_view category) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, DisciplineSet, std::less<>> entries_;
};

/// Map used when no category file is given: the codes AH, SCI, SOC, ET and the
/// full discipline names each resolve to their own discipline.
CategoryMap default_category_map();

enum class RecordFormat { Delimited, JsonLines };

/// `.jsonl` / `.ndjson` select JsonLines; anything else is delimited text.
RecordFormat detect_record_format(const std::filesystem::path& path);

struct ParseResult {
  std::vector<CitationRecord> records;
  std::vector<Diagnostic> diagnostics;
};

/// Reads a record file. Malformed rows become diagnostics; a duplicate
/// record_id replaces the earlier record, which is dropped from its position.
/// Throws DataError if the stream is unreadable or the header is missing.
ParseResult parse_records(std::istream& in, RecordFormat format, std::string_view source = "<input>");

/// Parses several files concurrently; records are concatenated in argument
/// order and diagnostics sorted by (file, line).
ParseResult parse_record_files(const std::vector<std::filesystem::path>& paths);

void write_records(std::ostream& out, const std::vector<CitationRecord>& records, RecordFormat format);

/// Trims and collapses internal whitespace runs to one space.
std::string clean_name(std::string_view raw);

/// ASCII lower-case of clean_name; the alias lookup key.
std::string alias_key(std::string_view raw);

struct NormalizedName {
  std::string name;
  bool aliased = false;
};

/// Throws DataError on an empty or whitespace-only name.
NormalizedName normalize_publisher(std::string_view raw, const AliasTable& aliases);

/// Populates disciplines from the categories. Unknown categories produce a
/// diagnostic each; a record left with no discipline is marked unmapped.
CitationRecord assign_disciplines(CitationRecord record, const CategoryMap& map,
                                  std::vector<Diagnostic>& diagnostics);

AliasTable load_alias_table(std::istream& in, std::string_view source = "<aliases>");
CategoryMap load_category_map(std::istream& in, std::string_view source = "<categories>");
AliasTable load_alias_table(const std::filesystem::path& path);
CategoryMap load_category_map(const std::filesystem::path& path);

struct Corpus {
  std::vector<CitationRecord> records;
  std::vector<Diagnostic> diagnostics;

  std::size_t unmapped_count() const;
  /// Records assigned to the scope; the whole corpus when scope is empty.
  std::vector<CitationRecord> in_scope(const Scope& scope) const;
};

/// parse, normalize publishers and assign disciplines in one pass.
Corpus ingest(const std::vector<std::filesystem::path>& record_files, const AliasTable& aliases,
              const CategoryMap& categories);

/// Normalizes and assigns already-parsed records; diagnostics appended.
void resolve_records(std::vector<CitationRecord>& records, const AliasTable& aliases,
                     const CategoryMap& categories, std::vector<Diagnostic>& diagnostics);

}  // namespace citemap
