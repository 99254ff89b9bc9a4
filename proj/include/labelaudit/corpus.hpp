#pragma once
// Labeled text corpora: loading from CSV/TSV/JSONL, label schemas,
// stratified fold assignment, and duplicate-text grouping.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "labelaudit/common.hpp"
#include "labelaudit/csv.hpp"
#include "labelaudit/unicode.hpp"

namespace labelaudit {

// Closed label set. Order is fixed at load time and defines matrix
// row/column order and every tie-break in the pipeline.
struct LabelSchema {
  std::vector<std::string> names;

  int32_t index_of(std::string_view name) const {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int32_t>(i);
    return -1;
  }
  size_t size() const { return names.size(); }
};

// One labeled text item. `label` indexes the owning dataset's schema.
struct Record {
  std::string id;
  std::string text;
  int32_t label = -1;
};

enum class Format { csv, tsv, jsonl };

inline std::string format_name(Format f) {
  switch (f) {
    case Format::csv: return "csv";
    case Format::tsv: return "tsv";
    case Format::jsonl: return "jsonl";
  }
  return "csv";
}

inline Format parse_format(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "tsv") return Format::tsv;
  if (s == "jsonl") return Format::jsonl;
  throw Error("unknown format: " + std::string(s) + " (expected csv, tsv or jsonl)");
}

// Which input columns/fields carry the record parts. Empty id_col means
// ids are synthesized as zero-based row ordinals.
struct ColumnSpec {
  std::string id_col;
  std::string text_col = "text";
  std::string label_col = "label";
};

struct Dataset {
  LabelSchema schema;
  std::vector<Record> records;
  std::vector<int64_t> class_counts;  // per schema label

  // Raw source preserved for verbatim re-export. Empty for datasets built
  // in memory (synthetic corpora, tests).
  Format source_format = Format::csv;
  std::vector<std::string> source_header;             // csv/tsv column names
  std::vector<std::vector<std::string>> source_rows;  // csv/tsv fields per record
  std::vector<std::string> source_lines;              // jsonl raw lines per record
  int32_t source_label_col = -1;                      // csv/tsv label column position
  std::string source_label_field;                     // jsonl label field name

  std::unordered_map<std::string, int32_t> ordinal_of;  // id -> position in records

  size_t size() const { return records.size(); }

  int32_t ordinal(const std::string& id) const {
    auto it = ordinal_of.find(id);
    return it == ordinal_of.end() ? -1 : it->second;
  }

  // Recomputes class counts and the id index; validates invariants.
  void finalize() {
    class_counts.assign(schema.size(), 0);
    ordinal_of.clear();
    ordinal_of.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
      const Record& r = records[i];
      if (r.label < 0 || static_cast<size_t>(r.label) >= schema.size())
        throw Error("record " + r.id + ": label index out of schema range");
      ++class_counts[r.label];
      if (!ordinal_of.emplace(r.id, static_cast<int32_t>(i)).second)
        throw Error("duplicate record id: " + r.id);
    }
  }
};

inline Dataset make_dataset(std::vector<std::string> label_names, std::vector<Record> records) {
  Dataset d;
  d.schema.names = std::move(label_names);
  d.records = std::move(records);
  d.finalize();
  return d;
}

namespace detail {

inline int32_t find_column(const std::vector<std::string>& header, const std::string& name,
                           const std::string& path) {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int32_t>(i);
  throw Error(path + ": column '" + name + "' not found in header");
}

inline int32_t resolve_label(Dataset& d, const std::string& label, bool schema_is_open,
                             size_t row_number, const std::string& path) {
  int32_t idx = d.schema.index_of(label);
  if (idx >= 0) return idx;
  if (!schema_is_open)
    throw Error(path + ": unknown label '" + label + "' at row " + std::to_string(row_number));
  d.schema.names.push_back(label);
  return static_cast<int32_t>(d.schema.names.size() - 1);
}

}  // namespace detail

// Loads a labeled dataset. Schema is the distinct labels in first-appearance
// order unless `explicit_schema` is given. Row order is preserved. Rows are
// numbered from 1 (header excluded) in error messages.
inline Dataset load_dataset(const std::string& path, Format format, const ColumnSpec& cols,
                            std::optional<std::vector<std::string>> explicit_schema = std::nullopt) {
  Dataset d;
  d.source_format = format;
  const bool schema_is_open = !explicit_schema.has_value();
  if (explicit_schema) {
    d.schema.names = *explicit_schema;
    if (d.schema.names.empty()) throw Error("explicit schema must be nonempty");
  }

  if (format == Format::jsonl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    d.source_label_field = cols.label_col;
    std::string line;
    size_t row_number = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      ++row_number;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": invalid JSON at row " + std::to_string(row_number) + ": " + e.what());
      }
      if (!obj.is_object())
        throw Error(path + ": row " + std::to_string(row_number) + " is not a JSON object");

      Record rec;
      if (!cols.id_col.empty()) {
        if (!obj.contains(cols.id_col))
          throw Error(path + ": missing id at row " + std::to_string(row_number));
        const auto& v = obj[cols.id_col];
        rec.id = v.is_string() ? v.get<std::string>() : v.dump();
      } else {
        rec.id = std::to_string(row_number - 1);
      }
      if (!obj.contains(cols.text_col))
        throw Error(path + ": missing text at row " + std::to_string(row_number));
      rec.text = obj[cols.text_col].is_string() ? obj[cols.text_col].get<std::string>()
                                                : obj[cols.text_col].dump();
      if (!obj.contains(cols.label_col) || (obj[cols.label_col].is_string() &&
                                            obj[cols.label_col].get<std::string>().empty()))
        throw Error(path + ": missing label at row " + std::to_string(row_number));
      std::string label = obj[cols.label_col].is_string() ? obj[cols.label_col].get<std::string>()
                                                          : obj[cols.label_col].dump();
      rec.label = detail::resolve_label(d, label, schema_is_open, row_number, path);

      d.records.push_back(std::move(rec));
      d.source_lines.push_back(line);
    }
  } else {
    auto rows = csv::read_table(path, format == Format::tsv);
    if (rows.empty()) throw Error(path + ": empty file");
    d.source_header = rows[0];
    const int32_t text_col = detail::find_column(d.source_header, cols.text_col, path);
    const int32_t label_col = detail::find_column(d.source_header, cols.label_col, path);
    const int32_t id_col =
        cols.id_col.empty() ? -1 : detail::find_column(d.source_header, cols.id_col, path);
    d.source_label_col = label_col;

    for (size_t i = 1; i < rows.size(); ++i) {
      const size_t row_number = i;  // 1-based data row
      auto& fields = rows[i];
      const size_t needed = static_cast<size_t>(std::max({text_col, label_col, id_col})) + 1;
      if (fields.size() < needed) {
        if (static_cast<size_t>(label_col) >= fields.size())
          throw Error(path + ": missing label at row " + std::to_string(row_number));
        throw Error(path + ": missing text at row " + std::to_string(row_number));
      }
      if (fields[label_col].empty())
        throw Error(path + ": missing label at row " + std::to_string(row_number));

      Record rec;
      rec.id = id_col >= 0 ? fields[id_col] : std::to_string(row_number - 1);
      rec.text = fields[text_col];
      rec.label = detail::resolve_label(d, fields[label_col], schema_is_open, row_number, path);
      d.records.push_back(std::move(rec));
      d.source_rows.push_back(std::move(fields));
    }
  }

  if (d.records.empty()) throw Error(path + ": dataset is empty");
  d.finalize();
  return d;
}

// Stratified k-fold assignment: per label class, a seeded shuffle followed by
// round-robin dealing, so per-label fold sizes differ by at most one.
struct FoldAssignment {
  int32_t k = 0;
  std::unordered_map<std::string, int32_t> fold_of;  // record id -> fold
  std::vector<int32_t> by_ordinal;                   // same assignment by record position

  int32_t fold(const Dataset& d, int32_t ordinal) const {
    (void)d;
    return by_ordinal[ordinal];
  }
};

inline FoldAssignment stratified_kfold(const Dataset& d, int k, uint64_t seed) {
  if (k < 2) throw Error("stratified_kfold: k must be >= 2");
  if (static_cast<size_t>(k) > d.size())
    throw Error("stratified_kfold: k (" + std::to_string(k) + ") exceeds record count (" +
                std::to_string(d.size()) + ")");

  FoldAssignment fa;
  fa.k = k;
  fa.by_ordinal.assign(d.size(), -1);

  std::vector<std::vector<int32_t>> by_label(d.schema.size());
  for (size_t i = 0; i < d.size(); ++i)
    by_label[d.records[i].label].push_back(static_cast<int32_t>(i));

  std::mt19937_64 rng(seed);
  for (auto& ordinals : by_label) {
    std::shuffle(ordinals.begin(), ordinals.end(), rng);
    for (size_t j = 0; j < ordinals.size(); ++j)
      fa.by_ordinal[ordinals[j]] = static_cast<int32_t>(j % k);
  }

  fa.fold_of.reserve(d.size());
  for (size_t i = 0; i < d.size(); ++i) fa.fold_of.emplace(d.records[i].id, fa.by_ordinal[i]);
  return fa;
}

enum class DuplicateMode { exact, retweet_core };

inline std::string duplicate_mode_name(DuplicateMode m) {
  return m == DuplicateMode::exact ? "exact" : "retweet_core";
}

inline DuplicateMode parse_duplicate_mode(std::string_view s) {
  if (s == "exact") return DuplicateMode::exact;
  if (s == "retweet_core") return DuplicateMode::retweet_core;
  throw Error("unknown duplicate mode: " + std::string(s));
}

// Records whose normalized text coincides. `conflict` is set when members
// carry at least two distinct labels.
struct DuplicateGroup {
  std::string key;
  std::vector<std::string> member_ids;
  bool conflict = false;
};

// Groups of size >= 2, ordered by first occurrence in the dataset.
inline std::vector<DuplicateGroup> find_duplicate_groups(const Dataset& d, DuplicateMode mode) {
  std::unordered_map<std::string, size_t> slot_of_key;
  std::vector<DuplicateGroup> groups;
  std::vector<std::unordered_set<int32_t>> labels_seen;

  for (const Record& rec : d.records) {
    std::string key = mode == DuplicateMode::exact ? exact_duplicate_key(rec.text)
                                                   : retweet_core_key(rec.text);
    auto [it, inserted] = slot_of_key.emplace(std::move(key), groups.size());
    if (inserted) {
      groups.push_back(DuplicateGroup{it->first, {}, false});
      labels_seen.emplace_back();
    }
    groups[it->second].member_ids.push_back(rec.id);
    labels_seen[it->second].insert(rec.label);
  }

  std::vector<DuplicateGroup> out;
  for (size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].member_ids.size() < 2) continue;
    groups[i].conflict = labels_seen[i].size() >= 2;
    out.push_back(std::move(groups[i]));
  }
  return out;
}

}  // namespace labelaudit
