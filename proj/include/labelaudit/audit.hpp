#pragma once
// Step two of the audit: pair each contentious record with its nearest
// neighbor, tally the label-disagreement matrix, report duplicate-text label
// conflicts, and export the input rows with the audit columns appended.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/csv.hpp"
#include "labelaudit/ensemble.hpp"
#include "labelaudit/search.hpp"

#include <json.hpp>

namespace labelaudit {

inline std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

struct AuditPair {
  std::string query_id;     // contentious record
  std::string neighbor_id;  // its most similar other record
  double similarity = 0.0;
  int32_t query_label = -1;
  int32_t neighbor_label = -1;
  bool mismatch = false;  // labels disagree
};

struct PairResult {
  std::vector<AuditPair> pairs;
  std::vector<std::string> unmatched;  // queries with no positive-similarity neighbor
};

// One pair per contentious record that has a neighbor; the rest are listed
// as unmatched instead of being dropped. Both lists ordered by query id.
inline PairResult build_pairs(const std::vector<ContentiousRecord>& contentious,
                              const InvertedIndex& index, const Dataset& d) {
  PairResult result;
  for (const ContentiousRecord& rec : contentious) {
    auto it = index.id_to_ordinal.find(rec.id);
    if (it == index.id_to_ordinal.end())
      throw Error("build_pairs: contentious id '" + rec.id + "' missing from index");
    const int32_t ord = it->second;
    const auto neighbor = nearest_neighbor(index, index.vectors[ord], ord);
    if (!neighbor) {
      result.unmatched.push_back(rec.id);
      continue;
    }
    const int32_t query_ord = d.ordinal(rec.id);
    const int32_t neighbor_ord = d.ordinal(neighbor->id);
    if (query_ord < 0 || neighbor_ord < 0)
      throw Error("build_pairs: index and dataset disagree about id '" + rec.id + "'");
    AuditPair p;
    p.query_id = rec.id;
    p.neighbor_id = neighbor->id;
    p.similarity = neighbor->similarity;
    p.query_label = d.records[query_ord].label;
    p.neighbor_label = d.records[neighbor_ord].label;
    p.mismatch = p.query_label != p.neighbor_label;
    result.pairs.push_back(std::move(p));
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const AuditPair& a, const AuditPair& b) { return a.query_id < b.query_id; });
  std::sort(result.unmatched.begin(), result.unmatched.end());
  return result;
}

// Rows are the similar tweet's label, columns the contentious tweet's label,
// so diagonal cells are agreements.
struct InconsistencyMatrix {
  std::vector<std::string> labels;  // schema order, both axes
  std::vector<std::vector<int64_t>> counts;  // [similar][contentious]
  int64_t total = 0;
};

inline InconsistencyMatrix build_matrix(const std::vector<AuditPair>& pairs,
                                        const LabelSchema& schema) {
  InconsistencyMatrix m;
  m.labels = schema.names;
  const int32_t L = static_cast<int32_t>(schema.size());
  m.counts.assign(L, std::vector<int64_t>(L, 0));
  for (const AuditPair& p : pairs) {
    if (p.query_label < 0 || p.query_label >= L || p.neighbor_label < 0 || p.neighbor_label >= L)
      throw Error("build_matrix: pair " + p.query_id + " has a label outside the schema");
    ++m.counts[p.neighbor_label][p.query_label];
    ++m.total;
  }
  return m;
}

struct DuplicateConflict {
  std::string key;
  uint64_t key_hash = 0;  // stable digest of the normalized key
  std::vector<std::string> member_ids;
  std::vector<std::string> labels;  // distinct label names, first-appearance order
};

inline std::vector<DuplicateConflict> duplicate_label_conflicts(
    const std::vector<DuplicateGroup>& groups, const Dataset& d) {
  std::vector<DuplicateConflict> out;
  for (const DuplicateGroup& g : groups) {
    if (!g.conflict) continue;
    DuplicateConflict c;
    c.key = g.key;
    c.key_hash = fnv1a64(g.key);
    c.member_ids = g.member_ids;
    std::unordered_set<int32_t> seen;
    for (const std::string& id : g.member_ids) {
      const int32_t label = d.records[d.ordinal(id)].label;
      if (seen.insert(label).second) c.labels.push_back(d.schema.names[label]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifact writers

inline void write_pairs_csv(const std::string& path, const std::vector<AuditPair>& pairs,
                            const LabelSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  csv::write_csv_row(out, {"query_id", "neighbor_id", "similarity", "query_label", "neighbor_label",
                      "mismatch"});
  for (const AuditPair& p : pairs)
    csv::write_csv_row(out, {p.query_id, p.neighbor_id, fixed9(p.similarity),
                        schema.names[p.query_label], schema.names[p.neighbor_label],
                        p.mismatch ? "true" : "false"});
  if (!out.flush()) throw Error("cannot write " + path);
}

inline void write_matrix_csv(const std::string& path, const InconsistencyMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  std::vector<std::string> row = {""};  // corner cell; columns are contentious labels
  row.insert(row.end(), m.labels.begin(), m.labels.end());
  csv::write_csv_row(out, row);
  for (size_t r = 0; r < m.labels.size(); ++r) {
    row = {m.labels[r]};
    for (int64_t c : m.counts[r]) row.push_back(std::to_string(c));
    csv::write_csv_row(out, row);
  }
  if (!out.flush()) throw Error("cannot write " + path);
}

inline std::string join_semicolon(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ';';
    out += parts[i];
  }
  return out;
}

inline void write_duplicates_csv(const std::string& path,
                                 const std::vector<DuplicateConflict>& conflicts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  csv::write_csv_row(out, {"group_key_hash", "member_ids", "labels"});
  for (const DuplicateConflict& c : conflicts) {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(c.key_hash));
    csv::write_csv_row(out, {hash, join_semicolon(c.member_ids), join_semicolon(c.labels)});
  }
  if (!out.flush()) throw Error("cannot write " + path);
}

// Original rows preserved in the input's own format, with the audit verdict
// appended per record. Returns the number of data rows written.
inline int64_t export_augmented(const Dataset& d,
                                const std::vector<ContentiousRecord>& contentious,
                                const std::vector<AuditPair>& pairs,
                                const std::vector<DuplicateConflict>& conflicts,
                                const std::string& out_path) {
  std::unordered_map<std::string, int32_t> wrong_by_id;
  for (const ContentiousRecord& r : contentious) wrong_by_id.emplace(r.id, r.wrong_count);
  std::unordered_map<std::string, const AuditPair*> pair_by_query;
  for (const AuditPair& p : pairs) pair_by_query.emplace(p.query_id, &p);
  std::unordered_set<std::string> conflicted;
  for (const DuplicateConflict& c : conflicts)
    conflicted.insert(c.member_ids.begin(), c.member_ids.end());

  static const std::vector<std::string> kAppended = {
      "is_contentious", "wrong_count",    "neighbor_id",       "neighbor_label",
      "similarity",     "label_mismatch", "duplicate_conflict"};

  auto appended_fields = [&](const Record& r) {
    std::vector<std::string> f(kAppended.size());
    auto wit = wrong_by_id.find(r.id);
    const bool is_contentious = wit != wrong_by_id.end();
    f[0] = is_contentious ? "true" : "false";
    if (is_contentious) f[1] = std::to_string(wit->second);
    if (auto pit = pair_by_query.find(r.id); pit != pair_by_query.end()) {
      const AuditPair& p = *pit->second;
      f[2] = p.neighbor_id;
      f[3] = d.schema.names[p.neighbor_label];
      f[4] = fixed9(p.similarity);
      f[5] = p.mismatch ? "true" : "false";
    } else {
      f[5] = "false";
    }
    f[6] = conflicted.count(r.id) ? "true" : "false";
    return f;
  };

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  int64_t written = 0;

  if (d.source_format == Format::jsonl) {
    const bool have_lines = d.source_lines.size() == d.records.size();
    const std::string label_field = d.source_label_field.empty() ? "label" : d.source_label_field;
    for (size_t i = 0; i < d.records.size(); ++i) {
      nlohmann::ordered_json obj;
      if (have_lines) {
        obj = nlohmann::ordered_json::parse(d.source_lines[i]);
      } else {
        obj["id"] = d.records[i].id;
        obj["text"] = d.records[i].text;
        obj[label_field] = d.schema.names[d.records[i].label];
      }
      const std::vector<std::string> f = appended_fields(d.records[i]);
      for (size_t c = 0; c < kAppended.size(); ++c) obj[kAppended[c]] = f[c];
      out << obj.dump() << '\n';
      ++written;
    }
  } else {
    const bool tab = d.source_format == Format::tsv;
    auto write_row = tab ? csv::write_tsv_row : csv::write_csv_row;
    const bool have_rows =
        d.source_rows.size() == d.records.size() && !d.source_header.empty();
    std::vector<std::string> header =
        have_rows ? d.source_header : std::vector<std::string>{"id", "text", "label"};
    header.insert(header.end(), kAppended.begin(), kAppended.end());
    write_row(out, header);
    for (size_t i = 0; i < d.records.size(); ++i) {
      std::vector<std::string> row =
          have_rows ? d.source_rows[i]
                    : std::vector<std::string>{d.records[i].id, d.records[i].text,
                                               d.schema.names[d.records[i].label]};
      const std::vector<std::string> f = appended_fields(d.records[i]);
      row.insert(row.end(), f.begin(), f.end());
      write_row(out, row);
      ++written;
    }
  }
  if (!out.flush()) throw Error("cannot write " + out_path);
  return written;
}

}  // namespace labelaudit
