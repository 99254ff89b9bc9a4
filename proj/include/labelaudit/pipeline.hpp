#pragma once
// End-to-end orchestration: run configuration, the audit pipeline with
// built-in conservation checks, run artifacts (summary.md, run.json), and
// report rendering from a finished run directory.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "labelaudit/audit.hpp"
#include "labelaudit/classifiers.hpp"
#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/csv.hpp"
#include "labelaudit/ensemble.hpp"
#include "labelaudit/search.hpp"
#include "labelaudit/synth.hpp"
#include "labelaudit/textproc.hpp"

#include <json.hpp>

namespace labelaudit {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  std::string input;
  Format format = Format::csv;
  ColumnSpec columns;
  int k_folds = 5;
  int min_df = 1;
  uint64_t seed = 42;
  bool per_fold_tfidf = false;
  DuplicateMode duplicate_mode = DuplicateMode::exact;
  std::vector<ClassifierSpec> classifiers = default_classifier_roster();
  std::string out_dir;
};

inline std::string trim_copy(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

// Splits on `sep` outside parentheses; trims parts; drops empties.
inline std::vector<std::string> split_top_level(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '(') ++depth;
    else if (i < s.size() && s[i] == ')') --depth;
    else if (i == s.size() || (s[i] == sep && depth == 0)) {
      std::string part = trim_copy(s.substr(start, i - start));
      if (!part.empty()) out.push_back(std::move(part));
      start = i + 1;
    }
  }
  return out;
}

inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "input") cfg.input = value;
    else if (key == "format") cfg.format = parse_format(value);
    else if (key == "id_col") cfg.columns.id_col = value;
    else if (key == "text_col") cfg.columns.text_col = value;
    else if (key == "label_col") cfg.columns.label_col = value;
    else if (key == "k_folds") cfg.k_folds = std::stoi(value);
    else if (key == "min_df") cfg.min_df = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "tfidf_scope") {
      if (value == "global") cfg.per_fold_tfidf = false;
      else if (value == "per_fold") cfg.per_fold_tfidf = true;
      else throw Error("tfidf_scope must be global or per_fold");
    } else if (key == "duplicate_mode") cfg.duplicate_mode = parse_duplicate_mode(value);
    else if (key == "classifiers") {
      std::vector<ClassifierSpec> specs;
      for (const std::string& part : split_top_level(value, ','))
        specs.push_back(parse_classifier_spec(part));
      if (specs.empty()) throw Error("classifier list is empty");
      cfg.classifiers = std::move(specs);
    } else if (key == "out") cfg.out_dir = value;
    else throw Error("unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw Error("config: bad value for '" + key + "': " + value);
  } catch (const std::out_of_range&) {
    throw Error("config: value out of range for '" + key + "': " + value);
  }
}

// Flat key=value file; '#' starts a comment. CLI flags override these values.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim_copy(line);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      apply_config_value(cfg, trim_copy(stripped.substr(0, eq)),
                         trim_copy(stripped.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

struct Breakdown {
  std::vector<std::string> labels;
  std::vector<int64_t> total;
  std::vector<int64_t> contentious;
  std::vector<int64_t> clean;
  std::vector<double> fraction;  // contentious/total, 0 for an empty class
};

inline Breakdown class_breakdown(const Dataset& d,
                                 const std::vector<ContentiousRecord>& contentious) {
  Breakdown b;
  b.labels = d.schema.names;
  b.total = d.class_counts;
  b.contentious.assign(d.schema.size(), 0);
  for (const ContentiousRecord& rec : contentious) {
    const int32_t ord = d.ordinal(rec.id);
    if (ord < 0) throw Error("class_breakdown: unknown id '" + rec.id + "'");
    ++b.contentious[d.records[ord].label];
  }
  b.clean.resize(b.total.size());
  b.fraction.resize(b.total.size());
  for (size_t i = 0; i < b.total.size(); ++i) {
    b.clean[i] = b.total[i] - b.contentious[i];
    b.fraction[i] = b.total[i] > 0
                        ? static_cast<double>(b.contentious[i]) / static_cast<double>(b.total[i])
                        : 0.0;
  }
  return b;
}

struct NoiseSummary {
  double epsilon = 0.0;
  DetectionMetrics metrics;
};

// Everything a rendered report needs, whether it comes from a live run or is
// parsed back out of a run directory.
struct ReportData {
  std::string input;
  int64_t n_records = 0;
  std::vector<std::string> labels;
  std::vector<int64_t> class_counts;
  int n_classifiers = 0;
  int32_t threshold = 0;
  int k_folds = 0;
  uint64_t seed = 0;
  int64_t n_contentious = 0;
  int64_t n_pairs = 0;
  int64_t n_mismatch = 0;
  int64_t n_unmatched = 0;
  int64_t n_groups = 0;
  int64_t n_conflicts = 0;
  Breakdown breakdown;
  InconsistencyMatrix matrix;
  std::vector<AuditPair> top_pairs;  // mismatches, highest similarity first, at most 20
  std::optional<NoiseSummary> noise;
};

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::string render_md(const ReportData& r) {
  std::ostringstream out;
  out << "# Annotation audit summary\n\n";
  out << "- input: `" << r.input << "` (" << r.n_records << " records, " << r.labels.size()
      << " labels)\n";
  out << "- ensemble: " << r.n_classifiers << " classifiers, contentious threshold "
      << r.threshold << " of " << r.n_classifiers << ", " << r.k_folds << " folds, seed "
      << r.seed << "\n";
  const double pct =
      r.n_records > 0 ? 100.0 * static_cast<double>(r.n_contentious) / r.n_records : 0.0;
  out << "- contentious records: " << r.n_contentious << " (" << fixed(pct, 2)
      << "% of dataset)\n";
  out << "- neighbor pairs: " << r.n_pairs << " (" << r.n_mismatch
      << " with label mismatch); unmatched queries: " << r.n_unmatched << "\n";
  out << "- duplicate groups: " << r.n_groups << "; with conflicting labels: " << r.n_conflicts
      << "\n";

  out << "\n## Class breakdown\n\n";
  out << "| label | total | contentious | clean | fraction |\n";
  out << "| --- | ---: | ---: | ---: | ---: |\n";
  for (size_t i = 0; i < r.breakdown.labels.size(); ++i)
    out << "| " << r.breakdown.labels[i] << " | " << r.breakdown.total[i] << " | "
        << r.breakdown.contentious[i] << " | " << r.breakdown.clean[i] << " | "
        << fixed(r.breakdown.fraction[i], 4) << " |\n";

  out << "\n## Inconsistency matrix\n\n";
  out << "Rows: similar-record label. Columns: contentious-record label.\n\n";
  out << "| |";
  for (const std::string& l : r.matrix.labels) out << " " << l << " |";
  out << "\n| --- |";
  for (size_t i = 0; i < r.matrix.labels.size(); ++i) out << " ---: |";
  out << "\n";
  for (size_t row = 0; row < r.matrix.labels.size(); ++row) {
    out << "| " << r.matrix.labels[row] << " |";
    for (int64_t c : r.matrix.counts[row]) out << " " << c << " |";
    out << "\n";
  }

  out << "\n## Top mismatched pairs\n\n";
  if (r.top_pairs.empty()) {
    out << "none\n";
  } else {
    out << "| query_id | query_label | neighbor_id | neighbor_label | similarity |\n";
    out << "| --- | --- | --- | --- | ---: |\n";
    for (const AuditPair& p : r.top_pairs)
      out << "| " << p.query_id << " | " << r.labels[p.query_label] << " | " << p.neighbor_id
          << " | " << r.labels[p.neighbor_label] << " | " << fixed9(p.similarity) << " |\n";
  }

  if (r.noise) {
    const DetectionMetrics& m = r.noise->metrics;
    out << "\n## Noise detection\n\n";
    out << "- planted flips: " << m.n_flipped << " (epsilon " << fixed(r.noise->epsilon, 4)
        << ")\n";
    out << "- flagged records: " << m.n_flagged << "; true flips among them: " << m.n_hit
        << "\n";
    out << "- precision: " << (m.precision ? fixed(*m.precision, 6) : std::string("n/a"))
        << "\n";
    out << "- recall: " << fixed(m.recall, 6) << "\n";
    out << "- f1: " << (m.f1 ? fixed(*m.f1, 6) : std::string("n/a")) << "\n";
  }
  return out.str();
}

inline std::string render_csv(const ReportData& r) {
  std::ostringstream out;
  auto row = [&](const std::vector<std::string>& fields) { csv::write_csv_row(out, fields); };
  row({"section", "field", "values"});
  row({"stats", "input", r.input});
  row({"stats", "n_records", std::to_string(r.n_records)});
  row({"stats", "n_labels", std::to_string(r.labels.size())});
  row({"stats", "n_classifiers", std::to_string(r.n_classifiers)});
  row({"stats", "majority_threshold", std::to_string(r.threshold)});
  row({"stats", "k_folds", std::to_string(r.k_folds)});
  row({"stats", "seed", std::to_string(r.seed)});
  row({"stats", "n_contentious", std::to_string(r.n_contentious)});
  row({"stats", "n_pairs", std::to_string(r.n_pairs)});
  row({"stats", "n_mismatch_pairs", std::to_string(r.n_mismatch)});
  row({"stats", "n_unmatched", std::to_string(r.n_unmatched)});
  row({"stats", "n_duplicate_groups", std::to_string(r.n_groups)});
  row({"stats", "n_duplicate_conflicts", std::to_string(r.n_conflicts)});
  for (size_t i = 0; i < r.breakdown.labels.size(); ++i)
    row({"class", r.breakdown.labels[i], std::to_string(r.breakdown.total[i]),
         std::to_string(r.breakdown.contentious[i]), std::to_string(r.breakdown.clean[i]),
         fixed(r.breakdown.fraction[i], 6)});
  for (size_t a = 0; a < r.matrix.labels.size(); ++a)
    for (size_t b = 0; b < r.matrix.labels.size(); ++b)
      row({"matrix", r.matrix.labels[a], r.matrix.labels[b],
           std::to_string(r.matrix.counts[a][b])});
  for (size_t i = 0; i < r.top_pairs.size(); ++i) {
    const AuditPair& p = r.top_pairs[i];
    row({"top_pair", std::to_string(i + 1), p.query_id, r.labels[p.query_label], p.neighbor_id,
         r.labels[p.neighbor_label], fixed9(p.similarity)});
  }
  if (r.noise) {
    const DetectionMetrics& m = r.noise->metrics;
    row({"noise", "epsilon", fixed(r.noise->epsilon, 6)});
    row({"noise", "n_flipped", std::to_string(m.n_flipped)});
    row({"noise", "n_flagged", std::to_string(m.n_flagged)});
    row({"noise", "n_hit", std::to_string(m.n_hit)});
    row({"noise", "precision", m.precision ? fixed(*m.precision, 6) : "na"});
    row({"noise", "recall", fixed(m.recall, 6)});
    row({"noise", "f1", m.f1 ? fixed(*m.f1, 6) : "na"});
  }
  return out.str();
}

struct RunResult {
  Dataset dataset;
  TfidfModel tfidf;
  FoldAssignment folds;
  PredictionTable table;
  std::vector<ContentiousRecord> contentious;
  PairResult pairs;
  InconsistencyMatrix matrix;
  std::vector<DuplicateGroup> duplicate_groups;
  std::vector<DuplicateConflict> conflicts;
  Breakdown breakdown;
  std::unordered_set<std::string> flagged;  // contentious with a mismatching neighbor
  int64_t augmented_rows = 0;
  std::string out_dir;
};

// Output totals must balance; a violation is an internal bug, not bad input.
inline void verify_conservation(const RunResult& r) {
  auto fail = [](const std::string& what) { throw Error("conservation check failed: " + what); };
  if (r.matrix.total != static_cast<int64_t>(r.pairs.pairs.size()))
    fail("matrix total != pair count");
  if (r.pairs.pairs.size() + r.pairs.unmatched.size() != r.contentious.size())
    fail("pairs + unmatched != contentious");
  int64_t breakdown_total = 0;
  for (size_t i = 0; i < r.breakdown.total.size(); ++i) {
    if (r.breakdown.contentious[i] + r.breakdown.clean[i] != r.breakdown.total[i])
      fail("breakdown split does not sum to class count");
    if (r.breakdown.total[i] != r.dataset.class_counts[i])
      fail("breakdown class count mismatch");
    breakdown_total += r.breakdown.total[i];
  }
  if (breakdown_total != static_cast<int64_t>(r.dataset.size()))
    fail("breakdown total != dataset size");
}

inline ReportData make_report_data(const RunConfig& cfg, const RunResult& r) {
  ReportData d;
  d.input = cfg.input;
  d.n_records = static_cast<int64_t>(r.dataset.size());
  d.labels = r.dataset.schema.names;
  d.class_counts = r.dataset.class_counts;
  d.n_classifiers = static_cast<int>(cfg.classifiers.size());
  d.threshold = majority_threshold(static_cast<int32_t>(cfg.classifiers.size()));
  d.k_folds = cfg.k_folds;
  d.seed = cfg.seed;
  d.n_contentious = static_cast<int64_t>(r.contentious.size());
  d.n_pairs = static_cast<int64_t>(r.pairs.pairs.size());
  d.n_unmatched = static_cast<int64_t>(r.pairs.unmatched.size());
  d.n_groups = static_cast<int64_t>(r.duplicate_groups.size());
  d.n_conflicts = static_cast<int64_t>(r.conflicts.size());
  d.breakdown = r.breakdown;
  d.matrix = r.matrix;
  for (const AuditPair& p : r.pairs.pairs)
    if (p.mismatch) {
      ++d.n_mismatch;
      d.top_pairs.push_back(p);
    }
  std::sort(d.top_pairs.begin(), d.top_pairs.end(), [](const AuditPair& a, const AuditPair& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.query_id < b.query_id;
  });
  if (d.top_pairs.size() > 20) d.top_pairs.resize(20);
  return d;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out.flush()) throw Error("cannot write " + path);
}

inline void write_run_json(const std::string& path, const RunConfig& cfg, const RunResult& r,
                           uint64_t fold_seed, uint64_t cv_seed) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  nlohmann::ordered_json c;
  c["input"] = cfg.input;
  c["format"] = format_name(cfg.format);
  c["id_col"] = cfg.columns.id_col;
  c["text_col"] = cfg.columns.text_col;
  c["label_col"] = cfg.columns.label_col;
  c["k_folds"] = cfg.k_folds;
  c["min_df"] = cfg.min_df;
  c["seed"] = cfg.seed;
  c["tfidf_scope"] = cfg.per_fold_tfidf ? "per_fold" : "global";
  c["duplicate_mode"] = duplicate_mode_name(cfg.duplicate_mode);
  nlohmann::ordered_json specs = nlohmann::ordered_json::array();
  for (const ClassifierSpec& s : cfg.classifiers) specs.push_back(spec_to_string(s));
  c["classifiers"] = std::move(specs);
  c["out"] = cfg.out_dir;
  j["config"] = std::move(c);
  j["seeds"] = {{"run", cfg.seed}, {"folds", fold_seed}, {"cv", cv_seed}};
  j["dataset"] = {{"n_records", r.dataset.size()},
                  {"labels", r.dataset.schema.names},
                  {"class_counts", r.dataset.class_counts}};
  j["results"] = {
      {"majority_threshold", majority_threshold(static_cast<int32_t>(cfg.classifiers.size()))},
      {"n_contentious", r.contentious.size()},
      {"n_pairs", r.pairs.pairs.size()},
      {"n_mismatch_pairs", r.flagged.size()},
      {"n_unmatched", r.pairs.unmatched.size()},
      {"n_duplicate_groups", r.duplicate_groups.size()},
      {"n_duplicate_conflicts", r.conflicts.size()}};
  write_text_file(path, j.dump(2) + "\n");
}

// Load -> featurize -> cross-validated voting -> neighbor audit -> exports.
// Nothing is written until the whole pipeline has succeeded, so a failed run
// leaves no partial output directory behind.
inline RunResult run_audit(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error("run: input path required");
  if (cfg.out_dir.empty()) throw Error("run: output directory required");
  if (cfg.k_folds < 2) throw Error("run: k_folds must be >= 2");
  if (cfg.min_df < 1) throw Error("run: min_df must be >= 1");
  if (cfg.classifiers.empty()) throw Error("run: classifier roster is empty");

  RunResult r;
  r.out_dir = cfg.out_dir;
  r.dataset = load_dataset(cfg.input, cfg.format, cfg.columns);
  r.tfidf = fit_tfidf(r.dataset, cfg.min_df);

  const uint64_t fold_seed = mix_seed(cfg.seed, 1);
  const uint64_t cv_seed = mix_seed(cfg.seed, 2);
  r.folds = stratified_kfold(r.dataset, cfg.k_folds, fold_seed);

  CvOptions cv_opt;
  cv_opt.per_fold_tfidf = cfg.per_fold_tfidf;
  cv_opt.min_df = cfg.min_df;
  r.table = cross_val_predict(r.dataset, r.folds, cfg.classifiers, r.tfidf, cv_seed, cv_opt);
  r.contentious = vote_contentious(r.dataset, r.table);

  const InvertedIndex index = build_index(r.dataset, r.tfidf);
  r.pairs = build_pairs(r.contentious, index, r.dataset);
  r.matrix = build_matrix(r.pairs.pairs, r.dataset.schema);
  r.duplicate_groups = find_duplicate_groups(r.dataset, cfg.duplicate_mode);
  r.conflicts = duplicate_label_conflicts(r.duplicate_groups, r.dataset);
  r.breakdown = class_breakdown(r.dataset, r.contentious);
  for (const AuditPair& p : r.pairs.pairs)
    if (p.mismatch) r.flagged.insert(p.query_id);

  verify_conservation(r);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  auto path_of = [&](const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
  };
  write_contentious_csv(path_of("contentious.csv"), r.dataset, r.table, r.contentious);
  write_pairs_csv(path_of("pairs.csv"), r.pairs.pairs, r.dataset.schema);
  write_matrix_csv(path_of("matrix.csv"), r.matrix);
  write_duplicates_csv(path_of("duplicates.csv"), r.conflicts);
  r.augmented_rows = export_augmented(r.dataset, r.contentious, r.pairs.pairs, r.conflicts,
                                      path_of("augmented." + format_name(cfg.format)));
  if (r.augmented_rows != static_cast<int64_t>(r.dataset.size()))
    throw Error("conservation check failed: augmented rows != input rows");
  write_run_json(path_of("run.json"), cfg, r, fold_seed, cv_seed);
  write_text_file(path_of("summary.md"), render_md(make_report_data(cfg, r)));
  return r;
}

// Folds measured noise-detection quality into an existing run directory
// (extra summary section, "noise" object in run.json).
inline void record_noise_metrics(const std::string& run_dir, double epsilon,
                                 const DetectionMetrics& m) {
  namespace fs = std::filesystem;
  const std::string json_path = (fs::path(run_dir) / "run.json").string();
  std::ifstream in(json_path);
  if (!in) throw Error("missing artifact " + json_path);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(in, nullptr, true);
  in.close();
  nlohmann::ordered_json n;
  n["epsilon"] = epsilon;
  n["n_flipped"] = m.n_flipped;
  n["n_flagged"] = m.n_flagged;
  n["n_hit"] = m.n_hit;
  if (m.precision) n["precision"] = *m.precision;
  else n["precision"] = nullptr;
  n["recall"] = m.recall;
  if (m.f1) n["f1"] = *m.f1;
  else n["f1"] = nullptr;
  j["noise"] = std::move(n);
  write_text_file(json_path, j.dump(2) + "\n");

  ReportData stub;  // render just the noise section and append it
  stub.noise = NoiseSummary{epsilon, m};
  const std::string rendered = render_md(stub);
  const size_t at = rendered.find("## Noise detection");
  const std::string summary_path = (fs::path(run_dir) / "summary.md").string();
  std::ofstream out(summary_path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot write " + summary_path);
  out << "\n" << rendered.substr(at);
  if (!out.flush()) throw Error("cannot write " + summary_path);
}

// Rebuilds a report from a run directory's artifacts alone.
inline std::string render_report(const std::string& run_dir, const std::string& format) {
  if (format != "md" && format != "csv")
    throw Error("report format must be md or csv, got '" + format + "'");
  namespace fs = std::filesystem;
  auto need = [&](const std::string& name) {
    const fs::path p = fs::path(run_dir) / name;
    if (!fs::exists(p)) throw Error("missing artifact " + p.string());
    return p.string();
  };

  std::ifstream jin(need("run.json"));
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(jin, nullptr, true);

  ReportData r;
  r.input = j.at("config").at("input").get<std::string>();
  r.n_records = j.at("dataset").at("n_records").get<int64_t>();
  r.labels = j.at("dataset").at("labels").get<std::vector<std::string>>();
  r.class_counts = j.at("dataset").at("class_counts").get<std::vector<int64_t>>();
  r.n_classifiers = static_cast<int>(j.at("config").at("classifiers").size());
  r.threshold = j.at("results").at("majority_threshold").get<int32_t>();
  r.k_folds = j.at("config").at("k_folds").get<int>();
  r.seed = j.at("seeds").at("run").get<uint64_t>();
  r.n_contentious = j.at("results").at("n_contentious").get<int64_t>();
  r.n_pairs = j.at("results").at("n_pairs").get<int64_t>();
  r.n_mismatch = j.at("results").at("n_mismatch_pairs").get<int64_t>();
  r.n_unmatched = j.at("results").at("n_unmatched").get<int64_t>();
  r.n_groups = j.at("results").at("n_duplicate_groups").get<int64_t>();
  r.n_conflicts = j.at("results").at("n_duplicate_conflicts").get<int64_t>();

  std::unordered_map<std::string, int32_t> label_index;
  for (size_t i = 0; i < r.labels.size(); ++i)
    label_index.emplace(r.labels[i], static_cast<int32_t>(i));
  auto index_of_label = [&](const std::string& name) {
    auto it = label_index.find(name);
    if (it == label_index.end()) throw Error("report: unknown label '" + name + "'");
    return it->second;
  };

  r.breakdown.labels = r.labels;
  r.breakdown.total = r.class_counts;
  r.breakdown.contentious.assign(r.labels.size(), 0);
  const auto contentious_rows = csv::read_table(need("contentious.csv"), false);
  for (size_t i = 1; i < contentious_rows.size(); ++i)
    ++r.breakdown.contentious[index_of_label(contentious_rows[i].at(1))];
  r.breakdown.clean.resize(r.labels.size());
  r.breakdown.fraction.resize(r.labels.size());
  for (size_t i = 0; i < r.labels.size(); ++i) {
    r.breakdown.clean[i] = r.breakdown.total[i] - r.breakdown.contentious[i];
    r.breakdown.fraction[i] =
        r.breakdown.total[i] > 0 ? static_cast<double>(r.breakdown.contentious[i]) /
                                       static_cast<double>(r.breakdown.total[i])
                                 : 0.0;
  }

  const auto matrix_rows = csv::read_table(need("matrix.csv"), false);
  if (matrix_rows.empty()) throw Error("report: matrix.csv is empty");
  r.matrix.labels.assign(matrix_rows[0].begin() + 1, matrix_rows[0].end());
  for (size_t i = 1; i < matrix_rows.size(); ++i) {
    std::vector<int64_t> counts;
    for (size_t c = 1; c < matrix_rows[i].size(); ++c) {
      counts.push_back(std::stoll(matrix_rows[i][c]));
      r.matrix.total += counts.back();
    }
    r.matrix.counts.push_back(std::move(counts));
  }

  const auto pair_rows = csv::read_table(need("pairs.csv"), false);
  for (size_t i = 1; i < pair_rows.size(); ++i) {
    const auto& row = pair_rows[i];
    if (row.at(5) != "true") continue;
    AuditPair p;
    p.query_id = row.at(0);
    p.neighbor_id = row.at(1);
    p.similarity = std::stod(row.at(2));
    p.query_label = index_of_label(row.at(3));
    p.neighbor_label = index_of_label(row.at(4));
    p.mismatch = true;
    r.top_pairs.push_back(std::move(p));
  }
  std::sort(r.top_pairs.begin(), r.top_pairs.end(), [](const AuditPair& a, const AuditPair& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.query_id < b.query_id;
  });
  if (r.top_pairs.size() > 20) r.top_pairs.resize(20);
  need("duplicates.csv");

  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    NoiseSummary ns;
    ns.epsilon = n.at("epsilon").get<double>();
    ns.metrics.n_flipped = n.at("n_flipped").get<int64_t>();
    ns.metrics.n_flagged = n.at("n_flagged").get<int64_t>();
    ns.metrics.n_hit = n.at("n_hit").get<int64_t>();
    if (!n.at("precision").is_null()) ns.metrics.precision = n.at("precision").get<double>();
    ns.metrics.recall = n.at("recall").get<double>();
    if (!n.at("f1").is_null()) ns.metrics.f1 = n.at("f1").get<double>();
    r.noise = std::move(ns);
  }
  return format == "md" ? render_md(r) : render_csv(r);
}

}  // namespace labelaudit
