#pragma once
// Synthetic corpora with known ground truth: per-class disjoint vocabularies
// mixed with a shared pool, plus seeded label-noise injection. The noise log
// is the oracle the detection metrics are scored against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/csv.hpp"

#include <json.hpp>

namespace labelaudit {

struct SynthSpec {
  int64_t n_docs = 1000;
  int32_t n_classes = 2;
  int32_t class_vocab_size = 50;
  int32_t shared_vocab_size = 100;
  int32_t doc_len_min = 10;
  int32_t doc_len_max = 20;
  double class_token_prob = 0.7;  // remainder drawn from the shared pool
  uint64_t seed = 7;
};

inline void validate(const SynthSpec& s) {
  if (s.n_docs < 1 || s.n_classes < 1 || s.class_vocab_size < 1 || s.shared_vocab_size < 1)
    throw Error("synth spec: all counts must be positive");
  if (s.doc_len_min < 1 || s.doc_len_min > s.doc_len_max)
    throw Error("synth spec: doc length range invalid");
  if (s.class_token_prob < 0.0 || s.class_token_prob > 1.0)
    throw Error("synth spec: class_token_prob must be in [0,1]");
}

// Classes are assigned round-robin; tokens avoid '_' because the tokenizer
// splits on it.
inline Dataset generate_corpus(const SynthSpec& spec) {
  validate(spec);

  std::vector<std::vector<std::string>> class_vocab(spec.n_classes);
  for (int32_t c = 0; c < spec.n_classes; ++c)
    for (int32_t j = 0; j < spec.class_vocab_size; ++j)
      class_vocab[c].push_back("c" + std::to_string(c) + "w" + std::to_string(j));
  std::vector<std::string> shared_vocab;
  for (int32_t j = 0; j < spec.shared_vocab_size; ++j)
    shared_vocab.push_back("shw" + std::to_string(j));

  int width = 1;
  for (int64_t v = spec.n_docs - 1; v >= 10; v /= 10) ++width;

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int32_t> len_dist(spec.doc_len_min, spec.doc_len_max);
  std::bernoulli_distribution from_class(spec.class_token_prob);
  std::uniform_int_distribution<int32_t> class_pick(0, spec.class_vocab_size - 1);
  std::uniform_int_distribution<int32_t> shared_pick(0, spec.shared_vocab_size - 1);

  std::vector<std::string> label_names;
  for (int32_t c = 0; c < spec.n_classes; ++c) label_names.push_back("class" + std::to_string(c));

  std::vector<Record> records;
  records.reserve(spec.n_docs);
  for (int64_t i = 0; i < spec.n_docs; ++i) {
    const int32_t c = static_cast<int32_t>(i % spec.n_classes);
    const int32_t len = len_dist(rng);
    std::string text;
    for (int32_t t = 0; t < len; ++t) {
      if (t) text += ' ';
      text += from_class(rng) ? class_vocab[c][class_pick(rng)] : shared_vocab[shared_pick(rng)];
    }
    std::string id = std::to_string(i);
    records.push_back({"d" + std::string(width - id.size(), '0') + id, std::move(text), c});
  }
  return make_dataset(std::move(label_names), std::move(records));
}

struct NoiseFlip {
  std::string id;
  std::string original_label;
  std::string new_label;
};

struct NoiseLog {
  double epsilon = 0.0;
  std::vector<NoiseFlip> flips;  // ordered by record id

  std::unordered_set<std::string> flipped_ids() const {
    std::unordered_set<std::string> out;
    for (const NoiseFlip& f : flips) out.insert(f.id);
    return out;
  }
};

// Flips round(epsilon*N) labels, sampled without replacement; each new label
// is drawn uniformly from the other classes. Texts and row order untouched;
// preserved source rows get the flipped label so re-exports stay consistent.
inline std::pair<Dataset, NoiseLog> inject_label_noise(const Dataset& d, double epsilon,
                                                       uint64_t seed) {
  if (epsilon < 0.0 || epsilon > 1.0) throw Error("inject_label_noise: epsilon must be in [0,1]");
  const int64_t n_flips = std::llround(epsilon * static_cast<double>(d.size()));
  Dataset out = d;
  NoiseLog log;
  log.epsilon = epsilon;
  if (n_flips == 0) return {std::move(out), std::move(log)};
  if (d.schema.size() < 2) throw Error("inject_label_noise: need at least 2 classes to flip");

  std::mt19937_64 rng(seed);
  std::vector<int32_t> ordinals(d.size());
  std::iota(ordinals.begin(), ordinals.end(), 0);
  std::shuffle(ordinals.begin(), ordinals.end(), rng);

  const int32_t L = static_cast<int32_t>(d.schema.size());
  std::uniform_int_distribution<int32_t> pick_other(0, L - 2);
  for (int64_t i = 0; i < n_flips; ++i) {
    const int32_t ord = ordinals[i];
    Record& r = out.records[ord];
    const int32_t old_label = r.label;
    int32_t new_label = pick_other(rng);
    if (new_label >= old_label) ++new_label;
    r.label = new_label;

    if (out.source_format == Format::jsonl) {
      if (static_cast<size_t>(ord) < out.source_lines.size() && !out.source_label_field.empty()) {
        auto obj = nlohmann::ordered_json::parse(out.source_lines[ord]);
        obj[out.source_label_field] = d.schema.names[new_label];
        out.source_lines[ord] = obj.dump();
      }
    } else if (out.source_label_col >= 0 && static_cast<size_t>(ord) < out.source_rows.size()) {
      out.source_rows[ord][out.source_label_col] = d.schema.names[new_label];
    }
    log.flips.push_back({r.id, d.schema.names[old_label], d.schema.names[new_label]});
  }
  out.finalize();
  std::sort(log.flips.begin(), log.flips.end(),
            [](const NoiseFlip& a, const NoiseFlip& b) { return a.id < b.id; });
  return {std::move(out), std::move(log)};
}

struct DetectionMetrics {
  int64_t n_flagged = 0;
  int64_t n_flipped = 0;
  int64_t n_hit = 0;                // flagged records that really were flipped
  std::optional<double> precision;  // empty when undefined (nothing flagged, flips exist)
  double recall = 0.0;
  std::optional<double> f1;
};

inline DetectionMetrics evaluate_detection(const std::unordered_set<std::string>& flagged,
                                           const NoiseLog& log) {
  DetectionMetrics m;
  m.n_flagged = static_cast<int64_t>(flagged.size());
  m.n_flipped = static_cast<int64_t>(log.flips.size());
  for (const NoiseFlip& f : log.flips)
    if (flagged.count(f.id)) ++m.n_hit;

  if (m.n_flagged > 0)
    m.precision = static_cast<double>(m.n_hit) / static_cast<double>(m.n_flagged);
  else if (m.n_flipped == 0)
    m.precision = 1.0;  // nothing to find, nothing claimed

  m.recall = m.n_flipped == 0 ? 1.0
                              : static_cast<double>(m.n_hit) / static_cast<double>(m.n_flipped);
  if (m.precision) {
    const double pr = *m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * *m.precision * m.recall / pr : 0.0;
  }
  return m;
}

inline void write_noise_log_csv(const std::string& path, const NoiseLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  csv::write_csv_row(out, {"id", "original_label", "new_label"});
  for (const NoiseFlip& f : log.flips) csv::write_csv_row(out, {f.id, f.original_label, f.new_label});
  if (!out.flush()) throw Error("cannot write " + path);
}

inline void save_corpus_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  csv::write_csv_row(out, {"id", "text", "label"});
  for (const Record& r : d.records)
    csv::write_csv_row(out, {r.id, r.text, d.schema.names[r.label]});
  if (!out.flush()) throw Error("cannot write " + path);
}

}  // namespace labelaudit
