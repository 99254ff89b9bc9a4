#pragma once
// Out-of-fold prediction for the whole roster plus majority voting. Every
// member shares one fold assignment; a record's prediction always comes from
// the model trained on the other k-1 folds.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "labelaudit/classifiers.hpp"
#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/csv.hpp"
#include "labelaudit/textproc.hpp"

namespace labelaudit {

struct PredictionTable {
  std::vector<ClassifierSpec> specs;  // classifier order, fixed by configuration
  std::vector<std::string> ids;       // record order, parallel to the dataset
  std::vector<std::vector<int32_t>> predicted;  // [record ordinal][classifier]

  size_t n_classifiers() const { return specs.size(); }
};

struct CvOptions {
  // Refit tf-idf on each training split instead of reusing the shared model.
  // The shared fit leaks df statistics across folds but keeps the voting and
  // search representations identical; the refit closes that leak.
  bool per_fold_tfidf = false;
  int min_df = 1;  // used only by the per-fold refit
};

inline PredictionTable cross_val_predict(const Dataset& d, const FoldAssignment& folds,
                                         const std::vector<ClassifierSpec>& specs,
                                         const TfidfModel& tfidf, uint64_t seed,
                                         const CvOptions& opt = {}) {
  if (specs.empty()) throw Error("cross_val_predict: empty classifier roster");
  if (folds.by_ordinal.size() != d.size() || folds.k < 2)
    throw Error("cross_val_predict: fold assignment does not cover the dataset");

  PredictionTable table;
  table.specs = specs;
  table.ids.reserve(d.size());
  for (const Record& r : d.records) table.ids.push_back(r.id);
  table.predicted.assign(d.size(), std::vector<int32_t>(specs.size(), -1));

  const int32_t n_labels = static_cast<int32_t>(d.schema.size());
  std::vector<SparseVector> shared_vectors;
  if (!opt.per_fold_tfidf) shared_vectors = transform_dataset(tfidf, d);

  for (int32_t f = 0; f < folds.k; ++f) {
    std::vector<int32_t> train_idx, test_idx;
    for (size_t i = 0; i < d.size(); ++i)
      (folds.by_ordinal[i] == f ? test_idx : train_idx).push_back(static_cast<int32_t>(i));
    if (train_idx.empty() || test_idx.empty()) continue;

    LabeledVectors train;
    std::vector<SparseVector> test_vectors;
    int32_t n_features;
    if (opt.per_fold_tfidf) {
      Dataset sub;
      sub.schema = d.schema;
      for (int32_t i : train_idx) sub.records.push_back(d.records[i]);
      sub.finalize();
      const TfidfModel fold_model = fit_tfidf(sub, opt.min_df);
      n_features = static_cast<int32_t>(fold_model.vocabulary.size());
      for (int32_t i : train_idx) train.x.push_back(tfidf_transform(fold_model, d.records[i].text));
      for (int32_t i : test_idx) test_vectors.push_back(tfidf_transform(fold_model, d.records[i].text));
    } else {
      n_features = static_cast<int32_t>(tfidf.vocabulary.size());
      for (int32_t i : train_idx) train.x.push_back(shared_vectors[i]);
      for (int32_t i : test_idx) test_vectors.push_back(shared_vectors[i]);
    }
    train.y.reserve(train_idx.size());
    for (int32_t i : train_idx) train.y.push_back(d.records[i].label);

    const size_t distinct = std::set<int32_t>(train.y.begin(), train.y.end()).size();
    for (size_t ci = 0; ci < specs.size(); ++ci) {
      if (requires_two_classes(specs[ci].kind) && distinct < 2)
        throw Error("cross_val_predict: training split for fold " + std::to_string(f) +
                    " has a single class; " + kind_name(specs[ci].kind) + " needs at least 2");
      const TrainedModel model =
          fit(specs[ci], train, n_labels, n_features,
              mix_seed(seed, (static_cast<uint64_t>(ci) << 32) | static_cast<uint64_t>(f)));
      for (size_t j = 0; j < test_idx.size(); ++j)
        table.predicted[test_idx[j]][ci] = predict(model, test_vectors[j]);
    }
  }
  return table;
}

// Smallest strict majority of an ensemble of size c.
inline int32_t majority_threshold(int32_t c) { return c / 2 + 1; }

struct ContentiousRecord {
  std::string id;
  int32_t ordinal = -1;
  int32_t wrong_count = 0;
  std::vector<int32_t> predictions;  // per classifier
};

// Records whose annotated label was rejected by a majority of the ensemble,
// ordered by record id.
inline std::vector<ContentiousRecord> vote_contentious(const Dataset& d,
                                                       const PredictionTable& table) {
  const size_t C = table.n_classifiers();
  if (C == 0 || table.predicted.size() != d.size())
    throw Error("vote_contentious: prediction table does not cover the dataset");
  const int32_t threshold = majority_threshold(static_cast<int32_t>(C));

  std::vector<ContentiousRecord> out;
  for (size_t i = 0; i < d.size(); ++i) {
    const std::vector<int32_t>& preds = table.predicted[i];
    if (preds.size() != C) throw Error("vote_contentious: incomplete row for id " + table.ids[i]);
    int32_t wrong = 0;
    for (int32_t p : preds) {
      if (p < 0 || p >= static_cast<int32_t>(d.schema.size()))
        throw Error("vote_contentious: missing prediction for id " + table.ids[i]);
      if (p != d.records[i].label) ++wrong;
    }
    if (wrong >= threshold)
      out.push_back({d.records[i].id, static_cast<int32_t>(i), wrong, preds});
  }
  std::sort(out.begin(), out.end(),
            [](const ContentiousRecord& a, const ContentiousRecord& b) { return a.id < b.id; });
  return out;
}

// contentious.csv: id, true_label, wrong_count, pred_1..pred_C.
inline void write_contentious_csv(const std::string& path, const Dataset& d,
                                  const PredictionTable& table,
                                  const std::vector<ContentiousRecord>& contentious) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  std::vector<std::string> row = {"id", "true_label", "wrong_count"};
  for (size_t c = 0; c < table.n_classifiers(); ++c)
    row.push_back("pred_" + std::to_string(c + 1));
  csv::write_csv_row(out, row);
  for (const ContentiousRecord& r : contentious) {
    row = {r.id, d.schema.names[d.records[r.ordinal].label], std::to_string(r.wrong_count)};
    for (int32_t p : r.predictions) row.push_back(d.schema.names[p]);
    csv::write_csv_row(out, row);
  }
  if (!out.flush()) throw Error("cannot write " + path);
}

}  // namespace labelaudit
