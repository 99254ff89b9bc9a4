#pragma once
// Cosine nearest-neighbor retrieval over sparse tf-idf vectors, backed by an
// inverted index. Per-document scores accumulate partial dot products in
// increasing term order, which keeps them bitwise equal to a direct
// sorted-merge dot product and makes tie resolution reproducible.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/textproc.hpp"

namespace labelaudit {

// cos(a, b) = <a, b> / (|a| * |b|); 0 when either vector is empty or zero.
inline double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

struct Neighbor {
  int32_t ordinal = -1;
  std::string id;
  double similarity = 0.0;
};

struct InvertedIndex {
  int32_t n_features = 0;
  std::vector<SparseVector> vectors;  // by ordinal
  std::vector<double> norms;
  std::vector<std::string> ids;  // ordinal -> record id
  std::unordered_map<std::string, int32_t> id_to_ordinal;
  std::vector<std::vector<std::pair<int32_t, double>>> postings;  // term -> (ordinal, weight)

  size_t size() const { return vectors.size(); }

  int32_t ordinal(const std::string& id) const {
    auto it = id_to_ordinal.find(id);
    if (it == id_to_ordinal.end()) throw Error("index: unknown record id '" + id + "'");
    return it->second;
  }
};

inline InvertedIndex build_index(std::vector<SparseVector> vectors, std::vector<std::string> ids,
                                 int32_t n_features) {
  if (vectors.size() != ids.size()) throw Error("build_index: vectors/ids size mismatch");
  InvertedIndex index;
  index.n_features = n_features;
  index.vectors = std::move(vectors);
  index.ids = std::move(ids);
  index.norms.reserve(index.vectors.size());
  index.postings.assign(n_features, {});
  index.id_to_ordinal.reserve(index.ids.size());
  for (size_t i = 0; i < index.vectors.size(); ++i) {
    index.norms.push_back(l2_norm(index.vectors[i]));
    if (!index.id_to_ordinal.emplace(index.ids[i], static_cast<int32_t>(i)).second)
      throw Error("build_index: duplicate record id '" + index.ids[i] + "'");
    for (const auto& [t, v] : index.vectors[i].entries) {
      if (t < 0 || t >= n_features) throw Error("build_index: term index out of range");
      index.postings[t].emplace_back(static_cast<int32_t>(i), v);
    }
  }
  return index;
}

inline InvertedIndex build_index(const Dataset& d, const TfidfModel& tfidf) {
  if (d.records.empty()) throw Error("build_index: empty dataset");
  std::vector<std::string> ids;
  ids.reserve(d.size());
  for (const Record& r : d.records) ids.push_back(r.id);
  return build_index(transform_dataset(tfidf, d), std::move(ids),
                     static_cast<int32_t>(tfidf.vocabulary.size()));
}

// Highest-similarity document other than `exclude_ordinal` (-1 keeps all
// candidates). Ties go to the lower ordinal. Returns nullopt when the query
// is empty/zero or no candidate has positive similarity.
inline std::optional<Neighbor> nearest_neighbor(const InvertedIndex& index,
                                                const SparseVector& query,
                                                int32_t exclude_ordinal = -1) {
  const double nq = l2_norm(query);
  if (nq == 0.0) return std::nullopt;

  std::vector<double> acc(index.size(), 0.0);
  for (const auto& [t, v] : query.entries) {
    if (t < 0 || t >= index.n_features) continue;
    for (const auto& [ord, w] : index.postings[t]) acc[ord] += v * w;
  }

  std::optional<Neighbor> best;
  for (size_t ord = 0; ord < acc.size(); ++ord) {
    if (static_cast<int32_t>(ord) == exclude_ordinal) continue;
    if (acc[ord] <= 0.0 || index.norms[ord] == 0.0) continue;
    const double sim = acc[ord] / (nq * index.norms[ord]);
    if (!best || sim > best->similarity)
      best = Neighbor{static_cast<int32_t>(ord), index.ids[ord], sim};
  }
  return best;
}

// Self-matches are excluded by record id, not by text, so an identical text
// stored under another id stays eligible.
inline std::optional<Neighbor> nearest_neighbor(const InvertedIndex& index,
                                                const std::string& query_id) {
  const int32_t ord = index.ordinal(query_id);
  return nearest_neighbor(index, index.vectors[ord], ord);
}

}  // namespace labelaudit
