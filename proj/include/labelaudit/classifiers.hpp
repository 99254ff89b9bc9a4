#pragma once
// The five-member classifier roster over shared tf-idf features:
// multinomial/complement naive Bayes, softmax regression, linear SVM
// (one-vs-rest hinge), and cosine k-NN. All tie-breaks go to the lower
// schema index so runs are reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labelaudit/common.hpp"
#include "labelaudit/textproc.hpp"

namespace labelaudit {

enum class ClassifierKind { multinomial_nb, complement_nb, softmax_lr, linear_svm, knn };
enum class NbVariant { multinomial, complement };
enum class LinearLoss { softmax, hinge };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::multinomial_nb;
  double alpha = 1.0;  // NB smoothing
  double l2 = 1e-4;    // linear models
  int epochs = 30;
  double lr = 0.1;
  int knn_k = 5;
};

inline std::string kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::multinomial_nb: return "multinomial_nb";
    case ClassifierKind::complement_nb: return "complement_nb";
    case ClassifierKind::softmax_lr: return "softmax_lr";
    case ClassifierKind::linear_svm: return "linear_svm";
    case ClassifierKind::knn: return "knn";
  }
  return "unknown";
}

// Accepts "kind" or "kind(key=value,...)", e.g. "knn(k=3)" or
// "softmax_lr(lr=0.05,epochs=50)".
inline ClassifierSpec parse_classifier_spec(std::string_view text) {
  auto fail = [&](const std::string& why) {
    throw Error("classifier spec '" + std::string(text) + "': " + why);
  };
  std::string_view name = text;
  std::string_view args;
  if (size_t paren = text.find('('); paren != std::string_view::npos) {
    if (text.back() != ')') fail("missing ')'");
    name = text.substr(0, paren);
    args = text.substr(paren + 1, text.size() - paren - 2);
  }

  ClassifierSpec spec;
  if (name == "multinomial_nb") spec.kind = ClassifierKind::multinomial_nb;
  else if (name == "complement_nb") spec.kind = ClassifierKind::complement_nb;
  else if (name == "softmax_lr") spec.kind = ClassifierKind::softmax_lr;
  else if (name == "linear_svm") spec.kind = ClassifierKind::linear_svm;
  else if (name == "knn") spec.kind = ClassifierKind::knn;
  else fail("unknown kind '" + std::string(name) + "'");

  while (!args.empty()) {
    size_t comma = args.find(',');
    std::string_view kv = args.substr(0, comma);
    args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
    size_t eq = kv.find('=');
    if (eq == std::string_view::npos) fail("expected key=value, got '" + std::string(kv) + "'");
    std::string key(kv.substr(0, eq));
    std::string value(kv.substr(eq + 1));
    try {
      if (key == "alpha") spec.alpha = std::stod(value);
      else if (key == "l2") spec.l2 = std::stod(value);
      else if (key == "epochs") spec.epochs = std::stoi(value);
      else if (key == "lr") spec.lr = std::stod(value);
      else if (key == "k") spec.knn_k = std::stoi(value);
      else fail("unknown hyperparameter '" + key + "'");
    } catch (const std::invalid_argument&) {
      fail("bad value for '" + key + "'");
    }
  }
  if (spec.alpha <= 0) fail("alpha must be > 0");
  if (spec.l2 < 0) fail("l2 must be >= 0");
  if (spec.epochs < 1) fail("epochs must be >= 1");
  if (spec.lr <= 0) fail("lr must be > 0");
  if (spec.knn_k < 1) fail("k must be >= 1");
  return spec;
}

inline std::string spec_to_string(const ClassifierSpec& s) {
  char buf[160];
  switch (s.kind) {
    case ClassifierKind::multinomial_nb:
    case ClassifierKind::complement_nb:
      std::snprintf(buf, sizeof(buf), "%s(alpha=%g)", kind_name(s.kind).c_str(), s.alpha);
      break;
    case ClassifierKind::softmax_lr:
    case ClassifierKind::linear_svm:
      std::snprintf(buf, sizeof(buf), "%s(l2=%g,epochs=%d,lr=%g)", kind_name(s.kind).c_str(),
                    s.l2, s.epochs, s.lr);
      break;
    case ClassifierKind::knn:
      std::snprintf(buf, sizeof(buf), "knn(k=%d)", s.knn_k);
      break;
  }
  return buf;
}

// Training set as parallel arrays; y holds schema label indices.
struct LabeledVectors {
  std::vector<SparseVector> x;
  std::vector<int32_t> y;

  size_t size() const { return x.size(); }
};

struct NbParams {
  std::vector<double> class_bias;            // log prior (multinomial) or 0 (complement)
  std::vector<std::vector<double>> weights;  // [class][term] log-probability weights
};

struct LinearParams {
  std::vector<std::vector<double>> w;  // [class][term]
  std::vector<double> b;               // per class
};

struct KnnParams {
  int k = 1;
  std::vector<SparseVector> vectors;  // training vectors, ordinal order
  std::vector<int32_t> labels;
  std::vector<std::vector<std::pair<int32_t, double>>> postings;  // term -> (ordinal, weight)
};

struct TrainedModel {
  ClassifierSpec spec;
  int32_t n_labels = 0;
  int32_t n_features = 0;
  std::variant<NbParams, LinearParams, KnnParams> params;
};

// argmax with ties resolved toward the lower index.
inline int32_t argmax_low(const std::vector<double>& scores) {
  int32_t best = 0;
  for (size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = static_cast<int32_t>(c);
  return best;
}

// ---------------------------------------------------------------------------
// Naive Bayes

inline TrainedModel fit_nb(const LabeledVectors& train, int n_labels, int n_features,
                           NbVariant variant, double alpha) {
  if (train.x.empty()) throw Error("fit_nb: empty training set");
  if (alpha <= 0) throw Error("fit_nb: alpha must be > 0");

  const size_t L = static_cast<size_t>(n_labels);
  std::vector<std::vector<double>> term_sum(L, std::vector<double>(n_features, 0.0));
  std::vector<double> class_sum(L, 0.0);
  std::vector<int64_t> class_docs(L, 0);

  for (size_t i = 0; i < train.size(); ++i) {
    const int32_t c = train.y[i];
    ++class_docs[c];
    for (const auto& [t, v] : train.x[i].entries) {
      if (t < 0 || t >= n_features) continue;
      term_sum[c][t] += v;
      class_sum[c] += v;
    }
  }

  NbParams p;
  p.class_bias.assign(L, 0.0);
  p.weights.assign(L, std::vector<double>(n_features, 0.0));
  const double n = static_cast<double>(train.size());

  if (variant == NbVariant::multinomial) {
    for (size_t c = 0; c < L; ++c) {
      p.class_bias[c] = class_docs[c] > 0 ? std::log(class_docs[c] / n)
                                          : -std::numeric_limits<double>::infinity();
      const double denom = alpha * n_features + class_sum[c];
      for (int t = 0; t < n_features; ++t)
        p.weights[c][t] = std::log((alpha + term_sum[c][t]) / denom);
    }
  } else {
    // Complement: per-term statistics over every class except c; the score
    // weight is the negated log-probability. No prior term for multiclass,
    // but a class absent from training must never win a tie.
    std::vector<double> total_term(n_features, 0.0);
    double total_sum = 0.0;
    for (size_t c = 0; c < L; ++c) {
      total_sum += class_sum[c];
      for (int t = 0; t < n_features; ++t) total_term[t] += term_sum[c][t];
    }
    for (size_t c = 0; c < L; ++c) {
      if (class_docs[c] == 0) p.class_bias[c] = -std::numeric_limits<double>::infinity();
      const double denom = alpha * n_features + (total_sum - class_sum[c]);
      for (int t = 0; t < n_features; ++t)
        p.weights[c][t] = -std::log((alpha + (total_term[t] - term_sum[c][t])) / denom);
    }
  }

  TrainedModel m;
  m.spec.kind = variant == NbVariant::multinomial ? ClassifierKind::multinomial_nb
                                                  : ClassifierKind::complement_nb;
  m.spec.alpha = alpha;
  m.n_labels = n_labels;
  m.n_features = n_features;
  m.params = std::move(p);
  return m;
}

// ---------------------------------------------------------------------------
// Linear models (softmax regression / one-vs-rest hinge)

inline std::vector<double> linear_scores(const LinearParams& p, const SparseVector& x) {
  std::vector<double> s(p.b);
  for (const auto& [t, v] : x.entries) {
    for (size_t c = 0; c < p.w.size(); ++c) {
      if (t >= 0 && static_cast<size_t>(t) < p.w[c].size()) s[c] += p.w[c][t] * v;
    }
  }
  return s;
}

inline std::vector<double> softmax(std::vector<double> scores) {
  const double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

// Full-batch objective: mean cross-entropy + (l2/2) * ||w||^2.
inline double softmax_loss(const LinearParams& p, const LabeledVectors& data, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    std::vector<double> probs = softmax(linear_scores(p, data.x[i]));
    loss += -std::log(std::max(probs[data.y[i]], 1e-300));
  }
  loss /= static_cast<double>(data.size());
  double reg = 0.0;
  for (const auto& wc : p.w)
    for (double w : wc) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

// Analytic full-batch gradient of softmax_loss, same shape as the parameters.
inline LinearParams softmax_gradient(const LinearParams& p, const LabeledVectors& data, double l2) {
  LinearParams g;
  g.w.assign(p.w.size(), std::vector<double>(p.w.empty() ? 0 : p.w[0].size(), 0.0));
  g.b.assign(p.b.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    std::vector<double> probs = softmax(linear_scores(p, data.x[i]));
    for (size_t c = 0; c < p.w.size(); ++c) {
      const double coeff = (probs[c] - (data.y[i] == static_cast<int32_t>(c) ? 1.0 : 0.0)) * inv_n;
      g.b[c] += coeff;
      for (const auto& [t, v] : data.x[i].entries) g.w[c][t] += coeff * v;
    }
  }
  for (size_t c = 0; c < p.w.size(); ++c)
    for (size_t t = 0; t < p.w[c].size(); ++t) g.w[c][t] += l2 * p.w[c][t];
  return g;
}

// Seeded-shuffle SGD. L2 decay uses a scalar weight-scale so each step stays
// O(nnz); equivalent to the dense update w <- w*(1-lr*l2) - lr*grad.
inline TrainedModel fit_linear(const LabeledVectors& train, int n_labels, int n_features,
                               LinearLoss loss, double l2, int epochs, double lr, uint64_t seed) {
  if (train.x.empty()) throw Error("fit_linear: empty training set");
  if (lr <= 0) throw Error("fit_linear: lr must be positive");
  if (epochs < 1) throw Error("fit_linear: epochs must be >= 1");
  if (lr * l2 >= 1.0) throw Error("fit_linear: lr*l2 must be < 1");

  const size_t L = static_cast<size_t>(n_labels);
  LinearParams p;
  p.w.assign(L, std::vector<double>(n_features, 0.0));
  p.b.assign(L, 0.0);
  double scale = 1.0;

  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::vector<double> scores(L);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t i : order) {
      const SparseVector& x = train.x[i];
      const int32_t y = train.y[i];

      for (size_t c = 0; c < L; ++c) scores[c] = p.b[c];
      for (const auto& [t, v] : x.entries)
        for (size_t c = 0; c < L; ++c) scores[c] += scale * p.w[c][t] * v;

      scale *= 1.0 - lr * l2;
      if (loss == LinearLoss::softmax) {
        std::vector<double> probs = softmax(scores);
        for (size_t c = 0; c < L; ++c) {
          const double coeff = lr * (probs[c] - (y == static_cast<int32_t>(c) ? 1.0 : 0.0));
          if (coeff == 0.0) continue;
          for (const auto& [t, v] : x.entries) p.w[c][t] -= coeff * v / scale;
          p.b[c] -= coeff;
        }
      } else {
        for (size_t c = 0; c < L; ++c) {
          const double yc = y == static_cast<int32_t>(c) ? 1.0 : -1.0;
          if (yc * scores[c] < 1.0) {
            for (const auto& [t, v] : x.entries) p.w[c][t] += lr * yc * v / scale;
            p.b[c] += lr * yc;
          }
        }
      }
      if (scale < 1e-9) {  // fold the scale back in before it underflows
        for (auto& wc : p.w)
          for (double& w : wc) w *= scale;
        scale = 1.0;
      }
    }
  }
  for (auto& wc : p.w)
    for (double& w : wc) w *= scale;

  TrainedModel m;
  m.spec.kind = loss == LinearLoss::softmax ? ClassifierKind::softmax_lr : ClassifierKind::linear_svm;
  m.spec.l2 = l2;
  m.spec.epochs = epochs;
  m.spec.lr = lr;
  m.n_labels = n_labels;
  m.n_features = n_features;
  m.params = std::move(p);
  return m;
}

// ---------------------------------------------------------------------------
// k-NN over cosine similarity

inline TrainedModel fit_knn(const LabeledVectors& train, int n_labels, int n_features, int k) {
  if (train.x.empty()) throw Error("fit_knn: empty training set");
  if (k < 1) throw Error("fit_knn: k must be >= 1");
  if (static_cast<size_t>(k) > train.size())
    throw Error("fit_knn: k (" + std::to_string(k) + ") exceeds training-set size (" +
                std::to_string(train.size()) + ")");

  KnnParams p;
  p.k = k;
  p.vectors = train.x;
  p.labels = train.y;
  p.postings.assign(n_features, {});
  for (size_t i = 0; i < p.vectors.size(); ++i)
    for (const auto& [t, v] : p.vectors[i].entries)
      if (t >= 0 && t < n_features) p.postings[t].emplace_back(static_cast<int32_t>(i), v);

  TrainedModel m;
  m.spec.kind = ClassifierKind::knn;
  m.spec.knn_k = k;
  m.n_labels = n_labels;
  m.n_features = n_features;
  m.params = std::move(p);
  return m;
}

namespace detail {

inline int32_t predict_knn(const KnnParams& p, int n_labels, const SparseVector& x) {
  const size_t n = p.labels.size();
  std::vector<double> sim(n, 0.0);
  for (const auto& [t, v] : x.entries) {
    if (t < 0 || static_cast<size_t>(t) >= p.postings.size()) continue;
    for (const auto& [ord, w] : p.postings[t]) sim[ord] += v * w;
  }
  // Neighbors ranked by similarity, ties toward the lower training ordinal.
  std::vector<int32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const size_t k = static_cast<size_t>(p.k);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int32_t a, int32_t b) {
    if (sim[a] != sim[b]) return sim[a] > sim[b];
    return a < b;
  });
  std::vector<int32_t> votes(n_labels, 0);
  for (size_t i = 0; i < k; ++i) ++votes[p.labels[idx[i]]];
  int32_t best = 0;
  for (int32_t c = 1; c < n_labels; ++c)
    if (votes[c] > votes[best]) best = c;
  return best;
}

}  // namespace detail

// Pure function of (model, vector); always returns a schema label index.
inline int32_t predict(const TrainedModel& m, const SparseVector& x) {
  if (const auto* nb = std::get_if<NbParams>(&m.params)) {
    std::vector<double> scores(nb->class_bias);
    for (const auto& [t, v] : x.entries) {
      if (t < 0 || t >= m.n_features) continue;
      for (size_t c = 0; c < scores.size(); ++c) scores[c] += v * nb->weights[c][t];
    }
    return argmax_low(scores);
  }
  if (const auto* lin = std::get_if<LinearParams>(&m.params))
    return argmax_low(linear_scores(*lin, x));
  return detail::predict_knn(std::get<KnnParams>(m.params), m.n_labels, x);
}

// Dispatch on spec kind. `seed` only affects the SGD-trained members.
inline TrainedModel fit(const ClassifierSpec& spec, const LabeledVectors& train, int n_labels,
                        int n_features, uint64_t seed) {
  switch (spec.kind) {
    case ClassifierKind::multinomial_nb:
      return fit_nb(train, n_labels, n_features, NbVariant::multinomial, spec.alpha);
    case ClassifierKind::complement_nb:
      return fit_nb(train, n_labels, n_features, NbVariant::complement, spec.alpha);
    case ClassifierKind::softmax_lr:
      return fit_linear(train, n_labels, n_features, LinearLoss::softmax, spec.l2, spec.epochs,
                        spec.lr, seed);
    case ClassifierKind::linear_svm:
      return fit_linear(train, n_labels, n_features, LinearLoss::hinge, spec.l2, spec.epochs,
                        spec.lr, seed);
    case ClassifierKind::knn:
      return fit_knn(train, n_labels, n_features, spec.knn_k);
  }
  throw Error("fit: unknown classifier kind");
}

// Requires at least two classes in its training split.
inline bool requires_two_classes(ClassifierKind k) {
  return k == ClassifierKind::softmax_lr || k == ClassifierKind::linear_svm;
}

inline std::vector<ClassifierSpec> default_classifier_roster() {
  std::vector<ClassifierSpec> roster(5);
  roster[0].kind = ClassifierKind::multinomial_nb;
  roster[1].kind = ClassifierKind::complement_nb;
  roster[2].kind = ClassifierKind::softmax_lr;
  roster[3].kind = ClassifierKind::linear_svm;
  roster[4].kind = ClassifierKind::knn;
  return roster;
}

}  // namespace labelaudit
