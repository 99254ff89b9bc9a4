#pragma once
// Word-level tokenization and the tf-idf vector space shared by the
// classifier ensemble and the similarity search engine.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labelaudit/common.hpp"
#include "labelaudit/corpus.hpp"
#include "labelaudit/unicode.hpp"

namespace labelaudit {

inline constexpr std::string_view kUserToken = "__user__";
inline constexpr std::string_view kUrlToken = "__url__";

// Tokenization: NFC + casefold, mention placeholders -> "__user__",
// http(s) URLs -> "__url__", then splitting on any run of characters that
// are neither letters, digits, '*' nor '\''. The marker tokens are also
// recognized literally so tokenize is idempotent on its own output.
inline std::vector<std::string> tokenize(std::string_view text) {
  const std::string folded = nfc_casefold(text);
  std::vector<std::string> tokens;
  std::string buf;

  auto flush = [&] {
    if (!buf.empty()) {
      tokens.push_back(buf);
      buf.clear();
    }
  };

  const uint8_t* bytes = reinterpret_cast<const uint8_t*>(folded.data());
  const int32_t n = static_cast<int32_t>(folded.size());
  int32_t i = 0;
  while (i < n) {
    if (buf.empty()) {
      if (size_t len = match_user_placeholder(folded, i); len > 0) {
        tokens.emplace_back(kUserToken);
        i += static_cast<int32_t>(len);
        continue;
      }
      std::string_view rest = std::string_view(folded).substr(i);
      if (rest.starts_with(kUserToken)) {
        tokens.emplace_back(kUserToken);
        i += static_cast<int32_t>(kUserToken.size());
        continue;
      }
      if (rest.starts_with(kUrlToken)) {
        tokens.emplace_back(kUrlToken);
        i += static_cast<int32_t>(kUrlToken.size());
        continue;
      }
      if (rest.starts_with("http://") || rest.starts_with("https://")) {
        // URLs run until whitespace.
        while (i < n) {
          int32_t prev = i;
          UChar32 cp;
          U8_NEXT(bytes, i, n, cp);
          if (cp >= 0 && is_space_cp(cp)) {
            i = prev;
            break;
          }
        }
        tokens.emplace_back(kUrlToken);
        continue;
      }
    }
    int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    if (cp >= 0 && is_word_cp(cp)) {
      buf.append(folded, start, i - start);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// Term universe of a corpus: dense indices in first-appearance order plus
// per-term document frequencies.
struct Vocabulary {
  std::vector<std::string> terms;  // index -> term
  std::unordered_map<std::string, int32_t> term_to_index;
  std::vector<int64_t> df;  // per term, documents containing it
  int64_t n_docs = 0;

  size_t size() const { return terms.size(); }

  int32_t index_of(const std::string& term) const {
    auto it = term_to_index.find(term);
    return it == term_to_index.end() ? -1 : it->second;
  }
};

struct TfidfModel {
  Vocabulary vocabulary;
  std::vector<double> idf;  // ln((1 + n_docs) / (1 + df)) + 1
};

// Sparse document vector; term indices strictly increasing, weights >= 0.
struct SparseVector {
  std::vector<std::pair<int32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  size_t size() const { return entries.size(); }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const int32_t ti = a.entries[i].first, tj = b.entries[j].first;
    if (ti == tj) {
      sum += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (ti < tj) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

inline double l2_norm(const SparseVector& v) {
  double sq = 0.0;
  for (const auto& [term, w] : v.entries) sq += w * w;
  return std::sqrt(sq);
}

inline double smooth_idf(int64_t n_docs, int64_t df) {
  return std::log(static_cast<double>(1 + n_docs) / static_cast<double>(1 + df)) + 1.0;
}

// Fits the shared tf-idf model: df counts each document once per term,
// vocabulary order is first appearance in corpus scan order, terms with
// df < min_df are dropped.
inline TfidfModel fit_tfidf(const Dataset& d, int min_df = 1) {
  if (d.records.empty()) throw Error("fit_tfidf: dataset is empty");
  if (min_df < 1) throw Error("fit_tfidf: min_df must be >= 1");

  std::vector<std::string> order;
  std::unordered_map<std::string, int64_t> df;
  for (const Record& rec : d.records) {
    std::unordered_map<std::string, bool> seen_in_doc;
    for (std::string& tok : tokenize(rec.text)) {
      auto [it, first_in_doc] = seen_in_doc.emplace(std::move(tok), true);
      if (!first_in_doc) continue;
      auto [df_it, first_in_corpus] = df.emplace(it->first, 0);
      ++df_it->second;
      if (first_in_corpus) order.push_back(it->first);
    }
  }

  TfidfModel m;
  m.vocabulary.n_docs = static_cast<int64_t>(d.size());
  for (std::string& term : order) {
    const int64_t term_df = df[term];
    if (term_df < min_df) continue;
    m.vocabulary.term_to_index.emplace(term, static_cast<int32_t>(m.vocabulary.terms.size()));
    m.vocabulary.df.push_back(term_df);
    m.idf.push_back(smooth_idf(m.vocabulary.n_docs, term_df));
    m.vocabulary.terms.push_back(std::move(term));
  }
  if (m.vocabulary.terms.empty())
    throw Error("fit_tfidf: vocabulary is empty after min_df filtering");
  return m;
}

// Raw weight = term count * idf, then L2-normalized. Out-of-vocabulary
// tokens are ignored; empty support yields the empty vector.
inline SparseVector tfidf_transform(const TfidfModel& m, const std::vector<std::string>& tokens) {
  std::map<int32_t, double> counts;
  for (const std::string& tok : tokens) {
    int32_t idx = m.vocabulary.index_of(tok);
    if (idx >= 0) counts[idx] += 1.0;
  }
  SparseVector v;
  v.entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [idx, count] : counts) {
    const double w = count * m.idf[idx];
    v.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& [idx, w] : v.entries) w *= inv;
  }
  return v;
}

inline SparseVector tfidf_transform(const TfidfModel& m, std::string_view text) {
  return tfidf_transform(m, tokenize(text));
}

inline std::vector<SparseVector> transform_dataset(const TfidfModel& m, const Dataset& d) {
  std::vector<SparseVector> out;
  out.reserve(d.size());
  for (const Record& rec : d.records) out.push_back(tfidf_transform(m, rec.text));
  return out;
}

// Model file: header line "tfidf-v1", a "ndocs" row, then term/df/idf rows,
// all tab-separated. idf is stored with round-trip precision.
inline void save_tfidf(const TfidfModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << "tfidf-v1\n";
  out << "ndocs\t" << m.vocabulary.n_docs << "\n";
  char buf[40];
  for (size_t i = 0; i < m.vocabulary.terms.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.idf[i]);
    out << m.vocabulary.terms[i] << '\t' << m.vocabulary.df[i] << '\t' << buf << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

inline TfidfModel load_tfidf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) || (line != "tfidf-v1" && line != "tfidf-v1\r"))
    throw Error(path + ": not a tfidf-v1 file");

  TfidfModel m;
  bool have_ndocs = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t t1 = line.find('\t');
    if (t1 == std::string::npos) throw Error(path + ": malformed row: " + line);
    const std::string first = line.substr(0, t1);
    if (first == "ndocs") {
      m.vocabulary.n_docs = std::stoll(line.substr(t1 + 1));
      have_ndocs = true;
      continue;
    }
    const size_t t2 = line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw Error(path + ": malformed row: " + line);
    const int64_t df = std::stoll(line.substr(t1 + 1, t2 - t1 - 1));
    const double idf = std::stod(line.substr(t2 + 1));
    m.vocabulary.term_to_index.emplace(first, static_cast<int32_t>(m.vocabulary.terms.size()));
    m.vocabulary.terms.push_back(first);
    m.vocabulary.df.push_back(df);
    m.idf.push_back(idf);
  }
  if (!have_ndocs) throw Error(path + ": missing ndocs row");
  return m;
}

}  // namespace labelaudit
