#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "labelaudit/synth.hpp"
#include "labelaudit/textproc.hpp"

using namespace labelaudit;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

TEST_CASE("generate_corpus is deterministic in its seed") {
  SynthSpec spec;
  spec.n_docs = 10;
  spec.seed = 99;
  Dataset a = generate_corpus(spec);
  Dataset b = generate_corpus(spec);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a.records[i].id == b.records[i].id);
    CHECK(a.records[i].text == b.records[i].text);
    CHECK(a.records[i].label == b.records[i].label);
  }

  spec.seed = 100;
  Dataset c = generate_corpus(spec);
  bool any_diff = false;
  for (size_t i = 0; i < a.size() && !any_diff; ++i)
    if (a.records[i].text != c.records[i].text) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("generate_corpus assigns classes round-robin") {
  SynthSpec spec;
  spec.n_docs = 2000;
  spec.n_classes = 2;
  Dataset d = generate_corpus(spec);
  CHECK(d.class_counts == std::vector<int64_t>{1000, 1000});
  CHECK(d.records[0].label == 0);
  CHECK(d.records[1].label == 1);
  CHECK(d.records[2].label == 0);

  spec.n_docs = 10;
  spec.n_classes = 3;
  Dataset e = generate_corpus(spec);
  CHECK(e.class_counts == std::vector<int64_t>{4, 3, 3});
}

TEST_CASE("class vocabularies are disjoint and docs mix in shared terms") {
  SynthSpec spec;
  spec.n_docs = 200;
  spec.n_classes = 3;
  spec.class_vocab_size = 10;
  spec.shared_vocab_size = 10;
  Dataset d = generate_corpus(spec);

  std::vector<std::set<std::string>> class_terms(3);
  std::set<std::string> shared_terms;
  for (const Record& r : d.records)
    for (const std::string& tok : tokenize(r.text)) {
      if (tok.rfind("shw", 0) == 0)
        shared_terms.insert(tok);
      else
        class_terms[r.label].insert(tok);
    }

  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      std::vector<std::string> overlap;
      std::set_intersection(class_terms[a].begin(), class_terms[a].end(),
                            class_terms[b].begin(), class_terms[b].end(),
                            std::back_inserter(overlap));
      CHECK(overlap.empty());
    }
  CHECK_FALSE(shared_terms.empty());

  // Document lengths respect the configured range.
  for (const Record& r : d.records) {
    auto toks = tokenize(r.text);
    CHECK(toks.size() >= 10);
    CHECK(toks.size() <= 20);
  }
}

TEST_CASE("generate_corpus ids are zero-padded and unique") {
  SynthSpec spec;
  spec.n_docs = 12;
  Dataset d = generate_corpus(spec);
  CHECK(d.records[0].id == "d00");
  CHECK(d.records[11].id == "d11");

  spec.n_docs = 101;
  Dataset e = generate_corpus(spec);
  CHECK(e.records[0].id == "d000");
  CHECK(e.records[100].id == "d100");
}

TEST_CASE("generate_corpus rejects invalid specs") {
  SynthSpec bad;
  bad.n_docs = 0;
  CHECK_THROWS_AS(generate_corpus(bad), Error);
  bad = SynthSpec{};
  bad.doc_len_min = 5;
  bad.doc_len_max = 4;
  CHECK_THROWS_AS(generate_corpus(bad), Error);
  bad = SynthSpec{};
  bad.class_token_prob = 1.5;
  CHECK_THROWS_AS(generate_corpus(bad), Error);
}

TEST_CASE("inject_label_noise flips the requested fraction") {
  SynthSpec spec;
  spec.n_docs = 1000;
  Dataset d = generate_corpus(spec);
  auto [noisy, log] = inject_label_noise(d, 0.05, 123);

  CHECK(log.flips.size() == 50);
  CHECK_THAT(log.epsilon, WithinAbs(0.05, 1e-12));
  REQUIRE(noisy.size() == d.size());

  int changed = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(noisy.records[i].text == d.records[i].text);
    CHECK(noisy.records[i].id == d.records[i].id);
    if (noisy.records[i].label != d.records[i].label) ++changed;
  }
  CHECK(changed == 50);

  for (const NoiseFlip& f : log.flips) {
    CHECK(f.original_label != f.new_label);
    int32_t ord = noisy.ordinal(f.id);
    REQUIRE(ord >= 0);
    CHECK(noisy.schema.names[noisy.records[ord].label] == f.new_label);
    CHECK(d.schema.names[d.records[ord].label] == f.original_label);
  }

  // Log ordered by record id.
  for (size_t i = 1; i < log.flips.size(); ++i) CHECK(log.flips[i - 1].id < log.flips[i].id);

  // Class counts stay consistent with the flipped labels.
  int64_t total = 0;
  for (int64_t c : noisy.class_counts) total += c;
  CHECK(total == static_cast<int64_t>(noisy.size()));
}

TEST_CASE("inject_label_noise with epsilon zero is the identity") {
  SynthSpec spec;
  spec.n_docs = 40;
  Dataset d = generate_corpus(spec);
  auto [same, log] = inject_label_noise(d, 0.0, 5);
  CHECK(log.flips.empty());
  for (size_t i = 0; i < d.size(); ++i) CHECK(same.records[i].label == d.records[i].label);
}

TEST_CASE("flipping back from the log restores the original labels") {
  SynthSpec spec;
  spec.n_docs = 300;
  spec.n_classes = 4;
  Dataset d = generate_corpus(spec);
  auto [noisy, log] = inject_label_noise(d, 0.1, 77);

  Dataset restored = noisy;
  for (const NoiseFlip& f : log.flips) {
    int32_t ord = restored.ordinal(f.id);
    restored.records[ord].label = restored.schema.index_of(f.original_label);
  }
  restored.finalize();

  for (size_t i = 0; i < d.size(); ++i)
    CHECK(restored.records[i].label == d.records[i].label);
  CHECK(restored.class_counts == d.class_counts);
}

TEST_CASE("inject_label_noise needs a second class and a sane epsilon") {
  SynthSpec spec;
  spec.n_docs = 10;
  spec.n_classes = 1;
  Dataset d = generate_corpus(spec);
  CHECK_THROWS_AS(inject_label_noise(d, 0.2, 1), Error);
  CHECK_NOTHROW(inject_label_noise(d, 0.0, 1));
  SynthSpec two;
  two.n_docs = 10;
  Dataset d2 = generate_corpus(two);
  CHECK_THROWS_AS(inject_label_noise(d2, 1.5, 1), Error);
  CHECK_THROWS_AS(inject_label_noise(d2, -0.1, 1), Error);
}

TEST_CASE("evaluate_detection computes precision, recall and f1") {
  NoiseLog log;
  log.epsilon = 0.05;
  for (int i = 0; i < 4; ++i)
    log.flips.push_back({"f" + std::to_string(i), "a", "b"});

  SECTION("perfect detection") {
    std::unordered_set<std::string> flagged = {"f0", "f1", "f2", "f3"};
    DetectionMetrics m = evaluate_detection(flagged, log);
    REQUIRE(m.precision.has_value());
    CHECK_THAT(*m.precision, WithinAbs(1.0, 1e-12));
    CHECK_THAT(m.recall, WithinAbs(1.0, 1e-12));
    REQUIRE(m.f1.has_value());
    CHECK_THAT(*m.f1, WithinAbs(1.0, 1e-12));
    CHECK(m.n_hit == 4);
  }

  SECTION("partial detection with false positives") {
    std::unordered_set<std::string> flagged = {"f0", "f1", "x1", "x2"};
    DetectionMetrics m = evaluate_detection(flagged, log);
    CHECK_THAT(*m.precision, WithinAbs(0.5, 1e-12));
    CHECK_THAT(m.recall, WithinAbs(0.5, 1e-12));
    CHECK_THAT(*m.f1, WithinAbs(0.5, 1e-12));
  }

  SECTION("nothing flagged, flips exist: precision undefined") {
    DetectionMetrics m = evaluate_detection({}, log);
    CHECK_FALSE(m.precision.has_value());
    CHECK_FALSE(m.f1.has_value());
    CHECK(m.recall == 0.0);
  }

  SECTION("nothing flagged, nothing flipped: vacuous success") {
    DetectionMetrics m = evaluate_detection({}, NoiseLog{});
    REQUIRE(m.precision.has_value());
    CHECK(*m.precision == 1.0);
    CHECK(m.recall == 1.0);
  }

  SECTION("everything flagged") {
    std::unordered_set<std::string> flagged;
    for (int i = 0; i < 80; ++i) flagged.insert("f" + std::to_string(i));  // f0..f3 + 76 others
    DetectionMetrics m = evaluate_detection(flagged, log);
    CHECK_THAT(*m.precision, WithinAbs(0.05, 1e-12));
    CHECK_THAT(m.recall, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("noise log csv lists id and both labels") {
  NoiseLog log;
  log.epsilon = 0.1;
  log.flips = {{"d01", "class0", "class1"}, {"d07", "class1", "class0"}};
  auto path = fs::temp_directory_path() / "noise_log_test.csv";
  write_noise_log_csv(path.string(), log);
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  fs::remove(path);
  CHECK(ss.str() ==
        "id,original_label,new_label\n"
        "d01,class0,class1\n"
        "d07,class1,class0\n");
}

TEST_CASE("saved synthetic corpus reloads identically") {
  SynthSpec spec;
  spec.n_docs = 25;
  spec.n_classes = 3;
  Dataset d = generate_corpus(spec);
  auto path = fs::temp_directory_path() / "synth_corpus_test.csv";
  save_corpus_csv(d, path.string());
  Dataset back = load_dataset(path.string(), Format::csv, ColumnSpec{"id", "text", "label"});
  fs::remove(path);

  REQUIRE(back.size() == d.size());
  CHECK(back.schema.names == d.schema.names);
  for (size_t i = 0; i < d.size(); ++i) {
    CHECK(back.records[i].id == d.records[i].id);
    CHECK(back.records[i].text == d.records[i].text);
    CHECK(back.records[i].label == d.records[i].label);
  }
}
