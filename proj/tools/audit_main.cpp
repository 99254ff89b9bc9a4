// `audit` command-line tool: run (full pipeline), report (re-render a run
// directory), synth (generate, corrupt, audit, score).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <labelaudit/labelaudit.hpp>

namespace {

using namespace labelaudit;

struct RunArgs {
  std::string input, format = "csv", text_col = "text", label_col = "label", id_col;
  std::string config_path, out_dir, tfidf_scope = "global", duplicate_mode = "exact";
  std::string classifiers;
  int k_folds = 5;
  int min_df = 1;
  uint64_t seed = 42;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--input", a.input, "labeled corpus file");
  cmd->add_option("--format", a.format, "csv, tsv or jsonl")->default_str("csv");
  cmd->add_option("--text-col", a.text_col, "text column/field")->default_str("text");
  cmd->add_option("--label-col", a.label_col, "label column/field")->default_str("label");
  cmd->add_option("--id-col", a.id_col, "id column/field (row numbers when omitted)");
  cmd->add_option("--k-folds", a.k_folds, "cross-validation folds")->default_str("5");
  cmd->add_option("--seed", a.seed, "run seed")->default_str("42");
  cmd->add_option("--min-df", a.min_df, "minimum document frequency")->default_str("1");
  cmd->add_option("--config", a.config_path, "key=value config file (flags override it)");
  cmd->add_option("--tfidf-scope", a.tfidf_scope, "global or per_fold")->default_str("global");
  cmd->add_option("--duplicate-mode", a.duplicate_mode, "exact or retweet_core")
      ->default_str("exact");
  cmd->add_option("--classifiers", a.classifiers,
                  "comma-separated roster, e.g. multinomial_nb,knn(k=3)");
  cmd->add_option("--out", a.out_dir, "output directory");
}

RunConfig merge_config(const CLI::App* cmd, const RunArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) apply_config_file(cfg, a.config_path);
  // Only flags the user actually passed override the config file.
  auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
  if (passed("--input")) cfg.input = a.input;
  if (passed("--format")) cfg.format = parse_format(a.format);
  if (passed("--text-col")) cfg.columns.text_col = a.text_col;
  if (passed("--label-col")) cfg.columns.label_col = a.label_col;
  if (passed("--id-col")) cfg.columns.id_col = a.id_col;
  if (passed("--k-folds")) cfg.k_folds = a.k_folds;
  if (passed("--seed")) cfg.seed = a.seed;
  if (passed("--min-df")) cfg.min_df = a.min_df;
  if (passed("--tfidf-scope")) apply_config_value(cfg, "tfidf_scope", a.tfidf_scope);
  if (passed("--duplicate-mode")) cfg.duplicate_mode = parse_duplicate_mode(a.duplicate_mode);
  if (passed("--classifiers")) apply_config_value(cfg, "classifiers", a.classifiers);
  if (passed("--out")) cfg.out_dir = a.out_dir;
  return cfg;
}

int cmd_run(const CLI::App* cmd, const RunArgs& a) {
  const RunConfig cfg = merge_config(cmd, a);
  const RunResult r = run_audit(cfg);
  std::cout << "records: " << r.dataset.size() << " (" << r.dataset.schema.size()
            << " labels)\n";
  std::cout << "contentious: " << r.contentious.size() << " (threshold "
            << majority_threshold(static_cast<int32_t>(cfg.classifiers.size())) << " of "
            << cfg.classifiers.size() << ")\n";
  std::cout << "pairs: " << r.pairs.pairs.size() << " (" << r.flagged.size() << " mismatched, "
            << r.pairs.unmatched.size() << " unmatched)\n";
  std::cout << "duplicate conflicts: " << r.conflicts.size() << "\n";
  std::cout << "artifacts: " << r.out_dir << "\n";
  return 0;
}

int cmd_synth(int64_t docs, int32_t classes, double noise, uint64_t seed,
              const std::string& out_dir, int32_t class_vocab, int32_t shared_vocab,
              int32_t len_min, int32_t len_max, int k_folds) {
  SynthSpec spec;
  spec.n_docs = docs;
  spec.n_classes = classes;
  spec.class_vocab_size = class_vocab;
  spec.shared_vocab_size = shared_vocab;
  spec.doc_len_min = len_min;
  spec.doc_len_max = len_max;
  spec.seed = seed;

  const Dataset clean = generate_corpus(spec);
  auto [noisy, log] = inject_label_noise(clean, noise, mix_seed(seed, 3));

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string corpus_path = (fs::path(out_dir) / "corpus.csv").string();
  save_corpus_csv(noisy, corpus_path);
  write_noise_log_csv((fs::path(out_dir) / "noise_log.csv").string(), log);

  RunConfig cfg;
  cfg.input = corpus_path;
  cfg.format = Format::csv;
  cfg.columns.id_col = "id";
  cfg.k_folds = k_folds;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  const RunResult r = run_audit(cfg);

  const DetectionMetrics m = evaluate_detection(r.flagged, log);
  record_noise_metrics(out_dir, noise, m);
  std::cout << "docs: " << docs << ", planted flips: " << m.n_flipped << "\n";
  std::cout << "flagged: " << m.n_flagged << ", true flips among them: " << m.n_hit << "\n";
  std::cout << "precision: " << (m.precision ? fixed(*m.precision, 4) : std::string("n/a"))
            << ", recall: " << fixed(m.recall, 4)
            << ", f1: " << (m.f1 ? fixed(*m.f1, 4) : std::string("n/a")) << "\n";
  std::cout << "artifacts: " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annotation-consistency audit for labeled text corpora"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "audit a labeled corpus");
  add_run_options(run, run_args);

  std::string report_dir, report_format = "md";
  CLI::App* report = app.add_subcommand("report", "re-render reports from a run directory");
  report->add_option("--run", report_dir, "run directory")->required();
  report->add_option("--format", report_format, "md or csv")->default_str("md");

  int64_t docs = 0;
  int32_t classes = 0, class_vocab = 50, shared_vocab = 100, len_min = 10, len_max = 20;
  double noise = 0.0;
  uint64_t synth_seed = 7;
  int synth_folds = 5;
  std::string synth_out;
  CLI::App* synth =
      app.add_subcommand("synth", "generate a noisy corpus, audit it, score detection");
  synth->add_option("--docs", docs, "number of documents")->required();
  synth->add_option("--classes", classes, "number of classes")->required();
  synth->add_option("--noise", noise, "label-flip fraction")->default_str("0");
  synth->add_option("--seed", synth_seed, "generation seed")->default_str("7");
  synth->add_option("--class-vocab", class_vocab, "terms per class")->default_str("50");
  synth->add_option("--shared-vocab", shared_vocab, "shared pool size")->default_str("100");
  synth->add_option("--len-min", len_min, "min tokens per doc")->default_str("10");
  synth->add_option("--len-max", len_max, "max tokens per doc")->default_str("20");
  synth->add_option("--k-folds", synth_folds, "cross-validation folds")->default_str("5");
  synth->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(run, run_args);
    if (*report) {
      std::cout << labelaudit::render_report(report_dir, report_format);
      return 0;
    }
    if (*synth)
      return cmd_synth(docs, classes, noise, synth_seed, synth_out, class_vocab, shared_vocab,
                       len_min, len_max, synth_folds);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "audit: %s\n", e.what());
    return 1;
  }
  return 0;
}
