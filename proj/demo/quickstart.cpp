// Minimal in-process walkthrough: build a tiny corpus, run the two audit
// steps by hand, print what the pipeline would write.

#include <iostream>

#include <labelaudit/labelaudit.hpp>

int main() {
  using namespace labelaudit;

  // Twelve short reviews, one deliberately mislabeled (r11 repeats the
  // wording of the positive reviews but carries the "negative" label).
  Dataset d = make_dataset(
      {"positive", "negative"},
      {
          {"r00", "great phone and a great battery", 0},
          {"r01", "battery lasts forever, great value", 0},
          {"r02", "great camera, great screen, happy overall", 0},
          {"r03", "lovely screen, great battery, happy with it", 0},
          {"r04", "great value and a lovely camera", 0},
          {"r05", "happy with the battery, great phone overall", 0},
          {"r06", "awful screen and terrible battery", 1},
          {"r07", "terrible camera, awful value", 1},
          {"r08", "awful phone, terrible battery life", 1},
          {"r09", "terrible screen, awful experience overall", 1},
          {"r10", "broken after a week, terrible and awful", 1},
          {"r11", "great phone and a great battery", 1},
      });

  const TfidfModel tfidf = fit_tfidf(d);
  const FoldAssignment folds = stratified_kfold(d, 2, 11);
  const PredictionTable table =
      cross_val_predict(d, folds, default_classifier_roster(), tfidf, 11);
  const std::vector<ContentiousRecord> contentious = vote_contentious(d, table);

  const InvertedIndex index = build_index(d, tfidf);
  const PairResult pairs = build_pairs(contentious, index, d);

  std::cout << "contentious records:\n";
  for (const ContentiousRecord& r : contentious)
    std::cout << "  " << r.id << " (label " << d.schema.names[d.records[r.ordinal].label]
              << ", rejected by " << r.wrong_count << " of " << table.n_classifiers()
              << " classifiers)\n";

  std::cout << "neighbor pairs:\n";
  for (const AuditPair& p : pairs.pairs)
    std::cout << "  " << p.query_id << " (" << d.schema.names[p.query_label] << ") ~ "
              << p.neighbor_id << " (" << d.schema.names[p.neighbor_label]
              << "), similarity " << fixed9(p.similarity)
              << (p.mismatch ? "  <- labels disagree" : "") << "\n";
  return 0;
}
