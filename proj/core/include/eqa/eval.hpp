#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "eqa/squad.hpp"

namespace eqa::eval {

// qa id -> predicted answer text; "" is the no-answer prediction.
using Predictions = std::unordered_map<std::string, std::string>;

struct QuestionScore {
  std::string id;
  int em = 0;        // 0 or 1
  double f1 = 0.0;   // [0, 1]
};

struct Subset {
  double em = 0.0;  // percentages
  double f1 = 0.0;
  std::size_t total = 0;
};

struct EvalReport {
  double em = 0.0;  // percentages, macro-averaged over all gold questions
  double f1 = 0.0;
  std::size_t total = 0;
  Subset answerable;
  Subset unanswerable;
  std::size_t missing = 0;  // gold ids with no prediction (scored 0/0)
  std::size_t extra = 0;    // prediction ids absent from gold (ignored)
  std::vector<QuestionScore> per_question;
};

struct GainReport {
  double delta_f1 = 0.0;  // percentage points
  double delta_em = 0.0;
  std::size_t added_examples = 0;
  double f1_gain_per_1k = 0.0;  // points per 1,000 added examples
  double em_gain_per_1k = 0.0;
};

/// SQuAD-style normalization: lowercase, strip punctuation characters, drop
/// the articles "a"/"an"/"the" as whole tokens, split on whitespace.
std::vector<std::string> normalize_answer(const std::string& text);

/// Harmonic mean of multiset-overlap precision and recall.
/// Both empty -> 1; exactly one empty -> 0.
double token_f1(const std::vector<std::string>& pred_tokens,
                const std::vector<std::string>& gold_tokens);

/// Answerable gold: em iff normalized pred equals any normalized gold answer;
/// f1 is the max token_f1 over gold answers. Unanswerable gold: empty pred
/// scores (1, 1), anything else (0, 0).
QuestionScore score_question(const squad::QuestionAnswer& gold, const std::string& pred);

EvalReport evaluate(const squad::Dataset& gold, const Predictions& preds);

GainReport gain_per_example(const EvalReport& baseline, const EvalReport& augmented,
                            std::size_t added);
GainReport gain_per_example(double baseline_f1, double baseline_em, double augmented_f1,
                            double augmented_em, std::size_t added);

Predictions parse_predictions(const std::string& bytes);

std::string report_to_json(const EvalReport& r);
std::string report_to_table(const EvalReport& r);
std::string gain_to_json(const GainReport& r);

}  // namespace eqa::eval
