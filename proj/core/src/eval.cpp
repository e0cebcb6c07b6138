#include "eqa/eval.hpp"

#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "eqa/errors.hpp"
#include "json.hpp"

namespace eqa::eval {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> normalize_answer(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && cur != "a" && cur != "an" && cur != "the") {
      tokens.push_back(cur);
    }
    cur.clear();
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      // punctuation is removed, not turned into a separator
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  flush();
  return tokens;
}

double token_f1(const std::vector<std::string>& pred_tokens,
                const std::vector<std::string>& gold_tokens) {
  if (pred_tokens.empty() && gold_tokens.empty()) return 1.0;
  if (pred_tokens.empty() || gold_tokens.empty()) return 0.0;

  std::unordered_map<std::string, std::size_t> gold_counts;
  for (const auto& t : gold_tokens) ++gold_counts[t];
  std::size_t common = 0;
  for (const auto& t : pred_tokens) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / pred_tokens.size();
  const double recall = static_cast<double>(common) / gold_tokens.size();
  return 2.0 * precision * recall / (precision + recall);
}

QuestionScore score_question(const squad::QuestionAnswer& gold, const std::string& pred) {
  QuestionScore s;
  s.id = gold.id;
  if (gold.is_impossible) {
    const bool no_answer = pred.empty();
    s.em = no_answer ? 1 : 0;
    s.f1 = no_answer ? 1.0 : 0.0;
    return s;
  }
  const auto pred_tokens = normalize_answer(pred);
  for (const auto& answer : gold.answers) {
    const auto gold_tokens = normalize_answer(answer.text);
    if (pred_tokens == gold_tokens) s.em = 1;
    s.f1 = std::max(s.f1, token_f1(pred_tokens, gold_tokens));
  }
  if (s.em == 1) s.f1 = 1.0;
  return s;
}

EvalReport evaluate(const squad::Dataset& gold, const Predictions& preds) {
  EvalReport r;
  double em_sum = 0.0, f1_sum = 0.0;
  double ans_em = 0.0, ans_f1 = 0.0, un_em = 0.0, un_f1 = 0.0;
  std::size_t seen_pred_ids = 0;

  for (const auto& article : gold.articles) {
    for (const auto& paragraph : article.paragraphs) {
      for (const auto& qa : paragraph.qas) {
        QuestionScore s;
        auto it = preds.find(qa.id);
        if (it == preds.end()) {
          s.id = qa.id;
          ++r.missing;
        } else {
          ++seen_pred_ids;
          s = score_question(qa, it->second);
        }
        em_sum += s.em;
        f1_sum += s.f1;
        if (qa.is_impossible) {
          ++r.unanswerable.total;
          un_em += s.em;
          un_f1 += s.f1;
        } else {
          ++r.answerable.total;
          ans_em += s.em;
          ans_f1 += s.f1;
        }
        r.per_question.push_back(std::move(s));
        ++r.total;
      }
    }
  }
  r.extra = preds.size() - seen_pred_ids;

  auto pct = [](double sum, std::size_t n) { return n == 0 ? 0.0 : 100.0 * sum / n; };
  r.em = pct(em_sum, r.total);
  r.f1 = pct(f1_sum, r.total);
  r.answerable.em = pct(ans_em, r.answerable.total);
  r.answerable.f1 = pct(ans_f1, r.answerable.total);
  r.unanswerable.em = pct(un_em, r.unanswerable.total);
  r.unanswerable.f1 = pct(un_f1, r.unanswerable.total);
  return r;
}

GainReport gain_per_example(double baseline_f1, double baseline_em, double augmented_f1,
                            double augmented_em, std::size_t added) {
  if (added == 0) throw RangeError("gain_per_example: added must be positive");
  GainReport g;
  g.delta_f1 = augmented_f1 - baseline_f1;
  g.delta_em = augmented_em - baseline_em;
  g.added_examples = added;
  g.f1_gain_per_1k = g.delta_f1 * 1000.0 / static_cast<double>(added);
  g.em_gain_per_1k = g.delta_em * 1000.0 / static_cast<double>(added);
  return g;
}

GainReport gain_per_example(const EvalReport& baseline, const EvalReport& augmented,
                            std::size_t added) {
  return gain_per_example(baseline.f1, baseline.em, augmented.f1, augmented.em, added);
}

Predictions parse_predictions(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed predictions JSON at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("predictions file must be a JSON object of id -> answer");
  }
  Predictions p;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!it.value().is_string()) {
      throw SchemaError("prediction for id \"" + it.key() + "\" must be a string");
    }
    p[it.key()] = it.value().get<std::string>();
  }
  return p;
}

namespace {
double round2(double v) { return std::round(v * 100.0) / 100.0; }
}  // namespace

std::string report_to_json(const EvalReport& r) {
  ordered_json j{{"exact", round2(r.em)},
                 {"f1", round2(r.f1)},
                 {"total", r.total},
                 {"answerable",
                  {{"exact", round2(r.answerable.em)},
                   {"f1", round2(r.answerable.f1)},
                   {"total", r.answerable.total}}},
                 {"unanswerable",
                  {{"exact", round2(r.unanswerable.em)},
                   {"f1", round2(r.unanswerable.f1)},
                   {"total", r.unanswerable.total}}},
                 {"missing", r.missing},
                 {"extra", r.extra}};
  return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "              EM       F1    total\n";
  out << "all       " << std::setw(6) << r.em << "   " << std::setw(6) << r.f1 << "   "
      << std::setw(6) << r.total << "\n";
  out << "answer.   " << std::setw(6) << r.answerable.em << "   " << std::setw(6)
      << r.answerable.f1 << "   " << std::setw(6) << r.answerable.total << "\n";
  out << "unansw.   " << std::setw(6) << r.unanswerable.em << "   " << std::setw(6)
      << r.unanswerable.f1 << "   " << std::setw(6) << r.unanswerable.total << "\n";
  out << "missing " << r.missing << ", extra " << r.extra << "\n";
  return out.str();
}

std::string gain_to_json(const GainReport& g) {
  ordered_json j{{"delta_f1", g.delta_f1},
                 {"delta_em", g.delta_em},
                 {"added_examples", g.added_examples},
                 {"f1_gain_per_1k", g.f1_gain_per_1k},
                 {"em_gain_per_1k", g.em_gain_per_1k}};
  return j.dump(2) + "\n";
}

}  // namespace eqa::eval
