#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eqa/rng.hpp"
#include "eqa/squad.hpp"

namespace eqa::cloze {

enum class Category { PERSON, PLACE, ORGANIZATION, DATE, NUMBER, THING };

const char* category_name(Category c);

struct AnswerCandidate {
  squad::AnswerSpan span;  // into the paragraph context
  Category category = Category::THING;

  friend bool operator==(const AnswerCandidate&, const AnswerCandidate&) = default;
};

struct ClozeInstance {
  std::size_t article_index = 0;
  std::size_t paragraph_index = 0;
  std::string cloze_text;  // contains the mask token exactly once
  AnswerCandidate answer;
  std::string source_subclause;
};

struct GenerationConfig {
  std::size_t max_questions_per_paragraph = 3;
  std::string mask_token = "[MASK]";
  std::uint64_t rng_seed = 20200;
  std::string translator = "rule";   // pluggable; "rule" is the built-in
  bool strict_unanswerable = true;   // drop shuffled questions whose answer
                                     // occurs verbatim in the target context
};

/// Rule-cascade candidate extraction: (1) date phrases and 4-digit years,
/// (2) number tokens, (3) maximal capitalized multi-token spans off sentence
/// start, (4) sentence-initial capitalized spans that also appear capitalized
/// mid-sentence elsewhere in the context. Document order, de-duplicated on
/// (start, text).
std::vector<AnswerCandidate> extract_candidates(const std::string& context);

/// Uniform draw. Throws RangeError on an empty list.
const AnswerCandidate& sample_candidate(const std::vector<AnswerCandidate>& candidates,
                                        Rng& rng);

/// Containing sentence, trimmed to the comma/semicolon-delimited clause around
/// the candidate when that clause has at least 5 tokens. Trailing sentence
/// punctuation is stripped.
std::string extract_subclause(const std::string& context, const AnswerCandidate& candidate);

/// Replace the first occurrence of the candidate text with the mask token.
ClozeInstance make_cloze(const std::string& subclause, const AnswerCandidate& candidate,
                         const GenerationConfig& cfg);

/// Rule-based cloze-to-question translation. Wh-word by category (PERSON Who,
/// PLACE Where, ORGANIZATION/THING What, DATE When, NUMBER How many); a mask
/// at the start keeps the remainder verbatim, elsewhere the remainder is
/// wrapped in a "did" template with its first letter lowercased. Output ends
/// with " ?".
std::string translate_cloze(const ClozeInstance& c, const std::string& mask_token = "[MASK]");

struct ParagraphGen {
  std::size_t paragraph_index = 0;
  std::vector<squad::QuestionAnswer> qas;
};

struct ArticleGenReport {
  std::string article;
  std::size_t paragraphs_skipped = 0;
  std::size_t qas_emitted = 0;
};

/// Up to max_questions_per_paragraph answerable qas per paragraph, sampled
/// without replacement from the extracted candidates. Ids are
/// "syn-ans-<seed>-<article>-<paragraph>-<n>".
std::vector<ParagraphGen> generate_answerable(const squad::Article& article,
                                              std::size_t article_index,
                                              const GenerationConfig& cfg, Rng& rng,
                                              ArticleGenReport* report = nullptr);

/// Whole-corpus driver. Each article runs on a sub-seed derived from
/// (cfg.rng_seed, article index), so output is byte-identical for any jobs
/// count. Articles that emit no questions are dropped.
squad::Dataset generate_answerable_dataset(const std::vector<squad::Article>& corpus,
                                           const GenerationConfig& cfg, int jobs = 1,
                                           std::vector<ArticleGenReport>* reports = nullptr);

std::string gen_reports_to_ndjson(const std::vector<ArticleGenReport>& reports);

}  // namespace eqa::cloze
