#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqa/cloze.hpp"
#include "eqa/rng.hpp"
#include "eqa/squad.hpp"

namespace eqa::unans {

struct ShuffleAssignment {
  // (question source paragraph index, target paragraph index); source != target
  std::vector<std::pair<std::size_t, std::size_t>> mapping;
};

struct OverlapScore {
  double value = 0.0;  // [0, 1]
};

struct UnansArticleReport {
  std::string article;
  std::optional<std::string> skipped_reason;
  std::size_t emitted = 0;
  std::size_t dropped_strict = 0;  // removed by the verbatim-answer check
  double mean_overlap = 0.0;
};

/// Reassign every question to a uniformly random paragraph of the same
/// article other than its source. question_counts[i] is the number of
/// questions generated from paragraph i; paragraph_count is the article's
/// total. Throws NotShufflableError when fewer than 2 paragraphs carry
/// questions.
ShuffleAssignment shuffle_within_article(const std::vector<std::size_t>& question_counts,
                                         std::size_t paragraph_count, Rng& rng);

/// Fraction of the question's normalized tokens present in the context's
/// normalized token set. Empty question after normalization scores 0.
OverlapScore overlap_score(const std::string& question, const std::string& context);

struct AttachedQa {
  std::size_t source_paragraph = 0;
  std::size_t target_paragraph = 0;
  squad::QuestionAnswer qa;  // is_impossible, empty answers, plausible_answers set
};

/// generate_answerable -> shuffle_within_article -> attach. The original
/// answer span (into the source paragraph) is kept as a plausible answer.
/// In strict mode questions whose answer text occurs verbatim in the target
/// context are dropped. Ids are "syn-unans-<seed>-<article>-<n>".
std::vector<AttachedQa> generate_unanswerable(const squad::Article& article,
                                              std::size_t article_index,
                                              const cloze::GenerationConfig& cfg, Rng& rng,
                                              UnansArticleReport* report = nullptr);

/// Whole-corpus driver with the same per-article sub-seed scheme as the
/// answerable generator. Articles that cannot be shuffled are skipped with a
/// report entry.
squad::Dataset generate_unanswerable_dataset(const std::vector<squad::Article>& corpus,
                                             const cloze::GenerationConfig& cfg,
                                             int jobs = 1,
                                             std::vector<UnansArticleReport>* reports = nullptr);

std::string unans_reports_to_ndjson(const std::vector<UnansArticleReport>& reports);

}  // namespace eqa::unans
