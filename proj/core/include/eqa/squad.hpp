#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eqa::squad {

struct AnswerSpan {
  std::string text;
  std::size_t answer_start = 0;  // 0-based character offset into the owning context

  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

struct QuestionAnswer {
  std::string id;
  std::string question;
  std::vector<AnswerSpan> answers;
  bool is_impossible = false;
  // 2.0 only; spans refer to the paragraph the question was generated from,
  // which for shuffled questions is not the paragraph it is attached to.
  std::optional<std::vector<AnswerSpan>> plausible_answers;

  friend bool operator==(const QuestionAnswer&, const QuestionAnswer&) = default;
};

struct Paragraph {
  std::string context;
  std::vector<QuestionAnswer> qas;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

struct Article {
  std::string title;
  std::vector<Paragraph> paragraphs;

  friend bool operator==(const Article&, const Article&) = default;
};

struct Dataset {
  std::string version = "2.0";  // "1.1" or "2.0"
  std::vector<Article> articles;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct DatasetStats {
  std::size_t article_count = 0;
  std::size_t paragraph_count = 0;
  std::size_t question_count = 0;
  std::size_t answerable_count = 0;
  std::size_t unanswerable_count = 0;
  double unanswerable_ratio = 0.0;  // 0 when question_count == 0

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

struct Violation {
  std::string path;  // JSON-pointer-style location of the offending object
  std::string kind;  // "span-misalignment", "duplicate-id", ...
  std::string detail;
};

/// Parse a SQuAD-format JSON document. Version is taken from the top-level
/// "version" field ("2.0" assumed when absent). Unknown fields are ignored.
/// Throws ParseError (with byte offset), SchemaError (with JSON path) or
/// IntegrityError (duplicate qa id).
Dataset parse_dataset(const std::string& bytes);

/// Serialize as SQuAD JSON under the given version tag. Throws ConversionError
/// when "1.1" is requested but the dataset contains impossible questions.
std::string serialize_dataset(const Dataset& d, const std::string& version);

/// 1.1 -> 2.0: every qa gains is_impossible = false, nothing else changes.
/// An already-2.0 input is returned unchanged with *warned set.
Dataset convert_v11_to_v20(const Dataset& d, bool* warned = nullptr);

/// Every invariant breach as data; empty list iff the dataset is well-formed.
std::vector<Violation> validate(const Dataset& d);

DatasetStats compute_stats(const Dataset& d);

std::vector<std::string> all_ids(const Dataset& d);

struct CorpusParseResult {
  std::vector<Article> articles;  // paragraphs carry empty qas
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMaxParagraphChars = 2000;

/// Plain-text corpus: a line beginning with "= " opens an article (title),
/// blank-line-separated blocks are paragraphs. Over-long paragraphs are
/// truncated at the last sentence boundary before the limit, with a warning.
CorpusParseResult parse_corpus(const std::string& text);

std::string violations_to_ndjson(const std::vector<Violation>& violations);
std::string stats_to_json(const DatasetStats& stats);

}  // namespace eqa::squad
