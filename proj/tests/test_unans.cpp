#include "eqa/unans.hpp"

#include <map>
#include <set>

#include "doctest.h"
#include "eqa/errors.hpp"
#include "eqa/eval.hpp"
#include "testutil.hpp"

using namespace eqa;
using namespace eqa::unans;

namespace {

// Two-paragraph article where both paragraphs yield candidates and the
// answer of one paragraph does not occur in the other (strict mode keeps all).
squad::Article two_paragraph_article() {
  return {"Test Article",
          {{"Elena Petrova founded the Aurora Institute in 1993 after a long career.",
            {}},
           {"The collective later moved to Osman Bridge where Tomas Keller taught "
            "painting for 20 years.",
            {}}}};
}

}  // namespace

TEST_CASE("shuffle_within_article") {
  DOCTEST_SUBCASE("two paragraphs force the only derangement") {
    Rng rng(5);
    const auto a = shuffle_within_article({1, 1}, 2, rng);
    REQUIRE(a.mapping.size() == 2);
    CHECK(a.mapping[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(a.mapping[1] == std::pair<std::size_t, std::size_t>{1, 0});
  }
  DOCTEST_SUBCASE("single question-bearing paragraph is not shufflable") {
    Rng rng(5);
    CHECK_THROWS_AS(shuffle_within_article({3}, 1, rng), NotShufflableError);
    CHECK_THROWS_AS(shuffle_within_article({3, 0, 0}, 3, rng), NotShufflableError);
  }
  DOCTEST_SUBCASE("three paragraphs: each question lands on its 2 legal targets evenly") {
    // legal targets per source are exactly the other two paragraphs
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    const int runs = 20000;
    for (int i = 0; i < runs; ++i) {
      Rng rng(derive_subseed(99, static_cast<std::uint64_t>(i)));
      const auto a = shuffle_within_article({1, 1, 1}, 3, rng);
      for (const auto& [s, t] : a.mapping) {
        CHECK(s != t);
        counts[{s, t}]++;
      }
    }
    CHECK(counts.size() == 6);  // exhaustive enumeration of legal pairs
    for (const auto& [pair, n] : counts) {
      const double freq = static_cast<double>(n) / runs;
      CHECK(freq == doctest::Approx(0.5).epsilon(0.05));
    }
  }
  DOCTEST_SUBCASE("deterministic under a fixed seed") {
    Rng a(42), b(42);
    CHECK(shuffle_within_article({2, 3, 1}, 3, a).mapping ==
          shuffle_within_article({2, 3, 1}, 3, b).mapping);
  }
}

TEST_CASE("overlap_score") {
  CHECK(overlap_score("The New Jersey Nets.", "the new jersey nets").value == 1.0);
  CHECK(overlap_score("alpha bravo", "charlie delta echo").value == 0.0);
  DOCTEST_SUBCASE("hand-computed fraction on the fiscal-policy pair") {
    // 21 normalized question tokens ("a" and punctuation dropped); only
    // "fiscal" and "is" appear in the fiscal context token set
    const auto v = overlap_score(testutil::kFiscalQuestion, testutil::kFiscalContext).value;
    CHECK(v == doctest::Approx(2.0 / 21.0).epsilon(1e-9));
  }
  DOCTEST_SUBCASE("empty after normalization scores 0") {
    CHECK(overlap_score("...", "anything at all").value == 0.0);
  }
}

TEST_CASE("generate_unanswerable") {
  cloze::GenerationConfig cfg;
  cfg.rng_seed = 77;
  cfg.max_questions_per_paragraph = 2;

  DOCTEST_SUBCASE("outputs are impossible, deranged, and valid") {
    const auto article = two_paragraph_article();
    Rng rng(cfg.rng_seed);
    UnansArticleReport report;
    const auto out = generate_unanswerable(article, 0, cfg, rng, &report);
    REQUIRE(!out.empty());
    CHECK(!report.skipped_reason.has_value());
    CHECK(report.emitted == out.size());
    for (const auto& a : out) {
      CHECK(a.source_paragraph != a.target_paragraph);
      CHECK(a.qa.is_impossible);
      CHECK(a.qa.answers.empty());
      REQUIRE(a.qa.plausible_answers.has_value());
      // plausible answer points into the source paragraph
      const auto& span = a.qa.plausible_answers->front();
      CHECK(article.paragraphs[a.source_paragraph].context.compare(
                span.answer_start, span.text.size(), span.text) == 0);
    }
  }
  DOCTEST_SUBCASE("article with no candidates yields nothing") {
    squad::Article dull{"dull",
                        {{"all lowercase words here.", {}}, {"more plain text.", {}}}};
    Rng rng(1);
    UnansArticleReport report;
    CHECK(generate_unanswerable(dull, 0, cfg, rng, &report).empty());
    CHECK(report.skipped_reason.has_value());
  }
  DOCTEST_SUBCASE("same article and seed twice is byte-identical") {
    const std::vector<squad::Article> corpus{two_paragraph_article()};
    const auto a =
        squad::serialize_dataset(generate_unanswerable_dataset(corpus, cfg), "2.0");
    const auto b =
        squad::serialize_dataset(generate_unanswerable_dataset(corpus, cfg), "2.0");
    CHECK(a == b);
  }
  DOCTEST_SUBCASE("strict mode drops questions whose answer occurs in the target") {
    squad::Article overlap_article{
        "Overlap",
        {{"Elena Petrova founded the institute.", {}},
         {"Elena Petrova later left the institute and started painting.", {}}}};
    cloze::GenerationConfig strict = cfg;
    strict.max_questions_per_paragraph = 10;
    Rng rng1(3);
    UnansArticleReport r1;
    const auto kept = generate_unanswerable(overlap_article, 0, strict, rng1, &r1);
    for (const auto& a : kept) {
      const auto& answer = a.qa.plausible_answers->front().text;
      CHECK(overlap_article.paragraphs[a.target_paragraph].context.find(answer) ==
            std::string::npos);
    }
    cloze::GenerationConfig lax = strict;
    lax.strict_unanswerable = false;
    Rng rng2(3);
    UnansArticleReport r2;
    const auto all = generate_unanswerable(overlap_article, 0, lax, rng2, &r2);
    CHECK(all.size() == kept.size() + r1.dropped_strict);
    CHECK(r2.dropped_strict == 0);
  }
}

TEST_CASE("generate_unanswerable_dataset output passes validate") {
  std::vector<squad::Article> corpus;
  for (int i = 0; i < 6; ++i) {
    auto a = two_paragraph_article();
    a.title += " " + std::to_string(i);
    corpus.push_back(a);
  }
  cloze::GenerationConfig cfg;
  std::vector<UnansArticleReport> reports;
  const auto d = generate_unanswerable_dataset(corpus, cfg, 2, &reports);
  CHECK(squad::validate(d).empty());
  const auto s = squad::compute_stats(d);
  CHECK(s.question_count > 0);
  CHECK(s.unanswerable_count == s.question_count);
  CHECK(reports.size() == corpus.size());

  // worker-count independence
  const auto one = squad::serialize_dataset(generate_unanswerable_dataset(corpus, cfg, 1), "2.0");
  const auto four = squad::serialize_dataset(generate_unanswerable_dataset(corpus, cfg, 4), "2.0");
  CHECK(one == four);
}

TEST_CASE("within-article overlap beats cross-article overlap") {
  // operationalizes the relevance argument on a small themed corpus
  std::vector<squad::Article> corpus;
  const char* themes[] = {"Karvel", "Donmar", "Elvira", "Tessin", "Quorra", "Belmar"};
  for (int i = 0; i < 6; ++i) {
    squad::Article a{std::string(themes[i]) + " Chronicle", {}};
    for (int p = 0; p < 3; ++p) {
      std::string ctx = std::string("The ") + themes[i] + " Council met in " +
                        std::to_string(1950 + i * 10 + p) + ". Rosa Lindt" +
                        std::to_string(i) + std::to_string(p) + " spoke about the " +
                        themes[i] + " Council budget at length.";
      a.paragraphs.push_back({ctx, {}});
    }
    corpus.push_back(a);
  }
  cloze::GenerationConfig cfg;
  cfg.rng_seed = 11;

  double within_sum = 0.0, cross_sum = 0.0;
  std::size_t n = 0;
  Rng cross_rng(17);
  for (std::size_t ai = 0; ai < corpus.size(); ++ai) {
    Rng rng(derive_subseed(cfg.rng_seed, ai));
    const auto out = generate_unanswerable(corpus[ai], ai, cfg, rng);
    for (const auto& a : out) {
      within_sum +=
          overlap_score(a.qa.question, corpus[ai].paragraphs[a.target_paragraph].context)
              .value;
      std::size_t other = bounded(cross_rng, corpus.size() - 1);
      if (other >= ai) ++other;
      const auto& other_paragraphs = corpus[other].paragraphs;
      cross_sum +=
          overlap_score(a.qa.question,
                        other_paragraphs[bounded(cross_rng, other_paragraphs.size())].context)
              .value;
      ++n;
    }
  }
  REQUIRE(n > 0);
  CHECK(within_sum / n > cross_sum / n);
}
