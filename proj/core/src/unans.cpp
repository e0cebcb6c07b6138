#include "eqa/unans.hpp"

#include <atomic>
#include <future>
#include <unordered_set>

#include "eqa/errors.hpp"
#include "eqa/eval.hpp"
#include "json.hpp"

namespace eqa::unans {

ShuffleAssignment shuffle_within_article(const std::vector<std::size_t>& question_counts,
                                         std::size_t paragraph_count, Rng& rng) {
  std::size_t bearing = 0;
  for (std::size_t c : question_counts) {
    if (c > 0) ++bearing;
  }
  if (bearing < 2 || paragraph_count < 2) {
    throw NotShufflableError("article has fewer than 2 question-bearing paragraphs");
  }

  ShuffleAssignment a;
  for (std::size_t source = 0; source < question_counts.size(); ++source) {
    for (std::size_t q = 0; q < question_counts[source]; ++q) {
      std::size_t target = bounded(rng, paragraph_count - 1);
      if (target >= source) ++target;  // uniform over all paragraphs but the source
      a.mapping.emplace_back(source, target);
    }
  }
  return a;
}

OverlapScore overlap_score(const std::string& question, const std::string& context) {
  const auto q_tokens = eval::normalize_answer(question);
  if (q_tokens.empty()) return {0.0};
  const auto c_tokens = eval::normalize_answer(context);
  const std::unordered_set<std::string> c_set(c_tokens.begin(), c_tokens.end());
  std::size_t shared = 0;
  for (const auto& t : q_tokens) {
    if (c_set.count(t)) ++shared;
  }
  return {static_cast<double>(shared) / static_cast<double>(q_tokens.size())};
}

std::vector<AttachedQa> generate_unanswerable(const squad::Article& article,
                                              std::size_t article_index,
                                              const cloze::GenerationConfig& cfg, Rng& rng,
                                              UnansArticleReport* report) {
  UnansArticleReport local{article.title, std::nullopt, 0, 0, 0.0};
  const auto gens = cloze::generate_answerable(article, article_index, cfg, rng);

  std::vector<std::size_t> question_counts(article.paragraphs.size(), 0);
  std::vector<const squad::QuestionAnswer*> flat;  // paragraph order, question order
  for (const auto& gen : gens) {
    question_counts[gen.paragraph_index] = gen.qas.size();
    for (const auto& qa : gen.qas) flat.push_back(&qa);
  }

  std::vector<AttachedQa> out;
  try {
    const ShuffleAssignment assignment =
        shuffle_within_article(question_counts, article.paragraphs.size(), rng);

    double overlap_sum = 0.0;
    for (std::size_t i = 0; i < assignment.mapping.size(); ++i) {
      const auto [source, target] = assignment.mapping[i];
      const squad::QuestionAnswer& original = *flat[i];
      const std::string& target_context = article.paragraphs[target].context;

      if (cfg.strict_unanswerable &&
          target_context.find(original.answers.front().text) != std::string::npos) {
        ++local.dropped_strict;
        continue;
      }

      AttachedQa attached;
      attached.source_paragraph = source;
      attached.target_paragraph = target;
      attached.qa.id = "syn-unans-" + std::to_string(cfg.rng_seed) + "-" +
                       std::to_string(article_index) + "-" + std::to_string(out.size());
      attached.qa.question = original.question;
      attached.qa.is_impossible = true;
      attached.qa.plausible_answers = original.answers;  // span into the source paragraph
      overlap_sum += overlap_score(attached.qa.question, target_context).value;
      out.push_back(std::move(attached));
    }
    local.emitted = out.size();
    local.mean_overlap = out.empty() ? 0.0 : overlap_sum / static_cast<double>(out.size());
  } catch (const NotShufflableError& e) {
    local.skipped_reason = e.what();
  }

  if (report) *report = std::move(local);
  return out;
}

squad::Dataset generate_unanswerable_dataset(const std::vector<squad::Article>& corpus,
                                             const cloze::GenerationConfig& cfg, int jobs,
                                             std::vector<UnansArticleReport>* reports) {
  struct ArticleResult {
    std::vector<AttachedQa> qas;
    UnansArticleReport report;
  };
  std::vector<ArticleResult> results(corpus.size());

  auto run_one = [&](std::size_t ai) {
    Rng rng(derive_subseed(cfg.rng_seed, ai));
    results[ai].qas = generate_unanswerable(corpus[ai], ai, cfg, rng, &results[ai].report);
  };

  if (jobs <= 1 || corpus.size() < 2) {
    for (std::size_t ai = 0; ai < corpus.size(); ++ai) run_one(ai);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < jobs; ++w) {
      futures.push_back(std::async(std::launch::async, [&] {
        for (std::size_t ai = next.fetch_add(1); ai < corpus.size();
             ai = next.fetch_add(1)) {
          run_one(ai);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  squad::Dataset d;
  d.version = "2.0";
  for (std::size_t ai = 0; ai < corpus.size(); ++ai) {
    if (results[ai].qas.empty()) continue;
    squad::Article article = corpus[ai];
    for (auto& attached : results[ai].qas) {
      article.paragraphs[attached.target_paragraph].qas.push_back(std::move(attached.qa));
    }
    d.articles.push_back(std::move(article));
  }
  if (reports) {
    for (auto& r : results) reports->push_back(std::move(r.report));
  }
  return d;
}

std::string unans_reports_to_ndjson(const std::vector<UnansArticleReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["article"] = r.article;
    if (r.skipped_reason) j["skipped_reason"] = *r.skipped_reason;
    j["emitted"] = r.emitted;
    j["dropped_strict"] = r.dropped_strict;
    j["mean_overlap"] = r.mean_overlap;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace eqa::unans
