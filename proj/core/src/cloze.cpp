#include "eqa/cloze.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <set>
#include <unordered_set>

#include "eqa/errors.hpp"
#include "json.hpp"

namespace eqa::cloze {

namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

struct Token {
  std::size_t begin = 0, end = 0;            // raw extent
  std::size_t core_begin = 0, core_end = 0;  // punctuation-stripped extent
  bool sentence_initial = false;
};

struct SentenceRange {
  std::size_t begin = 0, end = 0;
};

// Sentence boundary: [.?!] followed by whitespace and an uppercase letter.
std::vector<SentenceRange> sentence_ranges(const std::string& text) {
  std::vector<SentenceRange> out;
  std::size_t start = 0;
  while (start < text.size() && is_space(text[start])) ++start;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    while (j < text.size() && (text[j] == '.' || text[j] == '?' || text[j] == '!')) ++j;
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    if (k == text.size() || (k > j && is_upper(text[k]))) {
      out.push_back({start, j});
      start = k;
      i = k == 0 ? 0 : k - 1;
    }
  }
  if (start < text.size()) out.push_back({start, text.size()});
  return out;
}

std::vector<Token> tokenize(const std::string& text) {
  const auto sentences = sentence_ranges(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    Token t;
    t.begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    t.end = i;
    t.core_begin = t.begin;
    t.core_end = t.end;
    while (t.core_begin < t.core_end && is_punct(text[t.core_begin]) &&
           text[t.core_begin] != '[') {
      ++t.core_begin;
    }
    while (t.core_end > t.core_begin && is_punct(text[t.core_end - 1]) &&
           text[t.core_end - 1] != ']') {
      --t.core_end;
    }
    for (const auto& s : sentences) {
      if (t.begin == s.begin) {
        t.sentence_initial = true;
        break;
      }
    }
    tokens.push_back(t);
  }
  return tokens;
}

const std::unordered_set<std::string> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

const std::unordered_set<std::string> kOrgCues = {
    "Nets",   "Heat",    "Knicks",      "Bulls",     "Pistons",   "Lakers",
    "Celtics", "Inc",    "Corp",        "Corporation", "Company", "Club",
    "University", "Institute", "Committee", "Association", "Party", "Bank",
    "Team",   "League",  "Council",     "Society",   "Group",     "Bureau"};

const std::unordered_set<std::string> kPlaceSuffixCues = {
    "City",  "County", "Island", "Islands", "River", "Mountain", "Mountains",
    "Valley", "Bay",   "Beach",  "Park",    "Coast", "Street",   "Avenue"};

const std::unordered_set<std::string> kPlacePrefixCues = {
    "New", "North", "South", "East", "West", "Lake", "Mount",
    "Port", "San",  "Santa", "Los",  "Las",  "Fort"};

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool is_year(const std::string& s) {
  if (s.size() != 4 || !all_digits(s)) return false;
  int v = std::stoi(s);
  return v >= 1000 && v <= 2099;
}

bool is_day(const std::string& s) {
  if (s.empty() || s.size() > 2 || !all_digits(s)) return false;
  int v = std::stoi(s);
  return v >= 1 && v <= 31;
}

Category categorize_span(const std::vector<std::string>& cores) {
  if (kOrgCues.count(cores.back())) return Category::ORGANIZATION;
  if (kPlaceSuffixCues.count(cores.back()) || kPlacePrefixCues.count(cores.front())) {
    return Category::PLACE;
  }
  if (cores.size() == 2) return Category::PERSON;
  return Category::THING;
}

}  // namespace

const char* category_name(Category c) {
  switch (c) {
    case Category::PERSON: return "PERSON";
    case Category::PLACE: return "PLACE";
    case Category::ORGANIZATION: return "ORGANIZATION";
    case Category::DATE: return "DATE";
    case Category::NUMBER: return "NUMBER";
    case Category::THING: return "THING";
  }
  return "?";
}

std::vector<AnswerCandidate> extract_candidates(const std::string& context) {
  const auto tokens = tokenize(context);
  std::vector<AnswerCandidate> out;
  std::vector<bool> consumed(tokens.size(), false);

  auto core_of = [&](const Token& t) {
    return context.substr(t.core_begin, t.core_end - t.core_begin);
  };
  auto add = [&](std::size_t begin, std::size_t end, Category cat) {
    out.push_back({{context.substr(begin, end - begin), begin}, cat});
  };

  // rule 1: date phrases (month [day][, year]) and standalone 4-digit years
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string core = core_of(tokens[i]);
    if (kMonths.count(core)) {
      std::size_t last = i;
      if (last + 1 < tokens.size() && is_day(core_of(tokens[last + 1]))) ++last;
      if (last + 1 < tokens.size() && is_year(core_of(tokens[last + 1]))) ++last;
      for (std::size_t k = i; k <= last; ++k) consumed[k] = true;
      add(tokens[i].core_begin, tokens[last].core_end, Category::DATE);
      i = last;
    } else if (is_year(core)) {
      consumed[i] = true;
      add(tokens[i].core_begin, tokens[i].core_end, Category::DATE);
    }
  }

  // rule 2: remaining number tokens
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (consumed[i]) continue;
    const std::string core = core_of(tokens[i]);
    if (all_digits(core)) {
      consumed[i] = true;
      add(tokens[i].core_begin, tokens[i].core_end, Category::NUMBER);
    }
  }

  // rules 3 and 4: maximal capitalized multi-token spans
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto capitalized = [&](std::size_t k) {
      return !consumed[k] && tokens[k].core_begin < tokens[k].core_end &&
             is_upper(context[tokens[k].core_begin]);
    };
    if (!capitalized(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && capitalized(j + 1)) ++j;
    if (j > i) {
      const std::size_t begin = tokens[i].core_begin;
      const std::size_t end = tokens[j].core_end;
      std::vector<std::string> cores;
      for (std::size_t k = i; k <= j; ++k) cores.push_back(core_of(tokens[k]));
      const std::string text = context.substr(begin, end - begin);
      bool keep = true;
      if (tokens[i].sentence_initial) {
        // rule 4: only when the same span recurs capitalized mid-sentence
        std::size_t pos = context.find(text);
        keep = false;
        while (pos != std::string::npos) {
          if (pos != begin) {
            keep = true;
            break;
          }
          pos = context.find(text, pos + 1);
        }
      }
      if (keep) add(begin, end, categorize_span(cores));
    }
    i = j + 1;
  }

  std::sort(out.begin(), out.end(), [](const AnswerCandidate& a, const AnswerCandidate& b) {
    if (a.span.answer_start != b.span.answer_start) {
      return a.span.answer_start < b.span.answer_start;
    }
    return a.span.text < b.span.text;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const AnswerCandidate& a, const AnswerCandidate& b) {
                          return a.span.answer_start == b.span.answer_start &&
                                 a.span.text == b.span.text;
                        }),
            out.end());
  return out;
}

const AnswerCandidate& sample_candidate(const std::vector<AnswerCandidate>& candidates,
                                        Rng& rng) {
  if (candidates.empty()) {
    throw RangeError("sample_candidate: no candidates to sample from");
  }
  return candidates[bounded(rng, candidates.size())];
}

std::string extract_subclause(const std::string& context, const AnswerCandidate& candidate) {
  const std::size_t cand_begin = candidate.span.answer_start;
  const std::size_t cand_end = cand_begin + candidate.span.text.size();

  SentenceRange sentence{0, context.size()};
  for (const auto& s : sentence_ranges(context)) {
    if (cand_begin >= s.begin && cand_end <= s.end) {
      sentence = s;
      break;
    }
  }

  // clause boundaries on , and ; outside the candidate itself
  std::size_t clause_begin = sentence.begin;
  std::size_t clause_end = sentence.end;
  for (std::size_t p = sentence.begin; p < sentence.end; ++p) {
    if (context[p] != ',' && context[p] != ';') continue;
    if (p >= cand_begin && p < cand_end) continue;
    if (p < cand_begin) {
      clause_begin = p + 1;
    } else {
      clause_end = p;
      break;
    }
  }

  auto trimmed = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(context[b])) ++b;
    while (e > b && (is_space(context[e - 1]) || context[e - 1] == '.' ||
                     context[e - 1] == '?' || context[e - 1] == '!')) {
      --e;
    }
    return context.substr(b, e - b);
  };

  const std::string clause = trimmed(clause_begin, clause_end);
  std::size_t token_count = 0;
  for (std::size_t p = 0; p < clause.size();) {
    while (p < clause.size() && is_space(clause[p])) ++p;
    if (p < clause.size()) ++token_count;
    while (p < clause.size() && !is_space(clause[p])) ++p;
  }
  if (token_count >= 5) return clause;
  return trimmed(sentence.begin, sentence.end);
}

ClozeInstance make_cloze(const std::string& subclause, const AnswerCandidate& candidate,
                         const GenerationConfig& cfg) {
  const std::size_t pos = subclause.find(candidate.span.text);
  if (pos == std::string::npos) {
    throw Error("make_cloze: candidate \"" + candidate.span.text +
                "\" not found in subclause \"" + subclause + "\"");
  }
  ClozeInstance c;
  c.answer = candidate;
  c.source_subclause = subclause;
  c.cloze_text = subclause.substr(0, pos) + cfg.mask_token +
                 subclause.substr(pos + candidate.span.text.size());
  return c;
}

namespace {

const char* wh_word(Category c) {
  switch (c) {
    case Category::PERSON: return "Who";
    case Category::PLACE: return "Where";
    case Category::ORGANIZATION: return "What";
    case Category::DATE: return "When";
    case Category::NUMBER: return "How many";
    case Category::THING: return "What";
  }
  return "What";
}

std::string collapse_spaces(const std::string& s) {
  std::string out;
  bool prev_space = true;
  for (char c : s) {
    if (is_space(c)) {
      if (!prev_space) out += ' ';
      prev_space = true;
    } else {
      out += c;
      prev_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

std::string translate_cloze(const ClozeInstance& c, const std::string& mask_token) {
  const std::size_t pos = c.cloze_text.find(mask_token);
  if (pos == std::string::npos) {
    throw Error("translate_cloze: mask token not found in \"" + c.cloze_text + "\"");
  }
  const std::string wh = wh_word(c.answer.category);
  const bool prefix_mask = pos == 0;

  std::string rest = c.cloze_text.substr(0, pos) + c.cloze_text.substr(pos + mask_token.size());
  rest = collapse_spaces(rest);
  if (rest.empty()) return wh + " ?";
  if (prefix_mask) return wh + " " + rest + " ?";

  // infix/suffix masks get a "did" template with the remainder kept in order
  for (char& ch : rest) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      break;
    }
  }
  return wh + " did " + rest + " ?";
}

std::vector<ParagraphGen> generate_answerable(const squad::Article& article,
                                              std::size_t article_index,
                                              const GenerationConfig& cfg, Rng& rng,
                                              ArticleGenReport* report) {
  if (cfg.translator != "rule") {
    throw Error("unknown translator \"" + cfg.translator + "\"");
  }
  std::vector<ParagraphGen> out;
  ArticleGenReport local{article.title, 0, 0};

  for (std::size_t pi = 0; pi < article.paragraphs.size(); ++pi) {
    auto candidates = extract_candidates(article.paragraphs[pi].context);
    if (candidates.empty()) {
      ++local.paragraphs_skipped;
      continue;
    }
    ParagraphGen gen;
    gen.paragraph_index = pi;
    const std::size_t k = std::min(cfg.max_questions_per_paragraph, candidates.size());
    for (std::size_t n = 0; n < k; ++n) {
      // sampling without replacement, one uniform draw per emitted question
      const std::size_t idx = bounded(rng, candidates.size());
      const AnswerCandidate candidate = candidates[idx];
      candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(idx));

      const std::string subclause =
          extract_subclause(article.paragraphs[pi].context, candidate);
      const ClozeInstance cloze = make_cloze(subclause, candidate, cfg);

      squad::QuestionAnswer qa;
      qa.id = "syn-ans-" + std::to_string(cfg.rng_seed) + "-" +
              std::to_string(article_index) + "-" + std::to_string(pi) + "-" +
              std::to_string(n);
      qa.question = translate_cloze(cloze, cfg.mask_token);
      qa.answers.push_back(candidate.span);
      qa.is_impossible = false;
      gen.qas.push_back(std::move(qa));
      ++local.qas_emitted;
    }
    out.push_back(std::move(gen));
  }
  if (report) *report = std::move(local);
  return out;
}

squad::Dataset generate_answerable_dataset(const std::vector<squad::Article>& corpus,
                                           const GenerationConfig& cfg, int jobs,
                                           std::vector<ArticleGenReport>* reports) {
  struct ArticleResult {
    std::vector<ParagraphGen> gens;
    ArticleGenReport report;
  };
  std::vector<ArticleResult> results(corpus.size());

  auto run_one = [&](std::size_t ai) {
    Rng rng(derive_subseed(cfg.rng_seed, ai));
    results[ai].gens = generate_answerable(corpus[ai], ai, cfg, rng, &results[ai].report);
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
    if (results[ai].report.qas_emitted == 0) continue;
    squad::Article article = corpus[ai];
    for (auto& gen : results[ai].gens) {
      article.paragraphs[gen.paragraph_index].qas = std::move(gen.qas);
    }
    d.articles.push_back(std::move(article));
  }
  if (reports) {
    for (auto& r : results) reports->push_back(std::move(r.report));
  }
  return d;
}

std::string gen_reports_to_ndjson(const std::vector<ArticleGenReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    nlohmann::ordered_json j{{"article", r.article},
                             {"paragraphs_skipped", r.paragraphs_skipped},
                             {"qas_emitted", r.qas_emitted}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace eqa::cloze
