#include "eqa/squad.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "eqa/errors.hpp"
#include "json.hpp"

namespace eqa::squad {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string path_join(const std::string& base, const std::string& key) {
  return base + "/" + key;
}

const ordered_json& require_field(const ordered_json& obj, const char* key,
                                  const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("missing required field at " + path_join(path, key));
  }
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key,
                           const std::string& path) {
  const auto& v = require_field(obj, key, path);
  if (!v.is_string()) {
    throw SchemaError("expected string at " + path_join(path, key));
  }
  return v.get<std::string>();
}

std::vector<AnswerSpan> parse_answers(const ordered_json& arr, const std::string& path) {
  if (!arr.is_array()) {
    throw SchemaError("expected array at " + path);
  }
  std::vector<AnswerSpan> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& a = arr[i];
    const std::string apath = path + "/" + std::to_string(i);
    AnswerSpan span;
    span.text = require_string(a, "text", apath);
    const auto& start = require_field(a, "answer_start", apath);
    if (!start.is_number_integer() || start.get<std::int64_t>() < 0) {
      throw SchemaError("expected non-negative integer at " + path_join(apath, "answer_start"));
    }
    span.answer_start = start.get<std::size_t>();
    out.push_back(std::move(span));
  }
  return out;
}

ordered_json answers_to_json(const std::vector<AnswerSpan>& answers) {
  ordered_json arr = ordered_json::array();
  for (const auto& a : answers) {
    arr.push_back({{"text", a.text}, {"answer_start", a.answer_start}});
  }
  return arr;
}

}  // namespace

Dataset parse_dataset(const std::string& bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("expected object at /");
  }

  Dataset d;
  if (auto it = doc.find("version"); it != doc.end() && it->is_string()) {
    d.version = it->get<std::string>();
  }
  const auto& data = require_field(doc, "data", "");
  if (!data.is_array()) {
    throw SchemaError("expected array at /data");
  }

  std::unordered_set<std::string> seen_ids;
  for (std::size_t ai = 0; ai < data.size(); ++ai) {
    const std::string apath = "/data/" + std::to_string(ai);
    const auto& ja = data[ai];
    Article article;
    article.title = require_string(ja, "title", apath);
    const auto& paragraphs = require_field(ja, "paragraphs", apath);
    if (!paragraphs.is_array()) {
      throw SchemaError("expected array at " + path_join(apath, "paragraphs"));
    }
    for (std::size_t pi = 0; pi < paragraphs.size(); ++pi) {
      const std::string ppath = apath + "/paragraphs/" + std::to_string(pi);
      const auto& jp = paragraphs[pi];
      Paragraph paragraph;
      paragraph.context = require_string(jp, "context", ppath);
      const auto& qas = require_field(jp, "qas", ppath);
      if (!qas.is_array()) {
        throw SchemaError("expected array at " + path_join(ppath, "qas"));
      }
      for (std::size_t qi = 0; qi < qas.size(); ++qi) {
        const std::string qpath = ppath + "/qas/" + std::to_string(qi);
        const auto& jq = qas[qi];
        QuestionAnswer qa;
        qa.id = require_string(jq, "id", qpath);
        qa.question = require_string(jq, "question", qpath);
        qa.answers = parse_answers(require_field(jq, "answers", qpath),
                                   path_join(qpath, "answers"));
        if (auto it = jq.find("is_impossible"); it != jq.end() && it->is_boolean()) {
          qa.is_impossible = it->get<bool>();
        }
        if (auto it = jq.find("plausible_answers"); it != jq.end() && it->is_array()) {
          qa.plausible_answers =
              parse_answers(*it, path_join(qpath, "plausible_answers"));
        }
        if (!seen_ids.insert(qa.id).second) {
          throw IntegrityError("duplicate qa id \"" + qa.id + "\" at " + qpath);
        }
        paragraph.qas.push_back(std::move(qa));
      }
      article.paragraphs.push_back(std::move(paragraph));
    }
    d.articles.push_back(std::move(article));
  }
  return d;
}

std::string serialize_dataset(const Dataset& d, const std::string& version) {
  if (version == "1.1") {
    std::string offenders;
    for (const auto& article : d.articles) {
      for (const auto& paragraph : article.paragraphs) {
        for (const auto& qa : paragraph.qas) {
          if (qa.is_impossible) {
            if (!offenders.empty()) offenders += ", ";
            offenders += qa.id;
          }
        }
      }
    }
    if (!offenders.empty()) {
      throw ConversionError("cannot serialize as 1.1, unanswerable questions present: " +
                            offenders);
    }
  }

  ordered_json doc;
  doc["version"] = version;
  ordered_json data = ordered_json::array();
  for (const auto& article : d.articles) {
    ordered_json ja;
    ja["title"] = article.title;
    ordered_json jps = ordered_json::array();
    for (const auto& paragraph : article.paragraphs) {
      ordered_json jp;
      jp["context"] = paragraph.context;
      ordered_json jqs = ordered_json::array();
      for (const auto& qa : paragraph.qas) {
        ordered_json jq;
        jq["id"] = qa.id;
        jq["question"] = qa.question;
        jq["answers"] = answers_to_json(qa.answers);
        if (version == "2.0") {
          jq["is_impossible"] = qa.is_impossible;
          if (qa.plausible_answers) {
            jq["plausible_answers"] = answers_to_json(*qa.plausible_answers);
          }
        }
        jqs.push_back(std::move(jq));
      }
      jp["qas"] = std::move(jqs);
      jps.push_back(std::move(jp));
    }
    ja["paragraphs"] = std::move(jps);
    data.push_back(std::move(ja));
  }
  doc["data"] = std::move(data);
  return doc.dump(2) + "\n";
}

Dataset convert_v11_to_v20(const Dataset& d, bool* warned) {
  if (warned) *warned = false;
  if (d.version == "2.0") {
    if (warned) *warned = true;
    return d;
  }
  Dataset out = d;
  out.version = "2.0";
  for (auto& article : out.articles) {
    for (auto& paragraph : article.paragraphs) {
      for (auto& qa : paragraph.qas) {
        qa.is_impossible = false;
      }
    }
  }
  return out;
}

std::vector<Violation> validate(const Dataset& d) {
  std::vector<Violation> out;
  std::unordered_map<std::string, std::string> first_seen;  // id -> path

  for (std::size_t ai = 0; ai < d.articles.size(); ++ai) {
    const auto& article = d.articles[ai];
    const std::string apath = "/data/" + std::to_string(ai);
    if (article.title.empty()) {
      out.push_back({apath, "empty-title", "article title must be non-empty"});
    }
    if (article.paragraphs.empty()) {
      out.push_back({apath, "empty-paragraphs", "article has no paragraphs"});
    }
    for (std::size_t pi = 0; pi < article.paragraphs.size(); ++pi) {
      const auto& paragraph = article.paragraphs[pi];
      const std::string ppath = apath + "/paragraphs/" + std::to_string(pi);
      if (paragraph.context.empty()) {
        out.push_back({ppath, "empty-context", "paragraph context must be non-empty"});
      }
      for (std::size_t qi = 0; qi < paragraph.qas.size(); ++qi) {
        const auto& qa = paragraph.qas[qi];
        const std::string qpath = ppath + "/qas/" + std::to_string(qi);
        auto [it, inserted] = first_seen.emplace(qa.id, qpath);
        if (!inserted) {
          out.push_back({qpath, "duplicate-id",
                         "id \"" + qa.id + "\" already used at " + it->second});
        }
        if (qa.is_impossible && !qa.answers.empty()) {
          out.push_back({qpath, "impossible-with-answers",
                         "is_impossible is true but answers are present"});
        }
        if (!qa.is_impossible && qa.answers.empty()) {
          out.push_back({qpath, "answerable-without-answers",
                         "is_impossible is false but answers are empty"});
        }
        if (d.version == "1.1" && qa.is_impossible) {
          out.push_back({qpath, "version-flag-conflict",
                         "version 1.1 dataset carries an impossible question"});
        }
        for (std::size_t si = 0; si < qa.answers.size(); ++si) {
          const auto& span = qa.answers[si];
          const std::string spath = qpath + "/answers/" + std::to_string(si);
          const bool in_range =
              span.answer_start + span.text.size() <= paragraph.context.size();
          if (!in_range ||
              paragraph.context.compare(span.answer_start, span.text.size(),
                                        span.text) != 0) {
            out.push_back({spath, "span-misalignment",
                           "context at offset " + std::to_string(span.answer_start) +
                               " does not equal \"" + span.text + "\""});
          }
        }
      }
    }
  }
  return out;
}

DatasetStats compute_stats(const Dataset& d) {
  DatasetStats s;
  s.article_count = d.articles.size();
  for (const auto& article : d.articles) {
    s.paragraph_count += article.paragraphs.size();
    for (const auto& paragraph : article.paragraphs) {
      for (const auto& qa : paragraph.qas) {
        ++s.question_count;
        if (qa.is_impossible) {
          ++s.unanswerable_count;
        } else {
          ++s.answerable_count;
        }
      }
    }
  }
  s.unanswerable_ratio =
      s.question_count == 0
          ? 0.0
          : static_cast<double>(s.unanswerable_count) / static_cast<double>(s.question_count);
  return s;
}

std::vector<std::string> all_ids(const Dataset& d) {
  std::vector<std::string> ids;
  for (const auto& article : d.articles) {
    for (const auto& paragraph : article.paragraphs) {
      for (const auto& qa : paragraph.qas) {
        ids.push_back(qa.id);
      }
    }
  }
  return ids;
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// "= Title =" or "= Title"; the marker is the leading "= ".
std::string title_of(const std::string& line) {
  std::string t = trim(line.substr(2));
  while (!t.empty() && (t.back() == '=' || std::isspace(static_cast<unsigned char>(t.back())))) {
    t.pop_back();
  }
  return t;
}

std::string truncate_paragraph(const std::string& text, std::vector<std::string>& warnings,
                               const std::string& title) {
  if (text.size() <= kMaxParagraphChars) return text;
  std::size_t cut = 0;
  for (std::size_t i = 0; i + 1 < kMaxParagraphChars && i + 1 < text.size(); ++i) {
    if ((text[i] == '.' || text[i] == '?' || text[i] == '!') &&
        std::isspace(static_cast<unsigned char>(text[i + 1]))) {
      cut = i + 1;
    }
  }
  if (cut == 0) cut = kMaxParagraphChars;  // no sentence boundary: hard cut
  warnings.push_back("article \"" + title + "\": paragraph truncated from " +
                     std::to_string(text.size()) + " to " + std::to_string(cut) + " chars");
  return trim(text.substr(0, cut));
}

}  // namespace

CorpusParseResult parse_corpus(const std::string& text) {
  CorpusParseResult result;
  Article current;
  bool in_article = false;
  std::string block;

  auto flush_block = [&] {
    std::string t = trim(block);
    block.clear();
    if (t.empty() || !in_article) return;
    current.paragraphs.push_back(
        {truncate_paragraph(t, result.warnings, current.title), {}});
  };
  auto flush_article = [&] {
    flush_block();
    if (!in_article) return;
    if (current.paragraphs.empty()) {
      result.warnings.push_back("article \"" + current.title + "\" has no paragraphs, skipped");
    } else {
      result.articles.push_back(std::move(current));
    }
    current = {};
    in_article = false;
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("= ", 0) == 0) {
      flush_article();
      current.title = title_of(line);
      in_article = true;
    } else if (is_blank(line)) {
      flush_block();
    } else {
      if (!block.empty()) block += ' ';
      block += trim(line);
    }
  }
  flush_article();
  return result;
}

std::string violations_to_ndjson(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    ordered_json j{{"path", v.path}, {"kind", v.kind}, {"detail", v.detail}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string stats_to_json(const DatasetStats& s) {
  ordered_json j{{"article_count", s.article_count},
                 {"paragraph_count", s.paragraph_count},
                 {"question_count", s.question_count},
                 {"answerable_count", s.answerable_count},
                 {"unanswerable_count", s.unanswerable_count},
                 {"unanswerable_ratio", s.unanswerable_ratio}};
  return j.dump(2) + "\n";
}

}  // namespace eqa::squad
