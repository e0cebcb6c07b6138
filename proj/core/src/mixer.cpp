#include "eqa/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "eqa/errors.hpp"
#include "json.hpp"

namespace eqa::mix {

std::size_t Take::resolve(std::size_t population) const {
  std::size_t k;
  if (is_fraction) {
    if (!(fraction > 0.0) || fraction > 1.0) {
      throw RangeError("take fraction must be in (0, 1]");
    }
    k = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(population)));
  } else {
    if (count == 0) throw RangeError("take count must be positive");
    k = count;
  }
  if (k > population) {
    throw RangeError("take " + std::to_string(k) + " exceeds population of " +
                     std::to_string(population));
  }
  return k;
}

namespace {

// Partial Fisher-Yates over question slots: consecutive groups of the
// requested sizes get disjoint uniform samples; everything after them is the
// complement. Group membership per global question index, or SIZE_MAX.
std::vector<std::size_t> assign_groups(std::size_t population,
                                       const std::vector<std::size_t>& group_sizes,
                                       Rng& rng) {
  std::size_t total = 0;
  for (std::size_t g : group_sizes) total += g;
  if (total > population) {
    throw RangeError("sample sizes exceed population");
  }
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t j = i + bounded(rng, population - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::size_t> assignment(population, SIZE_MAX);
  std::size_t cursor = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    for (std::size_t n = 0; n < group_sizes[g]; ++n) {
      assignment[idx[cursor++]] = g;
    }
  }
  return assignment;
}

// Keep the questions whose global index satisfies `keep`; prune paragraphs
// and articles left with no questions. Document order is preserved.
squad::Dataset filter_questions(const squad::Dataset& d,
                                const std::function<bool(std::size_t)>& keep) {
  squad::Dataset out;
  out.version = d.version;
  std::size_t global = 0;
  for (const auto& article : d.articles) {
    squad::Article a{article.title, {}};
    for (const auto& paragraph : article.paragraphs) {
      squad::Paragraph p{paragraph.context, {}};
      for (const auto& qa : paragraph.qas) {
        if (keep(global)) p.qas.push_back(qa);
        ++global;
      }
      if (!p.qas.empty()) a.paragraphs.push_back(std::move(p));
    }
    if (!a.paragraphs.empty()) out.articles.push_back(std::move(a));
  }
  return out;
}

}  // namespace

squad::Dataset sample_dataset(const squad::Dataset& d, const Take& take, Rng& rng) {
  const std::size_t population = squad::compute_stats(d).question_count;
  const std::size_t k = take.resolve(population);
  const auto groups = assign_groups(population, {k}, rng);
  return filter_questions(d, [&](std::size_t i) { return groups[i] == 0; });
}

squad::Dataset merge(const std::vector<std::pair<squad::Dataset, std::string>>& parts) {
  for (const auto& [part, tag] : parts) {
    if (part.version != "2.0") {
      throw ConversionError("merge requires version 2.0 parts, got \"" + part.version +
                            "\" (tag " + tag + ")");
    }
  }
  squad::Dataset out;
  out.version = "2.0";
  std::unordered_set<std::string> seen;
  for (const auto& [part, tag] : parts) {
    for (const auto& article : part.articles) {
      squad::Article a = article;
      for (auto& paragraph : a.paragraphs) {
        for (auto& qa : paragraph.qas) {
          if (!seen.insert(qa.id).second) {
            std::string renamed = tag + qa.id;
            std::size_t n = 1;
            while (!seen.insert(renamed).second) {
              renamed = tag + qa.id + "#" + std::to_string(n++);
            }
            qa.id = renamed;
          }
        }
      }
      out.articles.push_back(std::move(a));
    }
  }
  return out;
}

std::pair<squad::Dataset, squad::Dataset> split_heldout(const squad::Dataset& d,
                                                        std::size_t take, Rng& rng) {
  const std::size_t population = squad::compute_stats(d).question_count;
  if (take == 0) throw RangeError("heldout take must be positive");
  if (take >= population) {
    throw RangeError("heldout take " + std::to_string(take) +
                     " must be smaller than the population of " +
                     std::to_string(population));
  }
  const auto groups = assign_groups(population, {take}, rng);
  auto heldout = filter_questions(d, [&](std::size_t i) { return groups[i] == 0; });
  auto train = filter_questions(d, [&](std::size_t i) { return groups[i] != 0; });
  return {std::move(train), std::move(heldout)};
}

BuildResult build_experiment(const ExperimentManifest& m, const DatasetLoader& load) {
  if (m.sources.empty()) throw RangeError("manifest has no sources");
  Rng rng(m.seed);

  BuildResult result;
  result.report.name = m.name;

  std::vector<std::pair<squad::Dataset, std::string>> parts;
  for (std::size_t si = 0; si < m.sources.size(); ++si) {
    const auto& source = m.sources[si];
    const squad::Dataset full = load(source.path);
    const std::size_t population = squad::compute_stats(full).question_count;
    const std::size_t k = source.take.resolve(population);

    squad::Dataset sampled;
    if (si == 0 && m.heldout_take) {
      const auto groups = assign_groups(population, {k, *m.heldout_take}, rng);
      sampled = filter_questions(full, [&](std::size_t i) { return groups[i] == 0; });
      result.heldout =
          filter_questions(full, [&](std::size_t i) { return groups[i] == 1; });
    } else {
      const auto groups = assign_groups(population, {k}, rng);
      sampled = filter_questions(full, [&](std::size_t i) { return groups[i] == 0; });
    }
    result.report.per_source.push_back({source.path, source.tag, k});
    parts.emplace_back(std::move(sampled), source.tag);
  }

  result.train = merge(parts);
  const auto stats = squad::compute_stats(result.train);
  result.report.total = stats.question_count;
  result.report.unanswerable_ratio = stats.unanswerable_ratio;
  result.report.heldout = m.heldout_take;
  return result;
}

ExperimentManifest parse_manifest(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed manifest JSON at byte " + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object()) throw SchemaError("manifest must be a JSON object");

  ExperimentManifest m;
  m.name = doc.value("name", "");
  if (doc.contains("seed")) m.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("sources") || !doc["sources"].is_array()) {
    throw SchemaError("missing required field at /sources");
  }
  std::size_t si = 0;
  for (const auto& js : doc["sources"]) {
    ManifestSource s;
    if (!js.contains("path")) {
      throw SchemaError("missing required field at /sources/" + std::to_string(si) + "/path");
    }
    s.path = js["path"].get<std::string>();
    if (!js.contains("take")) {
      throw SchemaError("missing required field at /sources/" + std::to_string(si) + "/take");
    }
    const auto& take = js["take"];
    if (take.is_number_float()) {
      // a float take is a fraction of the source; an integer is a count
      s.take = Take::of_fraction(take.get<double>());
    } else {
      s.take = Take::of_count(take.get<std::size_t>());
    }
    s.tag = js.value("tag", "src" + std::to_string(si) + ":");
    m.sources.push_back(std::move(s));
    ++si;
  }
  if (doc.contains("heldout_take")) {
    m.heldout_take = doc["heldout_take"].get<std::size_t>();
  }
  return m;
}

std::string mix_report_to_json(const MixReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["per_source"] = nlohmann::ordered_json::array();
  for (const auto& s : r.per_source) {
    j["per_source"].push_back({{"path", s.path}, {"tag", s.tag}, {"taken", s.taken}});
  }
  j["total"] = r.total;
  j["unanswerable_ratio"] = r.unanswerable_ratio;
  if (r.heldout) j["heldout"] = *r.heldout;
  return j.dump(2) + "\n";
}

}  // namespace eqa::mix
