#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqa/rng.hpp"
#include "eqa/squad.hpp"

namespace eqa::mix {

// Count or fraction of the question population.
struct Take {
  bool is_fraction = false;
  std::size_t count = 0;
  double fraction = 0.0;

  static Take of_count(std::size_t n) { return {false, n, 0.0}; }
  static Take of_fraction(double f) { return {true, 0, f}; }

  std::size_t resolve(std::size_t population) const;
};

struct ManifestSource {
  std::string path;
  Take take;
  std::string tag;  // collision prefix, e.g. "sq:", "ans:", "un:"
};

struct ExperimentManifest {
  std::string name;
  std::uint64_t seed = 20200;
  std::vector<ManifestSource> sources;
  std::optional<std::size_t> heldout_take;  // drawn from source 0's remainder
};

struct SourceReport {
  std::string path;
  std::string tag;
  std::size_t taken = 0;
};

struct MixReport {
  std::string name;
  std::vector<SourceReport> per_source;
  std::size_t total = 0;
  double unanswerable_ratio = 0.0;
  std::optional<std::size_t> heldout = 0;
};

/// Uniform question-level sample without replacement; empty paragraphs and
/// articles are pruned; survivor order is document order. Throws RangeError
/// when the resolved count exceeds the population.
squad::Dataset sample_dataset(const squad::Dataset& d, const Take& take, Rng& rng);

/// Concatenate parts; a qa id already seen in an earlier part is prefixed
/// with the part's tag. All parts must be version 2.0.
squad::Dataset merge(const std::vector<std::pair<squad::Dataset, std::string>>& parts);

/// Disjoint partition: heldout gets exactly `take` questions, train the rest.
/// Requires 0 < take < question count.
std::pair<squad::Dataset, squad::Dataset> split_heldout(const squad::Dataset& d,
                                                        std::size_t take, Rng& rng);

struct BuildResult {
  squad::Dataset train;
  std::optional<squad::Dataset> heldout;
  MixReport report;
};

using DatasetLoader = std::function<squad::Dataset(const std::string& path)>;

/// sample_dataset per source, then merge; heldout_take (when present) is
/// sampled from source 0's questions left out of its own sample, so train and
/// heldout are disjoint by construction.
BuildResult build_experiment(const ExperimentManifest& m, const DatasetLoader& load);

ExperimentManifest parse_manifest(const std::string& bytes);
std::string mix_report_to_json(const MixReport& r);

}  // namespace eqa::mix
