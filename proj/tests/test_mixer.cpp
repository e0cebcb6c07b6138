#include "eqa/mixer.hpp"

#include <map>
#include <set>

#include "doctest.h"
#include "eqa/errors.hpp"
#include "testutil.hpp"

using namespace eqa;
using namespace eqa::mix;

namespace {

// dataset with n answerable single-answer questions spread over articles
squad::Dataset flat_dataset(std::size_t n, const std::string& prefix) {
  squad::Dataset d;
  d.version = "2.0";
  const std::size_t per_article = 50;
  for (std::size_t i = 0; i < n; i += per_article) {
    squad::Article a{prefix + " article " + std::to_string(i / per_article), {}};
    squad::Paragraph p{"word one two three.", {}};
    for (std::size_t q = i; q < std::min(n, i + per_article); ++q) {
      p.qas.push_back({prefix + "-" + std::to_string(q), "what ?", {{"word", 0}}, false, {}});
    }
    a.paragraphs.push_back(std::move(p));
    d.articles.push_back(std::move(a));
  }
  return d;
}

}  // namespace

TEST_CASE("sample_dataset") {
  const auto d = flat_dataset(100, "s");
  DOCTEST_SUBCASE("take everything is identity up to pruning") {
    Rng rng(1);
    const auto out = sample_dataset(d, Take::of_count(100), rng);
    CHECK(squad::compute_stats(out).question_count == 100);
    CHECK(out == d);  // nothing to prune here
  }
  DOCTEST_SUBCASE("exact count and no duplicates") {
    Rng rng(2);
    const auto out = sample_dataset(d, Take::of_count(37), rng);
    const auto ids = squad::all_ids(out);
    CHECK(ids.size() == 37);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 37);
  }
  DOCTEST_SUBCASE("fractions resolve by rounding") {
    Rng rng(3);
    const auto out = sample_dataset(d, Take::of_fraction(0.2), rng);
    CHECK(squad::compute_stats(out).question_count == 20);
  }
  DOCTEST_SUBCASE("survivor order is document order") {
    Rng rng(4);
    const auto out = sample_dataset(d, Take::of_count(30), rng);
    const auto ids = squad::all_ids(out);
    std::vector<int> nums;
    for (const auto& id : ids) nums.push_back(std::stoi(id.substr(2)));
    CHECK(std::is_sorted(nums.begin(), nums.end()));
  }
  DOCTEST_SUBCASE("over-large take is a range error") {
    Rng rng(5);
    CHECK_THROWS_AS(sample_dataset(d, Take::of_count(101), rng), RangeError);
    CHECK_THROWS_AS(sample_dataset(d, Take::of_fraction(1.5), rng), RangeError);
  }
  DOCTEST_SUBCASE("take 1 of 2 is a fair coin") {
    const auto two = flat_dataset(2, "c");
    int first = 0;
    const int runs = 10000;
    for (int i = 0; i < runs; ++i) {
      Rng rng(derive_subseed(13, static_cast<std::uint64_t>(i)));
      const auto out = sample_dataset(two, Take::of_count(1), rng);
      if (squad::all_ids(out)[0] == "c-0") ++first;
    }
    CHECK(static_cast<double>(first) / runs == doctest::Approx(0.5).epsilon(0.04));
  }
  DOCTEST_SUBCASE("deterministic under seed") {
    Rng a(9), b(9);
    CHECK(sample_dataset(d, Take::of_count(10), a) ==
          sample_dataset(d, Take::of_count(10), b));
  }
}

TEST_CASE("merge") {
  DOCTEST_SUBCASE("additivity on disjoint parts") {
    const auto out = merge({{flat_dataset(3, "x"), "x:"}, {flat_dataset(2, "y"), "y:"}});
    CHECK(squad::compute_stats(out).question_count == 5);
    CHECK(squad::validate(out).empty());
  }
  DOCTEST_SUBCASE("colliding ids are retained under prefixed ids") {
    const auto out = merge({{flat_dataset(2, "x"), "a:"}, {flat_dataset(3, "x"), "b:"}});
    const auto ids = squad::all_ids(out);
    CHECK(ids.size() == 5);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 5);
    CHECK(std::count(ids.begin(), ids.end(), "b:x-0") == 1);
  }
  DOCTEST_SUBCASE("mixed versions are rejected") {
    auto v11 = flat_dataset(2, "v");
    v11.version = "1.1";
    CHECK_THROWS_AS(merge({{flat_dataset(2, "x"), "x:"}, {v11, "v:"}}), ConversionError);
  }
  DOCTEST_SUBCASE("id multiset preserved up to prefixing") {
    Rng rng(21);
    const auto a = testutil::random_dataset(rng);
    const auto b = testutil::random_dataset(rng);
    const auto out = merge({{a, "a:"}, {b, "b:"}});
    const auto in_count = squad::all_ids(a).size() + squad::all_ids(b).size();
    CHECK(squad::all_ids(out).size() == in_count);
  }
}

TEST_CASE("split_heldout") {
  const auto d = flat_dataset(50, "h");
  DOCTEST_SUBCASE("disjoint partition with exact counts") {
    Rng rng(6);
    const auto [train, heldout] = split_heldout(d, 12, rng);
    CHECK(squad::compute_stats(heldout).question_count == 12);
    CHECK(squad::compute_stats(train).question_count == 38);
    const auto train_ids = squad::all_ids(train);
    const auto held_ids = squad::all_ids(heldout);
    std::set<std::string> all(train_ids.begin(), train_ids.end());
    all.insert(held_ids.begin(), held_ids.end());
    CHECK(all.size() == 50);  // union is the input, intersection empty
    const auto input_ids = squad::all_ids(d);
    CHECK(all == std::set<std::string>(input_ids.begin(), input_ids.end()));
  }
  DOCTEST_SUBCASE("range errors") {
    Rng rng(7);
    CHECK_THROWS_AS(split_heldout(d, 0, rng), RangeError);
    CHECK_THROWS_AS(split_heldout(d, 50, rng), RangeError);
  }
  DOCTEST_SUBCASE("partition property on random datasets") {
    Rng rng(8);
    for (int i = 0; i < 20; ++i) {
      const auto rd = testutil::random_dataset(rng);
      const auto n = squad::all_ids(rd).size();
      if (n < 2) continue;
      const std::size_t take = 1 + bounded(rng, n - 1);
      const auto [train, heldout] = split_heldout(rd, take, rng);
      const auto ti = squad::all_ids(train);
      const auto hi = squad::all_ids(heldout);
      CHECK(hi.size() == take);
      std::set<std::string> u(ti.begin(), ti.end());
      for (const auto& id : hi) CHECK(u.insert(id).second);
      const auto in = squad::all_ids(rd);
      CHECK(u == std::set<std::string>(in.begin(), in.end()));
    }
  }
}

TEST_CASE("parse_manifest") {
  const std::string doc = R"({
    "name": "exp", "seed": 5,
    "sources": [
      {"path": "a.json", "take": 10, "tag": "sq:"},
      {"path": "b.json", "take": 0.5}
    ],
    "heldout_take": 3
  })";
  const auto m = parse_manifest(doc);
  CHECK(m.name == "exp");
  CHECK(m.seed == 5);
  REQUIRE(m.sources.size() == 2);
  CHECK(m.sources[0].take.is_fraction == false);
  CHECK(m.sources[0].take.count == 10);
  CHECK(m.sources[0].tag == "sq:");
  CHECK(m.sources[1].take.is_fraction == true);
  CHECK(m.sources[1].take.fraction == doctest::Approx(0.5));
  CHECK(m.sources[1].tag == "src1:");
  REQUIRE(m.heldout_take.has_value());
  CHECK(*m.heldout_take == 3);
  CHECK_THROWS_AS(parse_manifest(R"({"name": "x"})"), SchemaError);
  CHECK_THROWS_AS(parse_manifest("{"), ParseError);
}

TEST_CASE("build_experiment") {
  std::map<std::string, squad::Dataset> store = {
      {"squad.json", flat_dataset(40, "sq")},
      {"ans.json", flat_dataset(60, "an")},
  };
  const DatasetLoader load = [&](const std::string& path) {
    auto it = store.find(path);
    if (it == store.end()) throw IoError("cannot open " + path);
    return it->second;
  };

  ExperimentManifest m;
  m.name = "desk";
  m.seed = 31;
  m.sources = {{"squad.json", Take::of_count(20), "sq:"},
               {"ans.json", Take::of_fraction(0.5), "ans:"}};
  m.heldout_take = 5;

  DOCTEST_SUBCASE("counts and disjoint heldout") {
    const auto result = build_experiment(m, load);
    CHECK(result.report.per_source[0].taken == 20);
    CHECK(result.report.per_source[1].taken == 30);
    CHECK(result.report.total == 50);
    REQUIRE(result.heldout.has_value());
    CHECK(squad::compute_stats(*result.heldout).question_count == 5);
    const auto train_ids = squad::all_ids(result.train);
    const std::set<std::string> train_set(train_ids.begin(), train_ids.end());
    for (const auto& id : squad::all_ids(*result.heldout)) {
      CHECK(train_set.count(id) == 0);
    }
  }
  DOCTEST_SUBCASE("pure function of manifest and sources") {
    const auto a = build_experiment(m, load);
    const auto b = build_experiment(m, load);
    CHECK(a.train == b.train);
    CHECK(*a.heldout == *b.heldout);
  }
  DOCTEST_SUBCASE("single source taking all is an identity merge") {
    ExperimentManifest all;
    all.name = "all";
    all.sources = {{"squad.json", Take::of_count(40), "sq:"}};
    const auto result = build_experiment(all, load);
    CHECK(result.train == store["squad.json"]);
    CHECK(!result.heldout.has_value());
  }
  DOCTEST_SUBCASE("missing source and short population are descriptive errors") {
    ExperimentManifest bad = m;
    bad.sources[0].path = "nope.json";
    CHECK_THROWS_AS(build_experiment(bad, load), IoError);
    ExperimentManifest big = m;
    big.sources[0].take = Take::of_count(1000);
    CHECK_THROWS_AS(build_experiment(big, load), RangeError);
  }
}
