// eqa: synthesize, mix and score extractive-QA datasets.
//
// Subcommands: generate-ans, generate-unans, convert, mix, evaluate, stats.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "eqa/cloze.hpp"
#include "eqa/errors.hpp"
#include "eqa/eval.hpp"
#include "eqa/mixer.hpp"
#include "eqa/squad.hpp"
#include "eqa/unans.hpp"
#include "json.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20200;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw eqa::IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw eqa::IoError("cannot write " + path);
  out << content;
}

// "-" or empty means stdout
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file(path, content);
  }
}

struct Logger {
  bool quiet = false;
  bool json = false;

  void info(const std::string& event, const nlohmann::ordered_json& fields) const {
    if (quiet) return;
    if (json) {
      nlohmann::ordered_json j = fields;
      j["event"] = event;
      std::cerr << j.dump() << "\n";
    } else {
      std::cerr << event;
      for (auto it = fields.begin(); it != fields.end(); ++it) {
        std::cerr << " " << it.key() << "=" << it.value().dump();
      }
      std::cerr << "\n";
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extractive-QA synthetic data toolkit"};
  app.require_subcommand(1);
  // let global flags (--seed, --out, ...) appear after the subcommand name
  app.fallthrough();

  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string report_path;
  std::string config_path;
  bool quiet = false;
  bool log_json = false;
  app.add_option("--seed", seed, "Master RNG seed")->capture_default_str();
  app.add_option("--out", out_path, "Output file (default: stdout)");
  app.add_option("--report", report_path, "Report file (default: stderr note only)");
  app.add_option("--config", config_path, "JSON config file; flags take precedence");
  app.add_flag("--quiet", quiet, "Suppress diagnostics");
  app.add_flag("--log-json", log_json, "Line-delimited JSON logs on stderr");

  std::size_t max_per_paragraph = 3;
  int jobs = 1;
  bool no_strict = false;

  auto* gen_ans = app.add_subcommand("generate-ans", "Generate answerable questions from a corpus");
  std::string gen_ans_corpus;
  gen_ans->add_option("corpus", gen_ans_corpus, "Plain-text corpus file")->required();
  gen_ans->add_option("--max-per-paragraph", max_per_paragraph, "Question cap per paragraph")
      ->capture_default_str();
  gen_ans->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  auto* gen_unans =
      app.add_subcommand("generate-unans", "Generate unanswerable questions from a corpus");
  std::string gen_unans_corpus;
  gen_unans->add_option("corpus", gen_unans_corpus, "Plain-text corpus file")->required();
  gen_unans->add_option("--max-per-paragraph", max_per_paragraph, "Question cap per paragraph")
      ->capture_default_str();
  gen_unans->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  gen_unans->add_flag("--no-strict", no_strict,
                      "Keep shuffled questions whose answer occurs in the target context");

  auto* convert = app.add_subcommand("convert", "Convert a dataset between 1.1 and 2.0");
  std::string convert_input, convert_to = "2.0";
  convert->add_option("input", convert_input, "SQuAD JSON file")->required();
  convert->add_option("--to", convert_to, "Target version")->capture_default_str();

  auto* mix = app.add_subcommand("mix", "Assemble a dataset from an experiment manifest");
  std::string mix_manifest, heldout_path;
  mix->add_option("manifest", mix_manifest, "Manifest JSON file")->required();
  mix->add_option("--heldout-out", heldout_path, "Held-out split output file");

  auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file against gold");
  std::string eval_gold, eval_preds;
  evaluate->add_option("gold", eval_gold, "Gold SQuAD 2.0 JSON file")->required();
  evaluate->add_option("predictions", eval_preds, "Predictions JSON {id: answer}")->required();

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  std::string stats_input;
  stats->add_option("dataset", stats_input, "SQuAD JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_path.empty()) {
      const auto config = nlohmann::json::parse(read_file(config_path));
      if (config.contains("seed") && app.count("--seed") == 0) {
        seed = config["seed"].get<std::uint64_t>();
      }
      if (config.contains("quiet") && app.count("--quiet") == 0) {
        quiet = config["quiet"].get<bool>();
      }
      if (config.contains("log_json") && app.count("--log-json") == 0) {
        log_json = config["log_json"].get<bool>();
      }
      if (config.contains("max_questions_per_paragraph")) {
        const auto* sub = app.get_subcommands().front();
        if (sub->count("--max-per-paragraph") == 0) {
          max_per_paragraph = config["max_questions_per_paragraph"].get<std::size_t>();
        }
      }
      if (config.contains("jobs")) {
        const auto* sub = app.get_subcommands().front();
        if (sub->get_option_no_throw("--jobs") != nullptr && sub->count("--jobs") == 0) {
          jobs = config["jobs"].get<int>();
        }
      }
    }

    Logger log{quiet, log_json};
    eqa::cloze::GenerationConfig cfg;
    cfg.rng_seed = seed;
    cfg.max_questions_per_paragraph = max_per_paragraph;
    cfg.strict_unanswerable = !no_strict;

    if (gen_ans->parsed()) {
      log.info("generate-ans", {{"corpus", gen_ans_corpus},
                                {"seed", seed},
                                {"max_per_paragraph", max_per_paragraph},
                                {"jobs", jobs},
                                {"out", out_path}});
      const auto corpus = eqa::squad::parse_corpus(read_file(gen_ans_corpus));
      for (const auto& w : corpus.warnings) log.info("corpus-warning", {{"detail", w}});
      std::vector<eqa::cloze::ArticleGenReport> reports;
      const auto d = eqa::cloze::generate_answerable_dataset(corpus.articles, cfg, jobs, &reports);
      emit(out_path, eqa::squad::serialize_dataset(d, "2.0"));
      if (!report_path.empty()) {
        write_file(report_path, eqa::cloze::gen_reports_to_ndjson(reports));
      }
      const auto s = eqa::squad::compute_stats(d);
      log.info("done", {{"articles", s.article_count}, {"questions", s.question_count}});
    } else if (gen_unans->parsed()) {
      log.info("generate-unans", {{"corpus", gen_unans_corpus},
                                  {"seed", seed},
                                  {"max_per_paragraph", max_per_paragraph},
                                  {"strict", cfg.strict_unanswerable},
                                  {"jobs", jobs},
                                  {"out", out_path}});
      const auto corpus = eqa::squad::parse_corpus(read_file(gen_unans_corpus));
      for (const auto& w : corpus.warnings) log.info("corpus-warning", {{"detail", w}});
      std::vector<eqa::unans::UnansArticleReport> reports;
      const auto d =
          eqa::unans::generate_unanswerable_dataset(corpus.articles, cfg, jobs, &reports);
      emit(out_path, eqa::squad::serialize_dataset(d, "2.0"));
      if (!report_path.empty()) {
        write_file(report_path, eqa::unans::unans_reports_to_ndjson(reports));
      }
      const auto s = eqa::squad::compute_stats(d);
      log.info("done", {{"articles", s.article_count}, {"questions", s.question_count}});
    } else if (convert->parsed()) {
      log.info("convert", {{"input", convert_input}, {"to", convert_to}});
      auto d = eqa::squad::parse_dataset(read_file(convert_input));
      if (convert_to == "2.0") {
        bool warned = false;
        d = eqa::squad::convert_v11_to_v20(d, &warned);
        if (warned) log.info("warning", {{"detail", "input is already version 2.0"}});
      } else if (convert_to != "1.1") {
        throw eqa::ConversionError("unknown target version \"" + convert_to + "\"");
      }
      emit(out_path, eqa::squad::serialize_dataset(d, convert_to));
    } else if (mix->parsed()) {
      log.info("mix", {{"manifest", mix_manifest}, {"out", out_path}});
      const auto manifest = eqa::mix::parse_manifest(read_file(mix_manifest));
      const auto result = eqa::mix::build_experiment(
          manifest, [](const std::string& path) {
            return eqa::squad::parse_dataset(read_file(path));
          });
      emit(out_path, eqa::squad::serialize_dataset(result.train, "2.0"));
      if (result.heldout) {
        if (heldout_path.empty()) {
          throw eqa::IoError("manifest requests a held-out split; pass --heldout-out");
        }
        write_file(heldout_path, eqa::squad::serialize_dataset(*result.heldout, "2.0"));
      }
      const std::string report = eqa::mix::mix_report_to_json(result.report);
      if (report_path.empty()) {
        std::cerr << report;
      } else {
        write_file(report_path, report);
      }
    } else if (evaluate->parsed()) {
      log.info("evaluate", {{"gold", eval_gold}, {"predictions", eval_preds}});
      const auto gold = eqa::squad::parse_dataset(read_file(eval_gold));
      const auto preds = eqa::eval::parse_predictions(read_file(eval_preds));
      const auto report = eqa::eval::evaluate(gold, preds);
      emit(out_path, eqa::eval::report_to_json(report));
      if (!quiet) std::cerr << eqa::eval::report_to_table(report);
    } else if (stats->parsed()) {
      const auto d = eqa::squad::parse_dataset(read_file(stats_input));
      emit(out_path, eqa::squad::stats_to_json(eqa::squad::compute_stats(d)));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
