// pstar: difficulty-aware seed sampling, A* path discovery and
// path-guided inference over JSON-lines datasets.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pstar/config.hpp"
#include "pstar/error.hpp"
#include "pstar/evaluation.hpp"
#include "pstar/executor.hpp"
#include "pstar/library.hpp"
#include "pstar/pipeline.hpp"

namespace {

using namespace pstar;

struct GlobalOptions {
  std::string config_path;
  std::string backend;
  std::string mock_script;
  std::string endpoint;
  std::string model;
  std::optional<double> alpha;
  std::optional<std::size_t> k;
  std::optional<std::size_t> max_attempts;
  std::string trace_path;
  std::optional<std::size_t> workers;
};

PipelineConfig resolve_config(const GlobalOptions& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{} : PipelineConfig::from_file(g.config_path);
  if (!g.backend.empty()) c.backend.kind = g.backend;
  if (!g.mock_script.empty()) c.backend.mock_script = g.mock_script;
  if (!g.endpoint.empty()) c.backend.endpoint = g.endpoint;
  if (!g.model.empty()) c.backend.model = g.model;
  if (g.alpha) c.retrieval.alpha = *g.alpha;
  if (g.k) c.seed_count = *g.k;
  if (g.max_attempts) c.cost.max_attempts = *g.max_attempts;
  if (g.workers) c.workers = *g.workers;
  c.validate();
  return c;
}

// Entries built with the mock backend get a fixed timestamp so reruns are
// byte-identical; SOURCE_DATE_EPOCH overrides for any backend.
std::string creation_timestamp(const PipelineConfig& c) {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else if (c.backend.kind != "mock") {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_report(const nlohmann::json& report, const std::string& path) {
  if (!path.empty()) write_file(path, report.dump(2) + "\n");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reasoning-path discovery, retrieval and execution for VLMs", "pstar"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "pipeline configuration (JSON)");
  app.add_option("--backend", g.backend, "model backend")->check(CLI::IsMember({"mock", "http"}));
  app.add_option("--mock-script", g.mock_script, "scripted responses for the mock backend");
  app.add_option("--endpoint", g.endpoint, "chat-completions URL for the http backend");
  app.add_option("--model", g.model, "model name sent to the http backend");
  app.add_option("--alpha", g.alpha, "HSS trade-off in [0, 1]");
  app.add_option("--k", g.k, "seed count");
  app.add_option("--max-attempts", g.max_attempts, "generate calls per search try");
  app.add_option("--trace", g.trace_path, "write search traces (JSON lines)");
  app.add_option("--workers", g.workers, "records processed concurrently");

  std::string dataset, out, stats, features, seeds, pca, library, transcripts, json_out, path_str, in;
  std::string question, image, id = "query", format = "open", answer;
  std::vector<std::string> choices;
  bool vanilla = false;

  auto* extract = app.add_subcommand("extract-features", "compute difficulty features and normalization stats");
  extract->add_option("--dataset", dataset, "dataset (JSON lines)")->required();
  extract->add_option("--out", out, "feature rows (JSON lines)")->required();
  extract->add_option("--stats", stats, "normalization stats (JSON)")->required();

  auto* sample = app.add_subcommand("sample-seeds", "max-min seed selection and PCA export");
  sample->add_option("--features", features, "feature rows from extract-features")->required();
  sample->add_option("--out", out, "seed ids, one per line")->required();
  sample->add_option("--pca", pca, "PCA coordinates (CSV)");

  auto* build = app.add_subcommand("build-library", "discover reasoning paths for seeds by A* search");
  build->add_option("--dataset", dataset, "dataset (JSON lines)")->required();
  build->add_option("--seeds", seeds, "seed ids, one per line")->required();
  build->add_option("--stats", stats, "normalization stats (JSON)")->required();
  build->add_option("--out", out, "library file (JSON lines)")->required();

  auto* inf = app.add_subcommand("infer", "retrieve and execute paths for new questions");
  inf->add_option("--library", library, "library file")->required();
  auto* ds_opt = inf->add_option("--dataset", dataset, "questions (JSON lines)");
  auto* q_opt = inf->add_option("--question", question, "single question text");
  ds_opt->excludes(q_opt);
  inf->add_option("--image", image, "image for --question");
  inf->add_option("--choice", choices, "choice for --question (repeatable)");
  inf->add_option("--format", format, "answer format for --question")
      ->check(CLI::IsMember({"mcqa", "yesno", "numeric", "open"}));
  inf->add_option("--id", id, "id for --question");
  inf->add_option("--out", out, "transcripts (JSON lines)");

  auto* ev = app.add_subcommand("eval", "score transcripts against a dataset");
  ev->add_option("--transcripts", transcripts, "transcripts from infer")->required();
  ev->add_option("--dataset", dataset, "dataset with answer keys")->required();
  ev->add_option("--json", json_out, "metric report (JSON)");

  auto* cons = app.add_subcommand("consistency", "two-round RR() OA() SR() RR() OA() transition analysis");
  cons->add_option("--dataset", dataset, "dataset with answer keys")->required();
  cons->add_option("--json", json_out, "report (JSON)");
  cons->add_option("--out", out, "transcripts (JSON lines)");

  auto* fixed = app.add_subcommand("fixed-path", "evaluate one fixed path (or vanilla prompting)");
  fixed->add_option("--dataset", dataset, "dataset with answer keys")->required();
  auto* p_opt = fixed->add_option("--path", path_str, "path such as \"SA() RR() RR()\"");
  auto* v_opt = fixed->add_flag("--vanilla", vanilla, "single direct prompt, no path");
  p_opt->excludes(v_opt);
  fixed->add_option("--json", json_out, "report (JSON)");
  fixed->add_option("--out", out, "transcripts (JSON lines)");

  auto* exp = app.add_subcommand("export-library", "write a library as one JSON document");
  exp->add_option("--library", library, "library file")->required();
  exp->add_option("--out", out, "JSON document")->required();

  auto* imp = app.add_subcommand("import-library", "convert a JSON document back to a library file");
  imp->add_option("--in", in, "JSON document")->required();
  imp->add_option("--out", out, "library file")->required();

  auto* show_templates = app.add_subcommand("print-templates", "print the built-in prompt templates");
  auto* show_config = app.add_subcommand("print-config", "print the resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = resolve_config(g);
    std::unique_ptr<std::ofstream> trace_file;
    std::unique_ptr<JsonLinesTrace> trace;
    if (!g.trace_path.empty()) {
      trace_file = std::make_unique<std::ofstream>(g.trace_path, std::ios::trunc);
      if (!*trace_file) throw Error(ErrorKind::IoError, "cannot open trace file " + g.trace_path);
      trace = std::make_unique<JsonLinesTrace>(*trace_file);
    }

    if (*show_templates) {
      std::cout << PromptTemplateSet::defaults().to_json().dump(2) << '\n';
      return 0;
    }
    if (*show_config) {
      std::cout << config.to_json().dump(2) << '\n';
      return 0;
    }

    if (*extract) {
      const auto ds = load_dataset(dataset);
      const auto fx = extract_features(ds, config.canny, config.workers);
      write_feature_file(fx, out);
      if (!fx.stats) throw Error(ErrorKind::TooFewSamples, "need at least 2 valid records to fit normalization");
      write_stats_file(*fx.stats, stats);
      for (const auto& r : fx.rows) {
        if (r.error) std::cerr << "record " << r.id << " failed: " << *r.error << '\n';
      }
      std::cout << "features: " << fx.rows.size() - fx.failures << " ok, " << fx.failures << " failed\n";
      return fx.failures == 0 ? 0 : exit_code(ErrorCategory::Data);
    }

    if (*sample) {
      const auto s = sample_seeds(read_feature_file(features), config.seed_count);
      write_id_list(s.seed_ids, out);
      if (!pca.empty()) write_file(pca, pca_csv(s));
      std::cout << "selected " << s.seed_ids.size() << " of " << s.row_ids.size() << " seeds\n";
      return 0;
    }

    if (*exp) {
      write_file(out, export_library(load_library(library)).dump(2) + "\n");
      return 0;
    }
    if (*imp) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(read_file(in));
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::MalformedData, in + ": " + e.what());
      }
      save_library(import_library(doc), out);
      return 0;
    }

    if (*ev) {
      const auto ds = load_dataset(dataset);
      const auto results = judge_transcripts(read_transcripts(transcripts), ds.records);
      const auto report = summarize(results);
      std::cout << format_table(report);
      write_report(to_json(report), json_out);
      return 0;
    }

    const auto backend = make_backend(config.backend);

    if (*build) {
      const auto embedder = make_embedder(config.backend);
      BuildContext ctx{backend.get(), embedder.get(), config, trace.get(), creation_timestamp(config)};
      const auto rep = build_library(load_dataset(dataset), read_id_list(seeds), read_stats_file(stats), ctx, out);
      std::cout << "solved " << rep.solved << ", unsolved " << rep.unsolved.size() << ", skipped " << rep.skipped
                << '\n';
      return 0;
    }

    if (*inf) {
      const auto embedder = make_embedder(config.backend);
      const auto lib = load_library(library);
      std::vector<DatasetRecord> questions;
      std::filesystem::path root = std::filesystem::current_path();
      if (!dataset.empty()) {
        auto ds = load_dataset(dataset);
        questions = std::move(ds.records);
        root = ds.root;
      } else if (!question.empty()) {
        DatasetRecord r;
        r.id = id;
        r.question = question;
        if (!image.empty()) r.image = image;
        r.choices = choices;
        r.format = parse_answer_format(format);
        validate(r);
        questions.push_back(std::move(r));
      } else {
        throw Error(ErrorKind::Usage, "infer needs --dataset or --question");
      }
      const auto ts = infer(questions, root, lib, {backend.get(), embedder.get(), config});
      if (!out.empty()) write_transcripts(ts, out);
      for (const auto& t : ts) {
        std::cout << t.question_id << '\t' << format_path(t.path) << '\t' << t.extracted_answer.value_or("-") << '\n';
      }
      return 0;
    }

    ExecutionOptions opts;
    opts.params = config.eval_params;
    opts.token_budgets = config.cost.token_budgets;
    opts.templates = config.load_templates();
    opts.workers = config.workers;

    if (*fixed) {
      const auto ds = load_dataset(dataset);
      opts.image_root = ds.root;
      std::optional<PathFunctions> path;
      if (!vanilla) {
        if (path_str.empty()) throw Error(ErrorKind::Usage, "fixed-path needs --path or --vanilla");
        path = parse_path(path_str);
      }
      const auto rep = run_fixed_path_eval(ds.records, path, *backend, opts);
      if (!out.empty()) write_transcripts(rep.transcripts, out);
      write_report(to_json(rep), json_out);
      std::cout << (path ? format_path(*path) : std::string("vanilla")) << "  accuracy " << percent(rep.accuracy)
                << " (" << rep.correct << "/" << rep.total << ")\n";
      return 0;
    }

    if (*cons) {
      const auto ds = load_dataset(dataset);
      opts.image_root = ds.root;
      const auto rep = run_consistency(ds.records, *backend, opts);
      write_report(to_json(rep), json_out);
      for (auto t : {Transition::CorrectCorrect, Transition::CorrectWrong, Transition::WrongCorrect,
                     Transition::WrongWrong}) {
        std::cout << to_string(t) << '\t' << rep.counts[static_cast<std::size_t>(t)] << '\t' << percent(rep.ratio(t))
                  << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(ErrorCategory::Data);
  }
  return 0;
}
