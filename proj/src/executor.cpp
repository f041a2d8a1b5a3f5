#include "pstar/executor.hpp"

#include "pstar/error.hpp"
#include "pstar/parallel.hpp"

namespace pstar {

std::vector<std::size_t> ExecutionTranscript::token_counts() const {
  std::vector<std::size_t> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.token_count);
  return out;
}

namespace {

nlohmann::json opt_string(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> read_opt_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

PromptContext context_for(const DatasetRecord& q, const ExecutionOptions& options) {
  PromptContext ctx;
  ctx.record = &q;
  if (q.image) ctx.image = resolve_image(*q.image, options.image_root);
  return ctx;
}

std::shared_ptr<const PromptTemplateSet> templates_of(const ExecutionOptions& options) {
  return options.templates ? options.templates
                           : std::make_shared<const PromptTemplateSet>(PromptTemplateSet::defaults());
}

}  // namespace

nlohmann::json to_json(const ExecutionTranscript& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"function", name_of(s.function)},
                     {"text", s.text},
                     {"tokens", s.token_count},
                     {"extracted", opt_string(s.extracted)}});
  }
  return {{"question_id", t.question_id},
          {"path", t.direct ? std::string() : format_path(t.path)},
          {"direct", t.direct},
          {"oa_appended", t.oa_appended},
          {"steps", std::move(steps)},
          {"final_answer_text", t.final_answer_text},
          {"extracted_answer", opt_string(t.extracted_answer)},
          {"retrieved_from", opt_string(t.retrieved_from)},
          {"retrieval_score", t.retrieval_score ? nlohmann::json(*t.retrieval_score) : nlohmann::json(nullptr)}};
}

ExecutionTranscript transcript_from_json(const nlohmann::json& j) {
  try {
    ExecutionTranscript t;
    t.question_id = j.at("question_id").get<std::string>();
    t.direct = j.at("direct").get<bool>();
    if (!t.direct) t.path = parse_path(j.at("path").get<std::string>());
    t.oa_appended = j.at("oa_appended").get<bool>();
    for (const auto& s : j.at("steps")) {
      ExecutedStep step;
      const auto name = s.at("function").get<std::string>();
      if (name != "direct") {
        const auto f = parse_function_name(name);
        if (!f) throw Error(ErrorKind::MalformedData, "transcript: unknown function " + name);
        step.function = *f;
      }
      step.text = s.at("text").get<std::string>();
      step.token_count = s.at("tokens").get<std::size_t>();
      step.extracted = read_opt_string(s, "extracted");
      t.steps.push_back(std::move(step));
    }
    t.final_answer_text = j.at("final_answer_text").get<std::string>();
    t.extracted_answer = read_opt_string(j, "extracted_answer");
    t.retrieved_from = read_opt_string(j, "retrieved_from");
    if (j.contains("retrieval_score") && !j.at("retrieval_score").is_null()) {
      t.retrieval_score = j.at("retrieval_score").get<double>();
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedData, std::string("transcript: ") + e.what());
  }
}

ExecutionTranscript run_path(const DatasetRecord& question, const PathFunctions& path,
                             const VisionLanguageModel& backend, const ExecutionOptions& options) {
  if (path.empty()) throw Error(ErrorKind::Usage, "cannot execute an empty path");
  const auto templates = templates_of(options);
  ExecutionTranscript t;
  t.question_id = question.id;
  t.path = path;
  if (t.path.back() != FunctionId::OA) {
    t.path.push_back(FunctionId::OA);
    t.oa_appended = true;
  }

  auto ctx = context_for(question, options);
  std::vector<StepResponse> prior;
  ctx.prior = &prior;
  PathFunctions prefix;
  for (const auto fn : t.path) {
    prefix.push_back(fn);
    auto params = options.params;
    params.max_tokens = options.token_budgets[index_of(fn)];
    const auto gen = backend.generate(build_step_prompt(*templates, ctx, fn), params, {question.id, format_path(prefix)});
    ExecutedStep step{fn, gen.text, gen.token_count, std::nullopt};
    if (fn == FunctionId::OA) step.extracted = extract_answer(gen.text, question);
    StepResponse sr;
    sr.function = {fn, 1.0, params.max_tokens};
    sr.text = gen.text;
    sr.token_count = gen.token_count;
    prior.push_back(std::move(sr));
    t.steps.push_back(std::move(step));
  }
  t.final_answer_text = t.steps.back().text;
  t.extracted_answer = t.steps.back().extracted;
  return t;
}

ExecutionTranscript execute_path(const DatasetRecord& question, const PathFunctions& path,
                                 const VisionLanguageModel& backend, const ExecutionOptions& options) {
  auto t = run_path(question, path, backend, options);
  if (!t.extracted_answer) {
    throw Error(ErrorKind::ExtractionFailed, question.id + ": no answer in '" + t.final_answer_text + "'");
  }
  return t;
}

ExecutionTranscript run_direct(const DatasetRecord& question, const VisionLanguageModel& backend,
                               const ExecutionOptions& options) {
  const auto templates = templates_of(options);
  const auto ctx = context_for(question, options);
  const auto gen = backend.generate(build_direct_prompt(*templates, ctx), options.params, {question.id, "direct"});
  ExecutionTranscript t;
  t.question_id = question.id;
  t.direct = true;
  ExecutedStep step{FunctionId::OA, gen.text, gen.token_count, extract_answer(gen.text, question)};
  t.final_answer_text = step.text;
  t.extracted_answer = step.extracted;
  t.steps.push_back(std::move(step));
  return t;
}

FixedPathReport run_fixed_path_eval(const std::vector<DatasetRecord>& dataset, const std::optional<PathFunctions>& path,
                                    const VisionLanguageModel& backend, const ExecutionOptions& options) {
  if (dataset.empty()) throw Error(ErrorKind::EmptyDataset, "no records to evaluate");
  for (const auto& r : dataset) {
    if (!r.answer) throw Error(ErrorKind::InvalidRecord, r.id + ": evaluation needs an answer key");
  }
  FixedPathReport rep;
  rep.path = path;
  rep.transcripts = parallel_map(dataset.size(), options.workers, [&](std::size_t i) {
    return path ? run_path(dataset[i], *path, backend, options) : run_direct(dataset[i], backend, options);
  });
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    rep.results.push_back(judge_prediction(dataset[i], rep.transcripts[i].extracted_answer));
    rep.correct += rep.results.back().correct ? 1 : 0;
  }
  rep.total = dataset.size();
  rep.accuracy = static_cast<double>(rep.correct) / static_cast<double>(rep.total);
  return rep;
}

std::string_view to_string(Transition t) {
  switch (t) {
    case Transition::CorrectCorrect: return "correct_then_correct";
    case Transition::CorrectWrong: return "correct_then_wrong";
    case Transition::WrongCorrect: return "wrong_then_correct";
    case Transition::WrongWrong: return "wrong_then_wrong";
  }
  return "wrong_then_wrong";
}

double ConsistencyReport::ratio(Transition t) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts[static_cast<std::size_t>(t)]) / static_cast<double>(total);
}

PathFunctions consistency_path() {
  return {FunctionId::RR, FunctionId::OA, FunctionId::SR, FunctionId::RR, FunctionId::OA};
}

ConsistencyReport run_consistency(const std::vector<DatasetRecord>& dataset, const VisionLanguageModel& backend,
                                  const ExecutionOptions& options) {
  if (dataset.empty()) throw Error(ErrorKind::EmptyDataset, "no records to evaluate");
  for (const auto& r : dataset) {
    if (!r.answer) throw Error(ErrorKind::InvalidRecord, r.id + ": consistency needs an answer key");
  }
  ConsistencyReport rep;
  rep.path = consistency_path();
  const auto transcripts = parallel_map(dataset.size(), options.workers, [&](std::size_t i) {
    return run_path(dataset[i], rep.path, backend, options);
  });
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& t = transcripts[i];
    const bool first = judge_prediction(dataset[i], t.steps[1].extracted).correct;
    const bool second = judge_prediction(dataset[i], t.steps[4].extracted).correct;
    const auto tr = first ? (second ? Transition::CorrectCorrect : Transition::CorrectWrong)
                          : (second ? Transition::WrongCorrect : Transition::WrongWrong);
    ++rep.counts[static_cast<std::size_t>(tr)];
    rep.per_record.emplace_back(dataset[i].id, tr);
  }
  rep.total = dataset.size();
  return rep;
}

nlohmann::json to_json(const FixedPathReport& r) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& x : r.results) results.push_back(to_json(x));
  return {{"mode", r.path ? "path" : "vanilla"},
          {"path", r.path ? nlohmann::json(format_path(*r.path)) : nlohmann::json(nullptr)},
          {"total", r.total},
          {"correct", r.correct},
          {"accuracy", r.accuracy},
          {"results", std::move(results)}};
}

nlohmann::json to_json(const ConsistencyReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  nlohmann::json ratios = nlohmann::json::object();
  for (auto t : {Transition::CorrectCorrect, Transition::CorrectWrong, Transition::WrongCorrect,
                 Transition::WrongWrong}) {
    counts[std::string(to_string(t))] = r.counts[static_cast<std::size_t>(t)];
    ratios[std::string(to_string(t))] = r.ratio(t);
  }
  nlohmann::json records = nlohmann::json::array();
  for (const auto& [id, t] : r.per_record) records.push_back({{"question_id", id}, {"transition", to_string(t)}});
  return {{"path", format_path(r.path)}, {"total", r.total}, {"counts", counts}, {"ratios", ratios},
          {"records", std::move(records)}};
}

}  // namespace pstar
