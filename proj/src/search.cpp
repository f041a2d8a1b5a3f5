#include "pstar/search.hpp"

#include <algorithm>

#include "pstar/error.hpp"

namespace pstar {

void JsonLinesTrace::emit(const nlohmann::json& event) {
  std::lock_guard lock(mu_);
  out_ << event.dump() << '\n';
}

namespace {

struct FrontierEntry {
  double f = 0.0;
  std::size_t seq = 0;
  std::shared_ptr<const SearchState> state;
  FunctionId next = FunctionId::RR;
};

bool before(const FrontierEntry& a, const FrontierEntry& b) {
  return a.f < b.f || (a.f == b.f && a.seq < b.seq);
}

class Frontier {
 public:
  void push(FrontierEntry e) {
    heap_.push_back(std::move(e));
    std::push_heap(heap_.begin(), heap_.end(), later);
  }

  FrontierEntry pop() {
    std::pop_heap(heap_.begin(), heap_.end(), later);
    auto e = std::move(heap_.back());
    heap_.pop_back();
    return e;
  }

  const FrontierEntry& top() const { return heap_.front(); }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

  // Linear scan for the true minimum.
  const FrontierEntry& scan_min() const {
    return *std::min_element(heap_.begin(), heap_.end(), before);
  }

 private:
  static bool later(const FrontierEntry& a, const FrontierEntry& b) { return before(b, a); }
  std::vector<FrontierEntry> heap_;
};

}  // namespace

SearchResult search(const DatasetRecord& question, const VisionLanguageModel& backend, const CostConfig& config,
                    const AnswerJudge& judge, const SearchOptions& options) {
  config.validate();
  if (!question.answer) throw Error(ErrorKind::InvalidRecord, question.id + ": search needs an answer key");
  const auto templates =
      options.templates ? options.templates : std::make_shared<const PromptTemplateSet>(PromptTemplateSet::defaults());

  PromptContext ctx;
  ctx.record = &question;
  if (question.image) ctx.image = resolve_image(*question.image, options.image_root);

  const auto emit = [&](nlohmann::json event) {
    if (!options.trace) return;
    event["question_id"] = question.id;
    options.trace->emit(event);
  };

  SearchResult result;
  const std::size_t tries = config.retries + 1;
  for (std::size_t attempt_try = 0; attempt_try < tries; ++attempt_try) {
    emit({{"event", "try"}, {"try", attempt_try}});
    Frontier frontier;
    std::size_t seq = 0;
    const auto expand = [&](const std::shared_ptr<const SearchState>& s) {
      for (auto fn : kAllFunctions) frontier.push({f_cost(*s, fn, config), seq++, s, fn});
    };
    expand(std::make_shared<const SearchState>());

    std::size_t attempts = 0;
    while (!frontier.empty() && attempts < config.max_attempts) {
      if (options.check_frontier) {
        const auto& m = frontier.scan_min();
        ++result.stats.frontier_checks;
        if (m.seq != frontier.top().seq) {
          throw Error(ErrorKind::InvariantViolation, "frontier pop is not the minimum-f entry");
        }
      }
      const auto entry = frontier.pop();
      result.stats.popped_f.push_back(entry.f);
      const auto& parent = *entry.state;

      auto prefix = parent.functions();
      prefix.push_back(entry.next);
      emit({{"event", "pop"},
            {"try", attempt_try},
            {"attempt", attempts + 1},
            {"path", format_path(prefix)},
            {"f", entry.f},
            {"g", parent.g()},
            {"h", entry.f - parent.g()},
            {"frontier", frontier.size()}});

      ctx.prior = &parent.steps();
      auto params = options.params;
      params.max_tokens = config.budget(entry.next);
      const auto gen =
          backend.generate(build_step_prompt(*templates, ctx, entry.next), params, {question.id, format_path(prefix)});
      ++attempts;
      ++result.stats.attempts_total;

      auto child = std::make_shared<const SearchState>(parent.extend(entry.next, gen.text, config));
      result.stats.max_depth_reached = std::max(result.stats.max_depth_reached, child->depth());
      const auto& step = child->steps().back();
      emit({{"event", "response"},
            {"path", format_path(prefix)},
            {"text", step.text},
            {"tokens", step.token_count},
            {"usefulness", step.usefulness},
            {"g", child->g()}});

      if (entry.next == FunctionId::OA) {
        const auto verdict = judge.judge(step.text, question);
        emit({{"event", "judge"},
              {"path", format_path(prefix)},
              {"extracted", verdict.extracted ? nlohmann::json(*verdict.extracted) : nlohmann::json(nullptr)},
              {"correct", verdict.correct}});
        if (verdict.correct) {
          result.stats.attempts_per_try.push_back(attempts);
          ReasoningPath path;
          path.functions = std::move(prefix);
          path.source_question_id = question.id;
          path.final_answer = *verdict.extracted;
          path.attempts = result.stats.attempts_total;
          result.path = std::move(path);
          result.state = *child;
          emit({{"event", "result"}, {"solved", true}, {"attempts", result.stats.attempts_total}});
          return result;
        }
      }
      if (child->depth() < config.max_depth) expand(child);
    }
    result.stats.attempts_per_try.push_back(attempts);
  }
  emit({{"event", "result"}, {"solved", false}, {"attempts", result.stats.attempts_total}});
  return result;
}

}  // namespace pstar
