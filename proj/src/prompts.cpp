#include "pstar/prompts.hpp"

#include <set>

#include "pstar/error.hpp"

namespace pstar {
namespace {

const std::set<std::string>& known_placeholders() {
  static const std::set<std::string> names = {"question", "choices", "transcript", "image", "answer_format"};
  return names;
}

void check_placeholders(const std::string& tmpl, const std::string& where) {
  std::size_t pos = 0;
  while ((pos = tmpl.find("{{", pos)) != std::string::npos) {
    const auto end = tmpl.find("}}", pos + 2);
    if (end == std::string::npos) throw Error(ErrorKind::ParseError, where + ": unterminated placeholder");
    const auto name = tmpl.substr(pos + 2, end - pos - 2);
    if (!known_placeholders().contains(name)) {
      throw Error(ErrorKind::ParseError, where + ": unknown placeholder {{" + name + "}}");
    }
    pos = end + 2;
  }
}

std::string answer_format_hint(const DatasetRecord& r) {
  switch (r.format) {
    case AnswerFormat::Mcqa: return "the letter of the correct choice";
    case AnswerFormat::YesNo: return "yes or no";
    case AnswerFormat::Numeric: return "a single number";
    case AnswerFormat::Open: return "a short phrase";
  }
  return "a short phrase";
}

std::string step_template(const std::string& task) {
  return "{{image}}Question: {{question}}\n{{choices}}\nReasoning so far:\n{{transcript}}\n" + task;
}

}  // namespace

PromptTemplateSet PromptTemplateSet::defaults() {
  PromptTemplateSet t;
  t.system = "You solve visual and textual reasoning problems one step at a time. Perform only the step you are asked for.";
  const auto set = [&t](FunctionId f, const std::string& task) { t.functions[index_of(f)] = step_template(task); };
  set(FunctionId::VA, "Step: Visual Analysis. Describe the parts of the image that matter for this question.");
  set(FunctionId::SA, "Step: System Analysis. Identify what is given, what is asked and the constraints involved.");
  set(FunctionId::RR, "Step: Regular Reasoning. Continue the reasoning one concrete step toward the answer.");
  set(FunctionId::SR, "Step: Self-Reflection. Check the reasoning so far for mistakes or gaps and say what to fix.");
  set(FunctionId::NA, "Step: Numerical Analysis. Carry out the calculations the question needs, showing the numbers.");
  set(FunctionId::SP, "Step: Simplify Problem. Restate the problem in a simpler equivalent form.");
  set(FunctionId::KI, "Step: Knowledge Injection. State the facts or formulas needed to answer.");
  set(FunctionId::OA, "Step: Output Answer. Reply with the final answer as {{answer_format}}, in the form 'Answer: <answer>'.");
  set(FunctionId::ER, "Step: Error Reasoning. Explain which earlier step is wrong and why, then correct it.");
  t.direct = "{{image}}Question: {{question}}\n{{choices}}\nAnswer with {{answer_format}}, in the form 'Answer: <answer>'.";
  return t;
}

PromptTemplateSet PromptTemplateSet::from_json(const nlohmann::json& j) {
  try {
    PromptTemplateSet t;
    t.system = j.value("system", std::string{});
    t.direct = j.at("direct").get<std::string>();
    check_placeholders(t.system, "system");
    check_placeholders(t.direct, "direct");
    const auto& fns = j.at("functions");
    for (auto f : kAllFunctions) {
      const auto name = std::string(name_of(f));
      if (!fns.contains(name)) throw Error(ErrorKind::ParseError, "templates: missing function " + name);
      t.functions[index_of(f)] = fns.at(name).get<std::string>();
      check_placeholders(t.functions[index_of(f)], name);
    }
    for (const auto& [k, v] : fns.items()) {
      if (!parse_function_name(k)) throw Error(ErrorKind::ParseError, "templates: unknown function " + k);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("templates: ") + e.what());
  }
}

PromptTemplateSet PromptTemplateSet::from_file(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

nlohmann::json PromptTemplateSet::to_json() const {
  nlohmann::json fns = nlohmann::json::object();
  for (auto f : kAllFunctions) fns[std::string(name_of(f))] = for_function(f);
  return {{"system", system}, {"direct", direct}, {"functions", fns}};
}

std::string format_choices(const std::vector<std::string>& choices) {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    out += static_cast<char>('A' + i);
    out += ". ";
    out += choices[i];
    out += '\n';
  }
  return out;
}

std::string format_transcript(const std::vector<StepResponse>& steps) {
  if (steps.empty()) return "(none)\n";
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto f = steps[i].function.id;
    out += "Step " + std::to_string(i + 1) + " " + std::string(name_of(f)) + "() [" +
           std::string(description_of(f)) + "]: " + steps[i].text + "\n";
  }
  return out;
}

std::string render_template(const std::string& tmpl, const PromptContext& ctx) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) throw Error(ErrorKind::ParseError, "unterminated placeholder");
    const auto name = tmpl.substr(open + 2, close - open - 2);
    if (name == "question") {
      out += ctx.record->question;
    } else if (name == "choices") {
      out += format_choices(ctx.record->choices);
    } else if (name == "transcript") {
      static const std::vector<StepResponse> none;
      out += format_transcript(ctx.prior ? *ctx.prior : none);
    } else if (name == "image") {
      if (ctx.image) out += "<image>\n";
    } else if (name == "answer_format") {
      out += answer_format_hint(*ctx.record);
    } else {
      throw Error(ErrorKind::ParseError, "unknown placeholder {{" + name + "}}");
    }
    pos = close + 2;
  }
  return out;
}

namespace {

std::vector<ChatTurn> with_system(const PromptTemplateSet& templates, const PromptContext& ctx, std::string user) {
  std::vector<ChatTurn> turns;
  if (!templates.system.empty()) turns.push_back({Role::System, render_template(templates.system, ctx), std::nullopt});
  turns.push_back({Role::User, std::move(user), ctx.image});
  return turns;
}

}  // namespace

std::vector<ChatTurn> build_step_prompt(const PromptTemplateSet& templates, const PromptContext& ctx, FunctionId fn) {
  return with_system(templates, ctx, render_template(templates.for_function(fn), ctx));
}

std::vector<ChatTurn> build_direct_prompt(const PromptTemplateSet& templates, const PromptContext& ctx) {
  return with_system(templates, ctx, render_template(templates.direct, ctx));
}

}  // namespace pstar
