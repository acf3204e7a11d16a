#pragma once

#include <string>
#include <vector>

#include "locm/error.hpp"
#include "locm/instance.hpp"
#include "locm/record.hpp"

namespace locm::eval {

inline constexpr std::string_view kSystemLine =
    "Given a problem statement as contexts, the task is to answer a logical reasoning question.";
inline constexpr std::string_view kNaiveFormat = "Your answer should be in JSON format with key: answer.";
inline constexpr std::string_view kCoTFormat = "Your answer should be in JSON format with keys: reasoning, answer.";
inline constexpr std::string_view kQuestionLead =
    "Based on the above information, is the following statement true, false, or uncertain?";
inline constexpr std::string_view kAnswerLead = "The correct option is:";
inline constexpr std::string_view kSeparator = "-----------------\nOther Examples\n-----------------";

struct PromptSpec {
  PromptMode mode = PromptMode::Naive;
  std::vector<std::string> few_shot;
  std::string context_block;
  std::string question_block;
  std::string options_block;

  /// The full prompt sent to the model.
  std::string text() const {
    std::string out = "System:\n";
    out += kSystemLine;
    out += '\n';
    out += mode == PromptMode::Naive ? kNaiveFormat : kCoTFormat;
    out += "\n\n";
    for (const auto& shot : few_shot) {
      out += shot;
      out += "\n\n";
      out += kSeparator;
      out += "\n\n";
    }
    out += "Context:\n" + context_block + "\nQuestion:\n" + question_block + "\nOptions:\n" + options_block + "\n";
    out += kAnswerLead;
    return out;
  }
};

inline char option_letter(std::size_t i) { return static_cast<char>('A' + i); }

namespace detail {

inline const std::string& require_fol(const AlignedStatement& s, const char* where) {
  if (!s.fol) throw Error(ErrorCode::MissingFOL, std::string(where) + " has no FOL");
  return *s.fol;
}

inline void check_nl(const std::string& nl) {
  if (nl.find(":::") != std::string::npos)
    throw Error(ErrorCode::InvalidArgument, "natural-language text contains the ':::' separator");
}

}  // namespace detail

inline std::string render_context(const ReasoningInstance& inst) {
  std::string out;
  for (const auto& p : inst.premises) {
    detail::check_nl(p.nl);
    out += detail::require_fol(p, "premise") + ":::" + p.nl + '\n';
  }
  return out;
}

inline std::string render_question(const ReasoningInstance& inst) {
  detail::check_nl(inst.question.nl);
  return std::string(kQuestionLead) + '\n' + inst.question.nl + ":::" +
         detail::require_fol(inst.question, "question") + '\n';
}

inline std::string render_options(const std::vector<Label>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    out += option_letter(i);
    out += ") ";
    out += to_string(options[i]);
    out += '\n';
  }
  return out;
}

// -- exemplars ------------------------------------------------------------

inline ReasoningInstance wynter_instance() {
  ReasoningInstance inst;
  inst.id = "exemplar-wynter";
  inst.premises = {
      {"Wynter has dense fur.", "has_dense_fur(Wynter)"},
      {"Wynter is playful.", "is_playful(Wynter)"},
      {"If Wynter has dense fur, then she is either playful or has soft fur, but not both.",
       "has_dense_fur(Wynter) → (is_playful(Wynter) ⊕ soft_fur(Wynter))"},
  };
  inst.question = {"Wynter is not beloved by others", "¬beloved_by_others(Wynter)"};
  inst.gold_label = Label::Uncertain;
  return inst;
}

inline ReasoningInstance peyton_instance() {
  ReasoningInstance inst;
  inst.id = "exemplar-peyton";
  inst.premises = {
      {"Peyton chooses words carefully.", "chooses_words_carefully(Peyton)"},
      {"Peyton listens attentively.", "listens_attentively(Peyton)"},
      {"If a person chooses words carefully or listens attentively, then they are a reserved speaker.",
       "∀x ((chooses_words_carefully(x) ∨ listens_attentively(x)) → reserved_speaker(x))"},
      {"For all humans, if they are reserved speakers or thoughtful listeners, then they build meaningful "
       "connections.",
       "∀x ((reserved_speaker(x) ∨ thoughtful_listener(x)) → builds_meaningful_connections(x))"},
  };
  inst.question = {"Peyton does not build meaningful connections", "¬builds_meaningful_connections(Peyton)"};
  inst.gold_label = Label::False;
  return inst;
}

inline std::string render_example(const ReasoningInstance& inst, const std::string& answer) {
  return "Context:\n" + render_context(inst) + "\nQuestion:\n" + render_question(inst) + "\nOptions:\n" +
         render_options(inst.options) + "\n" + std::string(kAnswerLead) + " " + answer;
}

inline const std::string& naive_exemplar() {
  static const std::string block = render_example(wynter_instance(), "{\n\"answer\": \"C\"\n}");
  return block;
}

inline const std::string& cot_exemplar() {
  static const std::string block = [] {
    auto inst = peyton_instance();
    const auto& p = inst.premises;
    std::string reasoning =
        "fact1: " + *p[0].fol + ":::" + p[0].nl + "\n" +
        "fact2: " + *p[1].fol + ":::" + p[1].nl + "\n" +
        "rule: " + *p[2].fol + ":::" + p[2].nl + "\n" +
        "conclusion: reserved_speaker(Peyton):::Peyton is a reserved speaker.\n" +
        "fact1: reserved_speaker(Peyton):::Peyton is a reserved speaker.\n" +
        "rule: " + *p[3].fol + ":::" + p[3].nl + "\n" +
        "conclusion: builds_meaningful_connections(Peyton):::Peyton builds meaningful connections.\n" +
        "Therefore, it is false that Peyton does not build meaningful connections. The correct option is: B.";
    return render_example(inst, "{\n\"reasoning\": \"" + reasoning + "\",\n\"answer\": \"B\"\n}");
  }();
  return block;
}

inline std::vector<std::string> default_exemplars(PromptMode mode) {
  return {mode == PromptMode::Naive ? naive_exemplar() : cot_exemplar()};
}

/// Pure function of (instance, mode, exemplars).
inline PromptSpec render_prompt(const ReasoningInstance& inst, PromptMode mode,
                                const std::vector<std::string>& exemplars) {
  PromptSpec spec;
  spec.mode = mode;
  spec.few_shot = exemplars;
  spec.context_block = render_context(inst);
  spec.question_block = render_question(inst);
  spec.options_block = render_options(inst.options);
  return spec;
}

inline PromptSpec render_prompt(const ReasoningInstance& inst, PromptMode mode) {
  return render_prompt(inst, mode, default_exemplars(mode));
}

}  // namespace locm::eval
