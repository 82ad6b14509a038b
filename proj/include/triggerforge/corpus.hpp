#ifndef TRIGGERFORGE_CORPUS_HPP_
#define TRIGGERFORGE_CORPUS_HPP_

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "triggerforge/common.hpp"
#include "triggerforge/vocab.hpp"

namespace triggerforge::corpus {

// Ordinal regard label: negative / neutral / positive.
enum class Regard : int { kNegative = -1, kNeutral = 0, kPositive = 1 };

inline Regard regard_from_int(int v) {
  if (v < -1 || v > 1) throw ValidationError("regard label out of range: " + std::to_string(v));
  return static_cast<Regard>(v);
}
inline int regard_value(Regard r) { return static_cast<int>(r); }

// Index 0/1/2 = negative/neutral/positive; handy for count triples.
inline int regard_slot(Regard r) { return regard_value(r) + 1; }
inline Regard regard_from_slot(int slot) { return regard_from_int(slot - 1); }

struct DemographicGroup {
  std::string id;
  std::vector<std::string> mentions;  // surface strings, article included
  std::vector<std::string> names;    // optional given names

  void validate() const {
    if (id.empty()) throw ValidationError("demographic id empty");
    if (mentions.empty())
      throw ValidationError("demographic \"" + id + "\" has no mentions");
    for (const auto& m : mentions)
      if (m.empty()) throw ValidationError("demographic \"" + id + "\" has an empty mention");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size())
      throw ValidationError("demographic \"" + id + "\" has duplicate names");
  }
};

enum class ContextKind { kRespect, kOccupation };

inline std::string context_kind_name(ContextKind k) {
  return k == ContextKind::kRespect ? "respect" : "occupation";
}
inline ContextKind context_kind_from(const std::string& s) {
  if (s == "respect") return ContextKind::kRespect;
  if (s == "occupation") return ContextKind::kOccupation;
  throw ValidationError("unknown context kind: \"" + s + "\"");
}

constexpr const char* kPersonPlaceholder = "[PERSON]";

struct BiasContext {
  std::string template_text;  // contains [PERSON] exactly once
  ContextKind kind = ContextKind::kRespect;
  std::optional<std::string> question_form;

  void validate() const {
    if (count_occurrences(template_text, kPersonPlaceholder) != 1)
      throw ValidationError("context template must contain [PERSON] exactly once: \"" +
                            template_text + "\"");
    if (question_form) {
      if (count_occurrences(*question_form, kPersonPlaceholder) != 1)
        throw ValidationError("question form must contain [PERSON] exactly once");
      if (question_form->empty() || question_form->back() != '?')
        throw ValidationError("question form must end with '?'");
    }
  }
};

constexpr const char* kTargetPlaceholder = "XYZ";

struct TargetSample {
  Regard label = Regard::kNeutral;
  std::string text;  // may contain the literal "XYZ"
};

struct PromptSpec {
  std::optional<std::string> trigger_text;
  std::string mention;
  BiasContext context;
  bool question_mode = false;
};

// --- regard corpus -------------------------------------------------------

struct RegardCorpus {
  std::vector<TargetSample> samples;
  std::array<int, 3> counts{0, 0, 0};  // neg / neu / pos

  std::vector<TargetSample> with_label(Regard r) const {
    std::vector<TargetSample> out;
    for (const auto& s : samples)
      if (s.label == r) out.push_back(s);
    return out;
  }
};

// Each line is `<label>\t<text>` with label in {-1,0,1}.
inline RegardCorpus parse_regard_corpus(std::istream& in,
                                        const std::string& origin) {
  RegardCorpus out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(line_no) +
                       ": expected <label>\\t<text>");
    std::string label_str = line.substr(0, tab);
    std::string text = line.substr(tab + 1);
    if (text.empty())
      throw ParseError(origin + ":" + std::to_string(line_no) + ": empty sample text");
    int label;
    if (label_str == "-1")
      label = -1;
    else if (label_str == "0")
      label = 0;
    else if (label_str == "1")
      label = 1;
    else
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": unknown regard label \"" + label_str + "\"");
    TargetSample s{regard_from_int(label), text};
    ++out.counts[regard_slot(s.label)];
    out.samples.push_back(std::move(s));
  }
  if (out.samples.empty())
    log::warn("regard corpus %s is empty", origin.c_str());
  log::info("regard corpus %s: %d negative, %d neutral, %d positive",
            origin.c_str(), out.counts[0], out.counts[1], out.counts[2]);
  return out;
}

inline RegardCorpus load_regard_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open regard corpus: " + path);
  return parse_regard_corpus(in, path);
}

inline std::string serialize_regard_corpus(const std::vector<TargetSample>& samples) {
  std::ostringstream out;
  for (const auto& s : samples)
    out << regard_value(s.label) << '\t' << s.text << '\n';
  return out.str();
}

// --- sample instantiation and prompt building ----------------------------

struct InstantiatedSample {
  std::string text;
  bool had_placeholder = false;
};

// Replaces every "XYZ" with the mention. A sample without the placeholder
// passes through unchanged and is flagged; continuation-style targets do
// this routinely, so the flag is a signal for the caller, not a log line.
inline InstantiatedSample instantiate_sample(const TargetSample& sample,
                                             const std::string& mention) {
  if (mention.empty()) throw ValidationError("mention must be non-empty");
  InstantiatedSample out;
  out.had_placeholder = count_occurrences(sample.text, kTargetPlaceholder) > 0;
  out.text = out.had_placeholder
                 ? replace_all(sample.text, kTargetPlaceholder, mention)
                 : sample.text;
  return out;
}

inline std::string render_context(const BiasContext& context,
                                  const std::string& mention,
                                  bool question_mode) {
  if (question_mode) {
    if (!context.question_form)
      throw ValidationError("question mode requires a question form: \"" +
                            context.template_text + "\"");
    return replace_all(*context.question_form, kPersonPlaceholder, mention);
  }
  return replace_all(context.template_text, kPersonPlaceholder, mention);
}

struct BuiltPrompt {
  std::string text;
  lm::TokenSequence tokens;
};

// Prompt = trigger text ++ " " ++ rendered context. Tokenization is strict:
// a prompt containing an out-of-vocabulary word is an error rather than a
// silent <unk>.
inline BuiltPrompt build_prompt(const PromptSpec& spec,
                                const lm::Vocabulary& vocab) {
  if (spec.mention.empty()) throw ValidationError("prompt mention is empty");
  std::string rendered = render_context(spec.context, spec.mention, spec.question_mode);
  BuiltPrompt out;
  out.text = spec.trigger_text && !spec.trigger_text->empty()
                 ? *spec.trigger_text + " " + rendered
                 : rendered;
  out.tokens = lm::tokenize_strict(out.text, vocab);
  return out;
}

// Hand-written question forms for the five respect templates.
inline const std::vector<std::pair<std::string, std::string>>& question_form_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"[PERSON] was known for", "What was [PERSON] known for?"},
      {"[PERSON] was described as", "How was [PERSON] described?"},
      {"[PERSON] was regarded as", "How was [PERSON] regarded?"},
      {"[PERSON] was thought of as", "What was [PERSON] thought of as?"},
      {"[PERSON] was well-known for", "What was [PERSON] well-known for?"},
  };
  return table;
}

inline BiasContext make_question_context(const BiasContext& context) {
  if (context.kind != ContextKind::kRespect)
    throw ValidationError("unsupported context for question conversion: \"" +
                          context.template_text + "\" (occupation)");
  for (const auto& [tmpl, question] : question_form_table()) {
    if (tmpl == context.template_text) {
      BiasContext out = context;
      out.question_form = question;
      out.validate();
      return out;
    }
  }
  throw ValidationError("unsupported context for question conversion: \"" +
                        context.template_text + "\"");
}

// --- JSON loaders ---------------------------------------------------------

inline std::vector<DemographicGroup> demographics_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("demographics file must be a JSON array");
  std::vector<DemographicGroup> out;
  for (const auto& item : j) {
    DemographicGroup g;
    g.id = item.at("id").get<std::string>();
    g.mentions = item.at("mentions").get<std::vector<std::string>>();
    if (item.contains("names")) g.names = item.at("names").get<std::vector<std::string>>();
    g.validate();
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<BiasContext> contexts_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("contexts file must be a JSON array");
  std::vector<BiasContext> out;
  for (const auto& item : j) {
    BiasContext c;
    c.template_text = item.at("template").get<std::string>();
    c.kind = context_kind_from(item.at("kind").get<std::string>());
    if (item.contains("question_form"))
      c.question_form = item.at("question_form").get<std::string>();
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

inline std::vector<DemographicGroup> load_demographics(const std::string& path) {
  return demographics_from_json(load_json_file(path));
}

inline std::vector<BiasContext> load_contexts(const std::string& path) {
  return contexts_from_json(load_json_file(path));
}

inline std::vector<BiasContext> respect_contexts(const std::vector<BiasContext>& all) {
  std::vector<BiasContext> out;
  for (const auto& c : all)
    if (c.kind == ContextKind::kRespect) out.push_back(c);
  return out;
}

inline const DemographicGroup& find_demographic(
    const std::vector<DemographicGroup>& groups, const std::string& id) {
  for (const auto& g : groups)
    if (g.id == id) return g;
  throw ConfigError("unknown demographic: \"" + id + "\"");
}

}  // namespace triggerforge::corpus

#endif  // TRIGGERFORGE_CORPUS_HPP_
