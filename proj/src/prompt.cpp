#include "promptsent/prompt.hpp"

#include <array>
#include <cctype>

namespace promptsent {

namespace {

constexpr std::array<PromptTemplate, 3> kTemplates{{
    {Task::kAte, "Find aspects in: [x]"},
    {Task::kAsc, "The sentiment of [ASPECT] in [x] is [MASK]"},
    {Task::kCeg, "The reason why [ASPECT] in [x] is [MASK] is because [REASON]"},
}};

constexpr std::array<std::string_view, 2> kControlTokens{"[MASK]", "[REASON]"};

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

void check_arity(Task task, const std::optional<std::string_view>& aspect) {
  if (task == Task::kAte && aspect) {
    throw TemplateArityError("ATE prompt takes no aspect");
  }
  if (task != Task::kAte && !aspect) {
    throw TemplateArityError(std::string(task_name(task)) +
                             " prompt requires an aspect");
  }
}

// Template text before and after [x], with [ASPECT] (and optionally [MASK])
// already substituted.
std::pair<std::string, std::string> template_halves(
    Task task, std::optional<std::string_view> aspect,
    std::optional<std::string_view> mask_word) {
  std::string pattern(prompt_template(task).pattern);
  const std::size_t slot = pattern.find("[x]");
  std::string before = pattern.substr(0, slot);
  std::string after = pattern.substr(slot + 3);
  for (auto* part : {&before, &after}) {
    if (aspect) replace_all(*part, "[ASPECT]", *aspect);
  }
  if (mask_word) replace_all(after, "[MASK]", *mask_word);
  return {before, after};
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kAte: return "ATE";
    case Task::kAsc: return "ASC";
    case Task::kCeg: return "CEG";
  }
  return "?";
}

const PromptTemplate& prompt_template(Task task) {
  return kTemplates[static_cast<std::size_t>(task)];
}

std::string build_prompt(Task task, std::string_view sentence,
                         std::optional<std::string_view> aspect) {
  check_arity(task, aspect);
  auto [before, after] = template_halves(task, aspect, std::nullopt);
  std::string out;
  out.reserve(before.size() + sentence.size() + after.size());
  out.append(before).append(sentence).append(after);
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '[') {
      bool matched = false;
      for (auto control : kControlTokens) {
        if (text.substr(i, control.size()) == control) {
          flush();
          tokens.emplace_back(control);
          i += control.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    }
    ++i;
  }
  flush();
  return tokens;
}

PromptTokens tokenize_prompt(Task task, std::string_view sentence,
                             std::optional<std::string_view> aspect,
                             std::optional<std::string_view> mask_word) {
  check_arity(task, aspect);
  auto [before, after] = template_halves(task, aspect, mask_word);
  PromptTokens out;
  out.tokens = tokenize(before);
  out.prefix_len = out.tokens.size();
  auto body = tokenize(sentence);
  out.sentence_len = body.size();
  out.tokens.insert(out.tokens.end(), body.begin(), body.end());
  auto tail = tokenize(after);
  out.tokens.insert(out.tokens.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace promptsent
