#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace promptsent {

enum class Task { kAte = 0, kAsc = 1, kCeg = 2 };

std::string_view task_name(Task task);

/// A task instruction pattern. Placeholders: [x] is the sentence, [ASPECT]
/// the aspect term, [MASK] the polarity slot and [REASON] the point where
/// explanation decoding starts.
struct PromptTemplate {
  Task task;
  std::string_view pattern;
};

const PromptTemplate& prompt_template(Task task);

/// Raised when an aspect is missing for ASC/CEG or supplied for ATE.
class TemplateArityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Substitutes [x] and [ASPECT]; [MASK] and [REASON] stay literal.
std::string build_prompt(Task task, std::string_view sentence,
                         std::optional<std::string_view> aspect = std::nullopt);

/// Lowercases ASCII letters, splits on whitespace and makes every ASCII
/// punctuation character its own token. The control tokens [MASK] and
/// [REASON] survive as single, uppercase tokens.
std::vector<std::string> tokenize(std::string_view text);

/// A prompt split into template prefix, sentence and template suffix.
struct PromptTokens {
  std::vector<std::string> tokens;
  std::size_t prefix_len = 0;    // template tokens before the sentence
  std::size_t sentence_len = 0;  // tokens of the substituted sentence
};

/// Tokenized prompt with region bookkeeping. `mask_word`, when given, replaces
/// the template's [MASK] slot (the CEG prompt is conditioned on a polarity).
PromptTokens tokenize_prompt(Task task, std::string_view sentence,
                             std::optional<std::string_view> aspect = std::nullopt,
                             std::optional<std::string_view> mask_word = std::nullopt);

}  // namespace promptsent
