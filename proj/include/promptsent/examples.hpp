#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptsent/dataset.hpp"
#include "promptsent/prompt.hpp"
#include "promptsent/vocab.hpp"

namespace promptsent {

enum class BioTag : int { kO = 0, kB = 1, kI = 2 };
inline constexpr std::size_t kNumBioTags = 3;

std::string_view bio_tag_name(BioTag tag);

/// Sentence-relative token range [start, end).
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const TokenSpan&) const = default;
};

/// Tags for a prompt whose sentence starts at `prefix_len`: O over the
/// prefix, then B/I over each span. Throws std::invalid_argument for spans
/// outside the sentence or overlapping each other.
std::vector<BioTag> align_bio(std::size_t sentence_len,
                              std::span<const TokenSpan> spans,
                              std::size_t prefix_len);

/// No I directly after O or at the start.
bool is_well_formed_bio(std::span<const BioTag> tags);

/// Maximal B I* runs; a stray I opens a new span.
std::vector<TokenSpan> decode_bio(std::span<const BioTag> tags);

struct EncodedIds {
  std::vector<int> ids;    // exactly max_len entries
  std::size_t length = 0;  // unpadded length after truncation
};

/// Maps tokens to ids (UNK for unknown), truncates on the right and pads with
/// PAD up to max_len.
EncodedIds encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                  std::size_t max_len);

struct TaskMask {
  bool ate = false;
  bool asc = false;
  bool ceg = false;
};

/// One prompted model input with the labels it carries.
struct PromptedExample {
  Task task = Task::kAsc;
  std::vector<int> token_ids;      // padded to max_len
  std::size_t length = 0;          // unpadded length
  std::size_t prompt_prefix_len = 0;
  std::size_t sentence_len = 0;    // sentence tokens inside the window
  std::vector<BioTag> bio_tags;    // same length as token_ids when task_mask.ate
  std::optional<int> polarity;
  std::vector<int> explanation_ids;  // ends with EOS when task_mask.ceg
  TaskMask task_mask;
};

struct ExampleOptions {
  std::size_t max_len = 64;
  std::size_t max_explanation_len = 32;  // including EOS
};

/// ASC aspect used when a record has no aspects: the whole sentence.
std::string pseudo_aspect(const Record& record);

/// Builds the prompted examples a record supervises:
///  - aspect-level records: one ATE example, then per aspect one ASC example
///    and, when an explanation exists, one CEG example;
///  - sentence-level records: ASC (and CEG) on the whole-sentence pseudo-aspect.
/// The CEG prompt's [MASK] slot holds the gold polarity word.
std::vector<PromptedExample> build_examples(const Record& record,
                                            const Vocabulary& vocab,
                                            const ExampleOptions& options);

std::vector<PromptedExample> build_examples(std::span<const Record> records,
                                            const Vocabulary& vocab,
                                            const ExampleOptions& options);

/// Unlabeled inference inputs.
PromptedExample make_ate_input(std::string_view sentence, const Vocabulary& vocab,
                               std::size_t max_len);
PromptedExample make_asc_input(std::string_view sentence, std::string_view aspect,
                               const Vocabulary& vocab, std::size_t max_len);
PromptedExample make_ceg_input(std::string_view sentence, std::string_view aspect,
                               Polarity polarity, const Vocabulary& vocab,
                               std::size_t max_len);

/// Vocabulary over every prompt token and explanation token of `records`,
/// plus all template words and polarity words.
Vocabulary build_vocabulary(std::span<const Record> records);

/// Tokenized explanation truncated to max_len - 1 tokens, then EOS.
std::vector<int> encode_explanation(std::string_view explanation,
                                    const Vocabulary& vocab, std::size_t max_len);

}  // namespace promptsent
