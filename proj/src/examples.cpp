#include "promptsent/examples.hpp"

#include <algorithm>
#include <stdexcept>

namespace promptsent {

std::string_view bio_tag_name(BioTag tag) {
  switch (tag) {
    case BioTag::kO: return "O";
    case BioTag::kB: return "B-ASP";
    case BioTag::kI: return "I-ASP";
  }
  return "?";
}

std::vector<BioTag> align_bio(std::size_t sentence_len,
                              std::span<const TokenSpan> spans,
                              std::size_t prefix_len) {
  std::vector<BioTag> tags(prefix_len + sentence_len, BioTag::kO);
  std::vector<bool> used(sentence_len, false);
  for (const auto& span : spans) {
    if (span.start >= span.end || span.end > sentence_len) {
      throw std::invalid_argument("align_bio: span [" + std::to_string(span.start) +
                                  ", " + std::to_string(span.end) +
                                  ") outside sentence of " +
                                  std::to_string(sentence_len) + " tokens");
    }
    for (std::size_t i = span.start; i < span.end; ++i) {
      if (used[i]) throw std::invalid_argument("align_bio: overlapping spans");
      used[i] = true;
      tags[prefix_len + i] = i == span.start ? BioTag::kB : BioTag::kI;
    }
  }
  return tags;
}

bool is_well_formed_bio(std::span<const BioTag> tags) {
  BioTag prev = BioTag::kO;
  for (BioTag t : tags) {
    if (t == BioTag::kI && prev == BioTag::kO) return false;
    prev = t;
  }
  return true;
}

std::vector<TokenSpan> decode_bio(std::span<const BioTag> tags) {
  std::vector<TokenSpan> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == BioTag::kO) continue;
    const bool continues = tags[i] == BioTag::kI && !spans.empty() &&
                           spans.back().end == i;
    if (continues) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1});
    }
  }
  return spans;
}

EncodedIds encode(std::span<const std::string> tokens, const Vocabulary& vocab,
                  std::size_t max_len) {
  EncodedIds out;
  out.length = std::min(tokens.size(), max_len);
  out.ids.assign(max_len, Vocabulary::kPad);
  for (std::size_t i = 0; i < out.length; ++i) out.ids[i] = vocab.id(tokens[i]);
  return out;
}

namespace {

PromptedExample from_prompt(Task task, const PromptTokens& prompt,
                            const Vocabulary& vocab, std::size_t max_len) {
  PromptedExample ex;
  ex.task = task;
  auto encoded = encode(prompt.tokens, vocab, max_len);
  ex.token_ids = std::move(encoded.ids);
  ex.length = encoded.length;
  ex.prompt_prefix_len = std::min(prompt.prefix_len, ex.length);
  ex.sentence_len = std::min(prompt.sentence_len, ex.length - ex.prompt_prefix_len);
  return ex;
}

}  // namespace

PromptedExample make_ate_input(std::string_view sentence, const Vocabulary& vocab,
                               std::size_t max_len) {
  return from_prompt(Task::kAte, tokenize_prompt(Task::kAte, sentence), vocab,
                     max_len);
}

PromptedExample make_asc_input(std::string_view sentence, std::string_view aspect,
                               const Vocabulary& vocab, std::size_t max_len) {
  return from_prompt(Task::kAsc, tokenize_prompt(Task::kAsc, sentence, aspect),
                     vocab, max_len);
}

PromptedExample make_ceg_input(std::string_view sentence, std::string_view aspect,
                               Polarity polarity, const Vocabulary& vocab,
                               std::size_t max_len) {
  return from_prompt(
      Task::kCeg,
      tokenize_prompt(Task::kCeg, sentence, aspect, polarity_name(polarity)),
      vocab, max_len);
}

std::string pseudo_aspect(const Record& record) { return record.text; }

std::vector<int> encode_explanation(std::string_view explanation,
                                    const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("explanation max_len must be >= 1");
  auto tokens = tokenize(explanation);
  if (tokens.size() > max_len - 1) tokens.resize(max_len - 1);
  auto ids = vocab.ids(tokens);
  ids.push_back(Vocabulary::kEos);
  return ids;
}

std::vector<PromptedExample> build_examples(const Record& record,
                                            const Vocabulary& vocab,
                                            const ExampleOptions& options) {
  std::vector<PromptedExample> out;
  const std::size_t max_len = options.max_len;

  auto add_asc_and_ceg = [&](const std::string& aspect, Polarity polarity) {
    auto asc = make_asc_input(record.text, aspect, vocab, max_len);
    asc.polarity = static_cast<int>(polarity);
    asc.task_mask.asc = true;
    out.push_back(std::move(asc));
    if (record.explanation) {
      auto ceg = make_ceg_input(record.text, aspect, polarity, vocab, max_len);
      ceg.explanation_ids = encode_explanation(*record.explanation, vocab,
                                               options.max_explanation_len);
      ceg.task_mask.ceg = true;
      out.push_back(std::move(ceg));
    }
  };

  if (record.sentence_label) {
    add_asc_and_ceg(pseudo_aspect(record), *record.sentence_label);
    return out;
  }

  auto ate = make_ate_input(record.text, vocab, max_len);
  std::vector<TokenSpan> spans;
  for (const auto& a : record.aspects) spans.push_back({a.token_start, a.token_end});
  const std::size_t full_sentence = tokenize(record.text).size();
  auto tags = align_bio(full_sentence, spans, ate.prompt_prefix_len);
  tags.resize(max_len, BioTag::kO);  // truncation or padding
  ate.bio_tags = std::move(tags);
  ate.task_mask.ate = true;
  out.push_back(std::move(ate));

  for (const auto& a : record.aspects) add_asc_and_ceg(a.term, a.polarity);
  return out;
}

std::vector<PromptedExample> build_examples(std::span<const Record> records,
                                            const Vocabulary& vocab,
                                            const ExampleOptions& options) {
  std::vector<PromptedExample> out;
  for (const auto& r : records) {
    auto part = build_examples(r, vocab, options);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

Vocabulary build_vocabulary(std::span<const Record> records) {
  Vocabulary vocab;
  auto add_all = [&](const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) vocab.add(t);
  };
  add_all(tokenize_prompt(Task::kAte, "").tokens);
  add_all(tokenize_prompt(Task::kAsc, "", "").tokens);
  add_all(tokenize_prompt(Task::kCeg, "", "").tokens);
  for (Polarity p : {Polarity::kNegative, Polarity::kPositive, Polarity::kNeutral}) {
    vocab.add(polarity_name(p));
  }
  for (const auto& r : records) {
    add_all(tokenize(r.text));
    for (const auto& a : r.aspects) add_all(tokenize(a.term));
    if (r.explanation) add_all(tokenize(*r.explanation));
  }
  return vocab;
}

}  // namespace promptsent
