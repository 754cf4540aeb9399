#pragma once

#include <string>
#include <vector>

#include "promptsent/dataset.hpp"
#include "promptsent/prompt.hpp"

namespace fixtures {

using promptsent::Aspect;
using promptsent::Polarity;
using promptsent::Record;

struct Opinion {
  const char* word;
  Polarity polarity;
};

// Aspect words are only ever used as aspects, so the tag of a token follows
// from the token itself.
inline const std::vector<std::string>& aspect_terms() {
  static const std::vector<std::string> terms{
      "battery life", "screen", "keyboard", "camera", "food",
      "service",      "price",  "staff",    "speakers", "delivery"};
  return terms;
}

inline const std::vector<Opinion>& opinions() {
  static const std::vector<Opinion> words{
      {"great", Polarity::kPositive}, {"excellent", Polarity::kPositive},
      {"dim", Polarity::kNegative},   {"awful", Polarity::kNegative},
      {"okay", Polarity::kNeutral},   {"average", Polarity::kNeutral}};
  return words;
}

inline Aspect locate(const std::string& text, const std::string& term, Polarity p,
                     std::size_t from = 0) {
  auto words = promptsent::tokenize(text);
  auto needle = promptsent::tokenize(term);
  for (std::size_t i = from; i + needle.size() <= words.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), words.begin() + i)) {
      return {term, i, i + needle.size(), p};
    }
  }
  return {term, 0, 0, p};
}

// 32 aspect-level records with synthetic explanations: 24 with one aspect
// and 8 with two, including the battery/screen sentence.
inline std::vector<Record> synthetic_records() {
  std::vector<Record> out;
  const auto& terms = aspect_terms();
  const auto& ops = opinions();
  const char* frames[] = {"the %A is %O", "i found the %A %O", "honestly the %A was %O"};
  auto fill = [](std::string frame, const std::string& a, const std::string& o) {
    frame.replace(frame.find("%A"), 2, a);
    frame.replace(frame.find("%O"), 2, o);
    return frame;
  };
  for (std::size_t i = 0; i < 24; ++i) {
    const auto& term = terms[i % terms.size()];
    const auto& op = ops[(i * 7 + i / terms.size()) % ops.size()];
    Record r;
    r.text = fill(frames[i % 3], term, op.word);
    r.aspects.push_back(locate(r.text, term, op.polarity));
    r.explanation = std::string("the ") + term + " is " + op.word;
    out.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < 8; ++i) {
    Record r;
    if (i == 0) {
      r.text = "The battery life is great; but the screen is dim";
      r.aspects.push_back(locate(r.text, "battery life", Polarity::kPositive));
      r.aspects.push_back(locate(r.text, "screen", Polarity::kNegative));
      r.explanation = "good battery life but dim screen";
    } else {
      const auto& a = terms[(2 * i) % terms.size()];
      const auto& b = terms[(2 * i + 3) % terms.size()];
      const auto& oa = ops[i % ops.size()];
      const auto& ob = ops[(i + 3) % ops.size()];
      r.text = "the " + a + " is " + oa.word + " but the " + b + " is " + ob.word;
      r.aspects.push_back(locate(r.text, a, oa.polarity));
      r.aspects.push_back(locate(r.text, b, ob.polarity, r.aspects[0].token_end));
      r.explanation = std::string(oa.word) + " " + a + " and " + ob.word + " " + b;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fixtures
