#include "promptsent/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "promptsent/prompt.hpp"

namespace promptsent {

using nlohmann::json;

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Polarity require_polarity(std::string_view text) {
  auto p = parse_polarity(text);
  if (!p) throw DataError("", 0, "unknown polarity '" + std::string(text) + "'");
  return *p;
}

// Finds the first occurrence of `term` tokens that does not overlap `taken`.
Aspect locate_aspect(const std::vector<std::string>& sentence,
                     std::string term, Polarity polarity,
                     const std::vector<Aspect>& taken) {
  auto needle = tokenize(term);
  if (needle.empty()) throw DataError("", 0, "empty aspect term");
  for (std::size_t start = 0; start + needle.size() <= sentence.size(); ++start) {
    if (!std::equal(needle.begin(), needle.end(), sentence.begin() + start)) continue;
    const std::size_t end = start + needle.size();
    bool overlaps = std::any_of(taken.begin(), taken.end(), [&](const Aspect& a) {
      return start < a.token_end && a.token_start < end;
    });
    if (!overlaps) return Aspect{std::move(term), start, end, polarity};
  }
  throw DataError("", 0, "aspect term '" + term + "' not found in text");
}

Record parse_sst2_line(const std::string& line) {
  auto fields = split_tabs(line);
  if (fields.size() != 2) {
    throw DataError("", 0, "expected 'sentence<TAB>label', got " +
                               std::to_string(fields.size()) + " fields");
  }
  Record record;
  record.text = fields[0];
  if (fields[1] == "1") {
    record.sentence_label = Polarity::kPositive;
  } else if (fields[1] == "0") {
    record.sentence_label = Polarity::kNegative;
  } else {
    throw DataError("", 0, "SST-2 label must be 0 or 1, got '" + fields[1] + "'");
  }
  return record;
}

// domain<TAB>sentence[<TAB>term<TAB>polarity]...
Record parse_semeval_line(const std::string& line) {
  auto fields = split_tabs(line);
  if (fields.size() < 2 || fields.size() % 2 != 0) {
    throw DataError("", 0,
                    "expected 'domain<TAB>sentence' followed by term/polarity "
                    "pairs");
  }
  Record record;
  if (!fields[0].empty()) record.domain = fields[0];
  record.text = fields[1];
  auto sentence = tokenize(record.text);
  for (std::size_t i = 2; i < fields.size(); i += 2) {
    record.aspects.push_back(locate_aspect(sentence, fields[i],
                                           require_polarity(fields[i + 1]),
                                           record.aspects));
  }
  validate_record(record);
  return record;
}

}  // namespace

std::string_view polarity_name(Polarity polarity) {
  switch (polarity) {
    case Polarity::kNegative: return "negative";
    case Polarity::kPositive: return "positive";
    case Polarity::kNeutral: return "neutral";
  }
  return "?";
}

std::optional<Polarity> parse_polarity(std::string_view text) {
  if (text == "negative") return Polarity::kNegative;
  if (text == "positive") return Polarity::kPositive;
  if (text == "neutral") return Polarity::kNeutral;
  return std::nullopt;
}

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::kJsonl;
  if (name == "sst2_tsv") return DatasetFormat::kSst2Tsv;
  if (name == "semeval_xml_flattened") return DatasetFormat::kSemevalFlattened;
  return std::nullopt;
}

namespace {
std::string located(const std::string& source, std::size_t line,
                    const std::string& message) {
  std::string prefix = source;
  if (line) prefix += ":" + std::to_string(line);
  return prefix.empty() ? message : prefix + ": " + message;
}
}  // namespace

DataError::DataError(std::string source, std::size_t line,
                     const std::string& message)
    : std::runtime_error(located(source, line, message)),
      source_(std::move(source)),
      line_(line) {}

void validate_record(const Record& record) {
  if (record.sentence_label && !record.aspects.empty()) {
    throw DataError("", 0, "sentence-level record must not carry aspects");
  }
  const std::size_t n = tokenize(record.text).size();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& a : record.aspects) {
    if (a.token_start >= a.token_end || a.token_end > n) {
      throw DataError("", 0,
                      "aspect '" + a.term + "' span [" + std::to_string(a.token_start) +
                          ", " + std::to_string(a.token_end) +
                          ") outside text of " + std::to_string(n) + " tokens");
    }
    spans.emplace_back(a.token_start, a.token_end);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) {
      throw DataError("", 0, "overlapping aspect spans");
    }
  }
}

Record parse_jsonl_record(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError("", 0, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("", 0, "record must be a JSON object");
  try {
    Record record;
    record.text = obj.at("text").get<std::string>();
    if (auto it = obj.find("sentence_label"); it != obj.end() && !it->is_null()) {
      record.sentence_label = require_polarity(it->get<std::string>());
    }
    if (auto it = obj.find("explanation"); it != obj.end() && !it->is_null()) {
      record.explanation = it->get<std::string>();
    }
    if (auto it = obj.find("domain"); it != obj.end() && !it->is_null()) {
      record.domain = it->get<std::string>();
    }
    auto sentence = tokenize(record.text);
    if (auto it = obj.find("aspects"); it != obj.end() && !it->is_null()) {
      for (const auto& a : *it) {
        auto term = a.at("term").get<std::string>();
        auto polarity = require_polarity(a.at("polarity").get<std::string>());
        if (a.contains("token_start") && a.contains("token_end")) {
          record.aspects.push_back(Aspect{term, a.at("token_start").get<std::size_t>(),
                                          a.at("token_end").get<std::size_t>(),
                                          polarity});
        } else {
          record.aspects.push_back(
              locate_aspect(sentence, term, polarity, record.aspects));
        }
      }
    }
    validate_record(record);
    return record;
  } catch (const json::exception& e) {
    throw DataError("", 0, std::string("schema violation: ") + e.what());
  }
}

std::string to_jsonl(const Record& record) {
  json obj;
  obj["text"] = record.text;
  json aspects = json::array();
  for (const auto& a : record.aspects) {
    aspects.push_back({{"term", a.term},
                       {"token_start", a.token_start},
                       {"token_end", a.token_end},
                       {"polarity", polarity_name(a.polarity)}});
  }
  obj["aspects"] = std::move(aspects);
  obj["sentence_label"] = record.sentence_label
                              ? json(polarity_name(*record.sentence_label))
                              : json(nullptr);
  obj["explanation"] = record.explanation ? json(*record.explanation) : json(nullptr);
  if (record.domain) obj["domain"] = *record.domain;
  return obj.dump();
}

std::vector<Record> parse_dataset(std::istream& in, DatasetFormat format,
                                  const std::string& source) {
  std::vector<Record> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(raw);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (format == DatasetFormat::kSst2Tsv && line_no == 1 &&
        line.rfind("sentence\t", 0) == 0) {
      continue;  // GLUE header
    }
    try {
      switch (format) {
        case DatasetFormat::kJsonl: records.push_back(parse_jsonl_record(line)); break;
        case DatasetFormat::kSst2Tsv: records.push_back(parse_sst2_line(line)); break;
        case DatasetFormat::kSemevalFlattened:
          records.push_back(parse_semeval_line(line));
          break;
      }
    } catch (const DataError& e) {
      throw DataError(source, line_no, e.what());
    }
  }
  return records;
}

std::vector<Record> parse_dataset(const std::filesystem::path& path,
                                  DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  return parse_dataset(in, format, path.string());
}

void write_jsonl(std::ostream& out, std::span<const Record> records) {
  for (const auto& r : records) out << to_jsonl(r) << '\n';
}

std::optional<Polarity> primary_polarity(const Record& record) {
  if (record.sentence_label) return record.sentence_label;
  if (!record.aspects.empty()) return record.aspects.front().polarity;
  return std::nullopt;
}

SubsampleResult subsample(std::span<const Record> records,
                          std::size_t k_per_class, std::uint64_t seed) {
  if (k_per_class == 0) throw std::invalid_argument("subsample: k must be >= 1");
  // Stratum key: polarity index, or -1 for unlabeled records.
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto p = primary_polarity(records[i]);
    strata[p ? static_cast<int>(*p) : -1].push_back(i);
  }
  SubsampleResult result;
  std::vector<std::size_t> chosen;
  std::mt19937_64 rng(seed);
  for (auto& [key, members] : strata) {
    if (members.size() < k_per_class) {
      result.warnings.push_back(
          "class '" +
          std::string(key < 0 ? "unlabeled" : polarity_name(static_cast<Polarity>(key))) +
          "' has only " + std::to_string(members.size()) + " records (< " +
          std::to_string(k_per_class) + "); taking all");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t take = std::min(k_per_class, members.size());
    chosen.insert(chosen.end(), members.begin(), members.begin() + take);
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t i : chosen) result.records.push_back(records[i]);
  return result;
}

}  // namespace promptsent
