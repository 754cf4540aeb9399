#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace promptsent {

/// Class index order used by the ASC head. Binary datasets use the first two.
enum class Polarity { kNegative = 0, kPositive = 1, kNeutral = 2 };

std::string_view polarity_name(Polarity polarity);
std::optional<Polarity> parse_polarity(std::string_view text);

struct Aspect {
  std::string term;
  std::size_t token_start = 0;  // sentence token offsets, end exclusive
  std::size_t token_end = 0;
  Polarity polarity = Polarity::kNeutral;

  bool operator==(const Aspect&) const = default;
};

/// Canonical dataset record. Sentence-level records carry sentence_label and
/// no aspects.
struct Record {
  std::string text;
  std::vector<Aspect> aspects;
  std::optional<Polarity> sentence_label;
  std::optional<std::string> explanation;
  std::optional<std::string> domain;

  bool operator==(const Record&) const = default;
};

enum class DatasetFormat { kJsonl, kSst2Tsv, kSemevalFlattened };

std::optional<DatasetFormat> parse_dataset_format(std::string_view name);

/// Malformed input; `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(std::string source, std::size_t line, const std::string& message);
  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Checks aspect spans against the tokenized text: in range, non-empty and
/// non-overlapping. Throws DataError without location.
void validate_record(const Record& record);

/// Parses one canonical JSONL object. Aspects without token offsets are
/// located by matching the tokenized term in the tokenized text.
Record parse_jsonl_record(std::string_view line);
std::string to_jsonl(const Record& record);

std::vector<Record> parse_dataset(std::istream& in, DatasetFormat format,
                                  const std::string& source = "<stream>");
std::vector<Record> parse_dataset(const std::filesystem::path& path,
                                  DatasetFormat format);

void write_jsonl(std::ostream& out, std::span<const Record> records);

/// Primary polarity used for stratification: the sentence label, else the
/// first aspect's polarity.
std::optional<Polarity> primary_polarity(const Record& record);

struct SubsampleResult {
  std::vector<Record> records;
  std::vector<std::string> warnings;
};

/// Seeded stratified sample of up to k records per primary polarity. Records
/// keep their original relative order. Records without any polarity form
/// their own stratum.
SubsampleResult subsample(std::span<const Record> records,
                          std::size_t k_per_class, std::uint64_t seed);

}  // namespace promptsent
