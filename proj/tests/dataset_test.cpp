#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "promptsent/dataset.hpp"
#include "promptsent/prompt.hpp"

using namespace promptsent;

namespace {

std::vector<Record> parse(const std::string& text, DatasetFormat format) {
  std::istringstream in(text);
  return parse_dataset(in, format, "mem");
}

Record aspect_record(std::string text, std::vector<Aspect> aspects,
                     std::optional<std::string> explanation = std::nullopt) {
  Record r;
  r.text = std::move(text);
  r.aspects = std::move(aspects);
  r.explanation = std::move(explanation);
  return r;
}

Record sentence_record(std::string text, Polarity p) {
  Record r;
  r.text = std::move(text);
  r.sentence_label = p;
  return r;
}

}  // namespace

TEST(Jsonl, ParsesExplicitOffsets) {
  auto records = parse(
      R"({"text":"The battery life is great","aspects":[{"term":"battery life","token_start":1,"token_end":3,"polarity":"positive"}],"sentence_label":null,"explanation":"lasts all day"})"
      "\n",
      DatasetFormat::kJsonl);
  ASSERT_EQ(records.size(), 1u);
  const auto& r = records[0];
  ASSERT_EQ(r.aspects.size(), 1u);
  EXPECT_EQ(r.aspects[0].term, "battery life");
  EXPECT_EQ(r.aspects[0].token_start, 1u);
  EXPECT_EQ(r.aspects[0].token_end, 3u);
  EXPECT_EQ(r.aspects[0].polarity, Polarity::kPositive);
  EXPECT_FALSE(r.sentence_label);
  EXPECT_EQ(r.explanation, "lasts all day");
}

TEST(Jsonl, LocatesAspectsWithoutOffsets) {
  auto r = parse_jsonl_record(
      R"({"text":"The screen is dim, the screen flickers","aspects":[{"term":"Screen","polarity":"negative"},{"term":"screen","polarity":"neutral"}]})");
  ASSERT_EQ(r.aspects.size(), 2u);
  EXPECT_EQ(r.aspects[0].token_start, 1u);
  EXPECT_EQ(r.aspects[1].token_start, 6u);
}

TEST(Jsonl, RejectsOverlappingSpans) {
  const std::string text =
      "\n"
      R"({"text":"a b c d","aspects":[{"term":"a b","token_start":0,"token_end":2,"polarity":"positive"},{"term":"b c","token_start":1,"token_end":3,"polarity":"negative"}]})";
  try {
    parse(text, DatasetFormat::kJsonl);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.source(), "mem");
    EXPECT_NE(std::string(e.what()).find("mem:2:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("overlapping"), std::string::npos);
  }
}

TEST(Jsonl, RejectsMalformedInput) {
  EXPECT_THROW(parse_jsonl_record("{not json"), DataError);
  EXPECT_THROW(parse_jsonl_record("[1,2]"), DataError);
  EXPECT_THROW(parse_jsonl_record(R"({"aspects":[]})"), DataError);
  EXPECT_THROW(parse_jsonl_record(R"({"text":"ok","sentence_label":"great"})"), DataError);
  EXPECT_THROW(
      parse_jsonl_record(
          R"({"text":"ok","aspects":[{"term":"ok","token_start":0,"token_end":3,"polarity":"positive"}]})"),
      DataError);
  EXPECT_THROW(
      parse_jsonl_record(
          R"({"text":"ok","aspects":[{"term":"missing","polarity":"positive"}]})"),
      DataError);
  EXPECT_THROW(
      parse_jsonl_record(
          R"({"text":"ok","sentence_label":"positive","aspects":[{"term":"ok","polarity":"positive"}]})"),
      DataError);
}

TEST(Jsonl, RoundTripIsIdentity) {
  std::vector<Record> records{
      aspect_record("The battery life is great but the screen is dim",
                    {{"battery life", 1, 3, Polarity::kPositive},
                     {"screen", 7, 8, Polarity::kNegative}},
                    "battery lasts , display dark"),
      sentence_record("a moving film", Polarity::kPositive),
      aspect_record("no aspects here", {}),
  };
  records[2].domain = "laptop";
  std::ostringstream out;
  write_jsonl(out, records);
  auto back = parse(out.str(), DatasetFormat::kJsonl);
  EXPECT_EQ(back, records);
  std::ostringstream again;
  write_jsonl(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(Jsonl, RandomRoundTrips) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> words{"the", "food", "was", "cold", "service",
                                       "\"quoted\"", "caf\xC3\xA9", "!", "tab\there"};
  for (int trial = 0; trial < 100; ++trial) {
    Record r;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) r.text += (i ? " " : "") + words[rng() % words.size()];
    const std::size_t tokens = r.text.empty() ? 0 : tokenize(r.text).size();
    if (rng() % 2 || tokens == 0) {
      r.sentence_label = static_cast<Polarity>(rng() % 3);
    } else {
      const std::size_t start = rng() % tokens;
      r.aspects.push_back({"x", start, start + 1, static_cast<Polarity>(rng() % 3)});
    }
    if (rng() % 2) r.explanation = words[rng() % words.size()];
    const std::string line = to_jsonl(r);
    EXPECT_EQ(parse_jsonl_record(line), r) << line;
  }
}

TEST(Sst2, ParsesGlueTsv) {
  auto records = parse("sentence\tlabel\nit 's a charming journey \t1\nflat , dull\t0\n",
                       DatasetFormat::kSst2Tsv);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].sentence_label, Polarity::kPositive);
  EXPECT_EQ(records[1].sentence_label, Polarity::kNegative);
  EXPECT_TRUE(records[0].aspects.empty());
}

TEST(Sst2, RejectsBadLabel) {
  EXPECT_THROW(parse("good\t2\n", DatasetFormat::kSst2Tsv), DataError);
  EXPECT_THROW(parse("no tab here\n", DatasetFormat::kSst2Tsv), DataError);
}

TEST(Semeval, ParsesFlattenedLines) {
  auto records = parse(
      "laptop\tThe battery life is great but the screen is dim\tbattery life\tpositive"
      "\tscreen\tnegative\r\n"
      "restaurant\tWe left\n",
      DatasetFormat::kSemevalFlattened);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].domain, "laptop");
  ASSERT_EQ(records[0].aspects.size(), 2u);
  EXPECT_EQ(records[0].aspects[1].token_start, 7u);
  EXPECT_EQ(records[0].aspects[1].polarity, Polarity::kNegative);
  EXPECT_TRUE(records[1].aspects.empty());
}

TEST(Semeval, RejectsConflictAndOddFields) {
  EXPECT_THROW(parse("laptop\tgood screen\tscreen\tconflict\n",
                     DatasetFormat::kSemevalFlattened),
               DataError);
  EXPECT_THROW(parse("laptop\tgood screen\tscreen\n", DatasetFormat::kSemevalFlattened),
               DataError);
}

TEST(Formats, NamesParse) {
  EXPECT_EQ(parse_dataset_format("jsonl"), DatasetFormat::kJsonl);
  EXPECT_EQ(parse_dataset_format("sst2_tsv"), DatasetFormat::kSst2Tsv);
  EXPECT_EQ(parse_dataset_format("semeval_xml_flattened"),
            DatasetFormat::kSemevalFlattened);
  EXPECT_FALSE(parse_dataset_format("csv"));
}

TEST(Formats, MissingFileIsDataError) {
  EXPECT_THROW(parse_dataset(std::filesystem::path("/nonexistent/x.jsonl"),
                             DatasetFormat::kJsonl),
               DataError);
}

namespace {
std::vector<Record> nine_records() {
  // 3 positive, 4 negative, 2 neutral
  std::vector<Record> out;
  const Polarity labels[] = {Polarity::kPositive, Polarity::kNegative, Polarity::kNegative,
                             Polarity::kNeutral,  Polarity::kPositive, Polarity::kNegative,
                             Polarity::kPositive, Polarity::kNeutral,  Polarity::kNegative};
  for (int i = 0; i < 9; ++i) {
    out.push_back(sentence_record("s" + std::to_string(i), labels[i]));
  }
  return out;
}

std::map<Polarity, int> counts(const std::vector<Record>& records) {
  std::map<Polarity, int> c;
  for (const auto& r : records) ++c[*primary_polarity(r)];
  return c;
}
}  // namespace

TEST(Subsample, TakesKPerClass) {
  auto records = nine_records();
  auto result = subsample(records, 2, 7);
  EXPECT_EQ(result.records.size(), 6u);
  auto c = counts(result.records);
  EXPECT_EQ(c[Polarity::kPositive], 2);
  EXPECT_EQ(c[Polarity::kNegative], 2);
  EXPECT_EQ(c[Polarity::kNeutral], 2);
  EXPECT_TRUE(result.warnings.empty());
}

TEST(Subsample, SaturatesWithWarning) {
  auto records = nine_records();
  auto result = subsample(records, 3, 7);
  EXPECT_EQ(result.records.size(), 8u);
  ASSERT_EQ(result.warnings.size(), 1u);
  EXPECT_NE(result.warnings[0].find("neutral"), std::string::npos);
  EXPECT_EQ(subsample(records, 100, 1).records, records);
}

TEST(Subsample, DeterministicPerSeedAndOrdered) {
  auto records = nine_records();
  EXPECT_EQ(subsample(records, 2, 42).records, subsample(records, 2, 42).records);
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) {
    differs = subsample(records, 2, s).records != subsample(records, 2, 42).records;
  }
  EXPECT_TRUE(differs);
  auto picked = subsample(records, 2, 3).records;
  std::vector<std::size_t> positions;
  for (const auto& r : picked) positions.push_back(std::stoul(r.text.substr(1)));
  EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
  EXPECT_THROW(subsample(records, 0, 1), std::invalid_argument);
}
