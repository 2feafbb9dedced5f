#include <gtest/gtest.h>

#include <string>

#include "fraktur_bench/codec.hpp"
#include "oracles.hpp"

using namespace fraktur_bench;

namespace {

std::string data_path(const std::string& rel) { return std::string(FRAKTUR_BENCH_SOURCE_DIR) + "/data/" + rel; }

size_t count_in(const Codec& codec, std::u32string_view chars) {
  size_t n = 0;
  for (char32_t c : chars) n += codec.contains(c);
  return n;
}

}  // namespace

TEST(DefaultCodec, CharacterClasses) {
  const Codec& codec = default_codec();
  EXPECT_EQ(count_in(codec, U"_!\"&'[]*,-./:;=?$%"), 18u);
  EXPECT_EQ(count_in(codec, U"0123456789"), 10u);
  EXPECT_EQ(count_in(codec, U"abcdefghijklmnopqrstuvwxyzſß"), 28u);
  EXPECT_EQ(count_in(codec, U"ABCDEFGHJKLMNOPQRSTUVWXYZ"), 25u);
  EXPECT_EQ(count_in(codec, U"ÄÖÜäöüàèé"), 9u);
  EXPECT_TRUE(codec.contains(U' '));
  EXPECT_FALSE(codec.contains(U'I'));
  EXPECT_FALSE(codec.contains(U'ꝛ'));
  EXPECT_FALSE(codec.contains(U'â'));
  // 18 + 10 + 28 + 25 + 9 + space; see README on the stated 93.
  EXPECT_EQ(codec.size(), 91u);
}

TEST(DefaultCodec, ShippedFileMatchesBuiltin) {
  Codec file = load_codec(data_path("codec/fraktur19.codec"));
  EXPECT_EQ(file.characters(), default_codec().characters());
  EXPECT_EQ(file.name(), "fraktur19");
}

TEST(LoadCodec, EmptyFileIsRejected) {
  try {
    parse_codec("");
    FAIL() << "expected CodecError";
  } catch (const CodecError& e) {
    EXPECT_NE(std::string(e.what()).find("empty codec"), std::string::npos);
  }
  EXPECT_THROW(parse_codec("## name: x\n\n"), CodecError);
}

TEST(LoadCodec, DuplicateNamesCharacterAndLine) {
  try {
    parse_codec("a\na\n");
    FAIL() << "expected CodecError";
  } catch (const CodecError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find(":2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("duplicate character a"), std::string::npos) << msg;
  }
}

TEST(LoadCodec, UndecodableBytes) { EXPECT_THROW(parse_codec("a\n\xff\xfe\n\\s\n"), EncodingError); }

TEST(LoadCodec, EscapesAndMetadata) {
  Codec c = parse_codec("## name: tiny\n## version: 7\n\\s\n\\\\\n\\u00E4\nx\n");
  EXPECT_EQ(c.name(), "tiny");
  EXPECT_EQ(c.version(), "7");
  EXPECT_EQ(c.size(), 4u);
  EXPECT_TRUE(c.contains(U' '));
  EXPECT_TRUE(c.contains(U'\\'));
  EXPECT_TRUE(c.contains(U'ä'));
}

TEST(LoadCodec, DecomposedEntryIsComposed) {
  Codec c = parse_codec("\\s\na\\u0308\n");
  EXPECT_TRUE(c.contains(U'ä'));
}

TEST(LoadCodec, RejectsMultiCharacterEntryAndMissingSpace) {
  EXPECT_THROW(parse_codec("\\s\nab\n"), CodecError);
  EXPECT_THROW(parse_codec("a\nb\n"), CodecError);
  EXPECT_THROW(parse_codec("\\s\n\\u00G1\n"), CodecError);
  EXPECT_THROW(parse_codec("\\s\n\\u00\n"), CodecError);
}

TEST(LoadCodec, SerializationRoundTrip) {
  Codec again = parse_codec(default_codec().to_file_text());
  EXPECT_EQ(again.characters(), default_codec().characters());
}

TEST(LoadCodec, MissingFile) { EXPECT_THROW(load_codec("/nonexistent/codec.txt"), Error); }

TEST(ValidateAgainstCodec, Examples) {
  const Codec& codec = default_codec();
  EXPECT_TRUE(validate_against_codec(std::u32string_view(U"Jch"), codec).empty());
  auto v = validate_against_codec(std::u32string_view(U"Ich"), codec);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], (Violation{0, U'I'}));
  EXPECT_TRUE(validate_against_codec(std::u32string_view(U""), codec).empty());
}

TEST(ValidateAgainstCodec, PositionsAreCharacterIndices) {
  // 'ä' is two bytes in UTF-8; the violation index must still be 2.
  auto v = validate_against_codec(std::u32string_view(U"äbI"), default_codec());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].position, 2u);
}

TEST(CodecCoverage, Examples) {
  Codec ab({U'a', U'b', U' '});
  std::vector<TranscriptionLine> lines{TranscriptionLine::ground_truth({"c", "b", "1"}, U"ab"),
                                       TranscriptionLine::ground_truth({"c", "b", "2"}, U"b")};
  CoverageReport r = codec_coverage_report(lines, ab);
  ASSERT_EQ(r.in_codec.size(), 2u);
  EXPECT_EQ(r.in_codec[0], (CharFrequency{U'b', 2}));
  EXPECT_EQ(r.in_codec[1], (CharFrequency{U'a', 1}));
  EXPECT_TRUE(r.out_of_codec.empty());
  EXPECT_EQ(r.total(), 3u);

  CoverageReport none = codec_coverage_report({}, ab);
  EXPECT_TRUE(none.in_codec.empty());
  EXPECT_TRUE(none.out_of_codec.empty());

  Codec a({U'a', U' '});
  std::vector<TranscriptionLine> one{TranscriptionLine::ground_truth({"c", "b", "1"}, U"aå")};
  CoverageReport oo = codec_coverage_report(one, a);
  ASSERT_EQ(oo.out_of_codec.size(), 1u);
  EXPECT_EQ(oo.out_of_codec[0], (CharFrequency{U'å', 1}));
}

TEST(CodecCoverage, TiesOrderedByCodePoint) {
  Codec c({U'a', U'b', U' '});
  std::vector<TranscriptionLine> lines{TranscriptionLine::ground_truth({"c", "b", "1"}, U"ba")};
  auto r = codec_coverage_report(lines, c);
  ASSERT_EQ(r.in_codec.size(), 2u);
  EXPECT_EQ(r.in_codec[0].character, U'a');
}

TEST(CodecCoverage, FrequenciesSumToCharacterCount) {
  std::mt19937_64 rng(7);
  std::vector<TranscriptionLine> lines;
  size_t chars = 0;
  for (int i = 0; i < 50; ++i) {
    auto s = oracle::random_string(rng, 20, U"abcIJäåſ ");
    chars += s.size();
    lines.push_back(TranscriptionLine::ground_truth({"c", "b", std::to_string(i)}, s));
  }
  EXPECT_EQ(codec_coverage_report(lines, default_codec()).total(), chars);
}
