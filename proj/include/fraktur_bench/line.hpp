#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "fraktur_bench/unicode.hpp"

namespace fraktur_bench {

enum class LineKind { ground_truth, prediction };

// Identity of a line pair within the corpus hierarchy.
struct LineKey {
  std::string corpus_id;
  std::string book_id;
  std::string line_id;

  auto operator<=>(const LineKey&) const = default;

  std::string str() const { return corpus_id + "/" + book_id + "/" + line_id; }
};

// One transcription (GT or engine output) of a single printed line.
// Text is held as NFC scalar values; use the factories to keep the
// engine_id / kind pairing consistent.
class TranscriptionLine {
 public:
  static TranscriptionLine ground_truth(LineKey key, std::u32string text) {
    return TranscriptionLine(std::move(key), to_nfc(text), LineKind::ground_truth, std::nullopt);
  }

  static TranscriptionLine prediction(LineKey key, std::u32string text, std::string engine_id) {
    return TranscriptionLine(std::move(key), to_nfc(text), LineKind::prediction, std::move(engine_id));
  }

  static TranscriptionLine ground_truth_utf8(LineKey key, std::string_view utf8) {
    return ground_truth(std::move(key), utf8_to_u32(utf8));
  }

  static TranscriptionLine prediction_utf8(LineKey key, std::string_view utf8, std::string engine_id) {
    return prediction(std::move(key), utf8_to_u32(utf8), std::move(engine_id));
  }

  const LineKey& key() const noexcept { return key_; }
  const std::u32string& text() const noexcept { return text_; }
  std::string text_utf8() const { return u32_to_utf8(text_); }
  LineKind kind() const noexcept { return kind_; }
  const std::optional<std::string>& engine_id() const noexcept { return engine_id_; }

  // Same identity and kind, new text (re-composed to NFC).
  TranscriptionLine with_text(std::u32string text) const {
    TranscriptionLine copy = *this;
    copy.text_ = to_nfc(text);
    return copy;
  }

  bool operator==(const TranscriptionLine&) const = default;

 private:
  TranscriptionLine(LineKey key, std::u32string text, LineKind kind, std::optional<std::string> engine)
      : key_(std::move(key)), text_(std::move(text)), kind_(kind), engine_id_(std::move(engine)) {}

  LineKey key_;
  std::u32string text_;
  LineKind kind_;
  std::optional<std::string> engine_id_;
};

}  // namespace fraktur_bench
