#pragma once

// UTF-8 <-> UTF-32 conversion and NFC composition, backed by ICU.

#include <cstdio>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include "fraktur_bench/error.hpp"

namespace fraktur_bench {

// Decodes UTF-8 into scalar values. Ill-formed input throws EncodingError.
inline std::u32string utf8_to_u32(std::string_view bytes) {
  if (bytes.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  int32_t utf16_len = 0;
  u_strFromUTF8(nullptr, 0, &utf16_len, bytes.data(), static_cast<int32_t>(bytes.size()), &status);
  if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) {
    throw EncodingError("undecodable UTF-8 input");
  }
  status = U_ZERO_ERROR;
  std::u16string utf16(static_cast<size_t>(utf16_len), u'\0');
  u_strFromUTF8(reinterpret_cast<UChar*>(utf16.data()), utf16_len, nullptr, bytes.data(),
                static_cast<int32_t>(bytes.size()), &status);
  if (U_FAILURE(status)) throw EncodingError("undecodable UTF-8 input");

  icu::UnicodeString ustr(reinterpret_cast<const UChar*>(utf16.data()), utf16_len);
  std::u32string out(static_cast<size_t>(ustr.countChar32()), U'\0');
  status = U_ZERO_ERROR;
  ustr.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
  if (U_FAILURE(status)) throw EncodingError("UTF-16 to UTF-32 conversion failed");
  return out;
}

inline std::string u32_to_utf8(std::u32string_view text) {
  std::string out;
  if (text.empty()) return out;
  icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(text.data()),
                                static_cast<int32_t>(text.size()))
      .toUTF8String(out);
  return out;
}

inline std::string u32_to_utf8(char32_t c) { return u32_to_utf8(std::u32string_view(&c, 1)); }

// Canonical composition (NFC).
inline std::u32string to_nfc(std::u32string_view text) {
  if (text.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw EncodingError("ICU NFC normalizer unavailable");
  icu::UnicodeString src = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()), static_cast<int32_t>(text.size()));
  if (nfc->isNormalized(src, status) && U_SUCCESS(status)) return std::u32string(text);
  status = U_ZERO_ERROR;
  icu::UnicodeString composed = nfc->normalize(src, status);
  if (U_FAILURE(status)) throw EncodingError("NFC normalization failed");
  std::u32string out(static_cast<size_t>(composed.countChar32()), U'\0');
  composed.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
  if (U_FAILURE(status)) throw EncodingError("NFC normalization failed");
  return out;
}

inline std::u32string utf8_to_nfc(std::string_view bytes) { return to_nfc(utf8_to_u32(bytes)); }

// "U+00E4" style label for diagnostics.
inline std::string code_point_label(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

}  // namespace fraktur_bench
