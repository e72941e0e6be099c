/*
 * Copyright 2026 The hash2vec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "hash2vec/errors.hpp"

namespace hash2vec::detail {

// Incremental UTF-8 decoder. Bytes may arrive split across chunk boundaries;
// feed() returns a code point once a sequence is complete.
class Utf8Decoder {
 public:
  // Returns the decoded code point, or nullopt if more bytes are needed.
  // Throws IngestionError on malformed input; `offset` is the absolute byte
  // offset of `byte` in the stream.
  std::optional<char32_t> feed(unsigned char byte, std::size_t offset) {
    if (pending_ == 0) {
      if (byte < 0x80) return static_cast<char32_t>(byte);
      start_ = offset;
      if ((byte & 0xE0) == 0xC0) {
        cp_ = byte & 0x1F;
        pending_ = 1;
        min_ = 0x80;
      } else if ((byte & 0xF0) == 0xE0) {
        cp_ = byte & 0x0F;
        pending_ = 2;
        min_ = 0x800;
      } else if ((byte & 0xF8) == 0xF0) {
        cp_ = byte & 0x07;
        pending_ = 3;
        min_ = 0x10000;
      } else {
        throw IngestionError("invalid UTF-8 lead byte", offset);
      }
      return std::nullopt;
    }
    if ((byte & 0xC0) != 0x80) throw IngestionError("truncated UTF-8 sequence", start_);
    cp_ = (cp_ << 6) | (byte & 0x3F);
    if (--pending_ > 0) return std::nullopt;
    if (cp_ < min_ || cp_ > 0x10FFFF || (cp_ >= 0xD800 && cp_ <= 0xDFFF)) {
      throw IngestionError("invalid UTF-8 code point", start_);
    }
    return cp_;
  }

  // Must be called at end of input.
  void finish(std::size_t offset) const {
    if (pending_ != 0) throw IngestionError("truncated UTF-8 sequence", offset > 0 ? start_ : 0);
  }

 private:
  char32_t cp_ = 0;
  char32_t min_ = 0;
  int pending_ = 0;
  std::size_t start_ = 0;
};

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Simple case folding for Latin, Greek and Cyrillic. Other scripts pass through.
constexpr char32_t to_lower(char32_t cp) noexcept {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  return cp;
}

constexpr bool is_space(char32_t cp) noexcept {
  return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\v' || cp == U'\f' || cp == 0xA0 ||
         cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

constexpr bool is_sentence_terminal(char32_t cp) noexcept {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'\n';
}

// Apostrophes, hyphens and underscores survive only between two word characters.
// Returns the ASCII replacement, or 0 if cp is not a joiner.
constexpr char joiner_of(char32_t cp) noexcept {
  switch (cp) {
    case U'\'':
    case 0x2019:
      return '\'';
    case U'-':
    case 0x2010:
    case 0x2011:
      return '-';
    case U'_':
      return '_';
    default:
      return 0;
  }
}

constexpr bool is_word_char(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9');
  }
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  // General punctuation, symbols, arrows, box drawing, CJK punctuation.
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  return !is_space(cp);
}

inline std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  Utf8Decoder decoder;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (auto cp = decoder.feed(static_cast<unsigned char>(text[i]), i)) append_utf8(out, to_lower(*cp));
  }
  decoder.finish(text.size());
  return out;
}

}  // namespace hash2vec::detail
