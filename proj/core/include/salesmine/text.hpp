#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 and token helpers shared by every pipeline stage.
namespace salesmine::text {

bool is_valid_utf8(std::string_view bytes);

// Decodes UTF-8; malformed sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

// Han ideographs, kana and hangul: scripts written without word spaces.
bool is_cjk(char32_t cp);
bool is_separator(char32_t cp);

// Trim and collapse ASCII whitespace runs to one space. Non-ASCII bytes
// (CJK included) pass through untouched.
std::string collapse_whitespace(std::string_view s);

// collapse_whitespace + ASCII lowercase. Key used for substring matching,
// dedup and the baseline embedder.
std::string normalize_for_match(std::string_view s);

// Latin runs split on whitespace and punctuation and are lowercased; each
// CJK codepoint is a token of its own; punctuation never appears in output.
std::vector<std::string> tokenize(std::string_view s);

// Joins tokens with a space, except between two CJK tokens.
std::string join_tokens(std::span<const std::string> tokens);

// join_tokens(tokenize(s)): punctuation- and case-insensitive key.
std::string token_key(std::string_view s);

// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_token_run(std::span<const std::string> haystack,
                        std::span<const std::string> needle);

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffset;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace salesmine::text
