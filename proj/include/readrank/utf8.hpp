#pragma once

#include <string>
#include <string_view>

namespace readrank::utf8 {

enum class Script { kNone, kLatin, kGreek, kCyrillic, kArmenian, kOther };

bool is_valid(std::string_view bytes);

// Invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

// Number of code points; invalid bytes count as one each.
std::size_t length(std::string_view bytes);

bool is_space(char32_t cp);
bool is_letter(char32_t cp);
bool is_mark(char32_t cp);
bool is_digit(char32_t cp);
bool is_upper(char32_t cp);
char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);
std::u32string to_lower(std::u32string_view text);
Script script_of(char32_t cp);

// Letters in scripts without case distinction (CJK, Arabic, ...).
inline bool is_caseless_letter(char32_t cp) {
  return is_letter(cp) && script_of(cp) == Script::kOther;
}

inline bool is_word_char(char32_t cp) {
  return is_letter(cp) || is_mark(cp) || is_digit(cp);
}

}  // namespace readrank::utf8
