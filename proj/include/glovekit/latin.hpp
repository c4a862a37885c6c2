#pragma once

#include <string_view>

namespace glovekit {

/// True if the token contains an ASCII decimal digit.
bool contains_ascii_digit(std::string_view token);

/// True if the token contains an alphabetic code point outside A-Z/a-z.
/// UTF-8 is decoded code point by code point; classification uses a
/// built-in table of letter ranges covering the major scripts (Latin
/// supplements, Greek, Cyrillic, Semitic, Indic, CJK, Hangul, kana, ...).
/// Undecodable bytes and non-letter symbols (punctuation, emoji, marks)
/// do not count as letters.
bool contains_nonlatin_letter(std::string_view token);

/// ASCII-only lowercasing, in place. Bytes outside A-Z are untouched, so
/// tokens stay opaque byte strings.
void ascii_lowercase(std::string& s);

} // namespace glovekit
