#include "glovekit/latin.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

namespace glovekit {
namespace {

struct Range {
    char32_t lo;
    char32_t hi;
};

// Letter ranges outside ASCII, ordered. Coarse per-block coverage of the
// major scripts; known symbol code points inside the Latin-1 block
// (multiplication/division signs) are split out.
constexpr std::array<Range, 46> kLetterRanges = {{
    {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA},
    {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02AF}, // Latin suppl./ext., IPA
    {0x0370, 0x0373}, {0x0376, 0x0377}, {0x037A, 0x037D},
    {0x037F, 0x037F}, {0x0386, 0x0386}, {0x0388, 0x03FF}, // Greek
    {0x0400, 0x052F},                                     // Cyrillic
    {0x0530, 0x058F},                                     // Armenian
    {0x05D0, 0x05F2},                                     // Hebrew
    {0x0620, 0x064A}, {0x066E, 0x06D3}, {0x06FA, 0x06FF}, // Arabic
    {0x0700, 0x074F}, {0x0750, 0x077F}, {0x0780, 0x07B1}, // Syriac, Arabic suppl., Thaana
    {0x0900, 0x0DFF},                                     // Indic blocks
    {0x0E01, 0x0E5B}, {0x0E81, 0x0EDF},                   // Thai, Lao
    {0x0F40, 0x0FBC},                                     // Tibetan letters
    {0x1000, 0x109F},                                     // Myanmar
    {0x10A0, 0x10FF},                                     // Georgian
    {0x1100, 0x11FF},                                     // Hangul jamo
    {0x1200, 0x139F},                                     // Ethiopic
    {0x13A0, 0x13FD},                                     // Cherokee
    {0x1400, 0x167F},                                     // Canadian syllabics
    {0x16A0, 0x16EA},                                     // Runic
    {0x1E00, 0x1FFF},                                     // Latin ext. additional, Greek ext.
    {0x2C60, 0x2C7F},                                     // Latin ext. C
    {0x2D00, 0x2D2F},                                     // Georgian suppl.
    {0x3041, 0x3096}, {0x30A1, 0x30FA},                   // Hiragana, Katakana
    {0x3131, 0x318E},                                     // Hangul compat jamo
    {0x3400, 0x4DBF}, {0x4E00, 0x9FFF},                   // CJK ideographs
    {0xA720, 0xA7FF},                                     // Latin ext. D
    {0xAC00, 0xD7A3},                                     // Hangul syllables
    {0xF900, 0xFAFF},                                     // CJK compat ideographs
    {0xFB00, 0xFB4F},                                     // ligatures, Hebrew presentation
    {0xFF21, 0xFF3A}, {0xFF41, 0xFF5A},                   // fullwidth Latin
}};

bool is_nonlatin_letter(char32_t cp) {
    if (cp < 0x80) return false;
    auto it = std::upper_bound(kLetterRanges.begin(), kLetterRanges.end(), cp,
                               [](char32_t v, const Range& r) { return v < r.lo; });
    if (it == kLetterRanges.begin()) return false;
    --it;
    return cp <= it->hi;
}

// Decodes one UTF-8 code point at s[i]; advances i past it. Invalid
// sequences consume one byte and yield U+FFFD.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
        ++i;
        return b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

} // namespace

bool contains_ascii_digit(std::string_view token) {
    return std::any_of(token.begin(), token.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
}

bool contains_nonlatin_letter(std::string_view token) {
    std::size_t i = 0;
    while (i < token.size()) {
        if (is_nonlatin_letter(decode_utf8(token, i))) return true;
    }
    return false;
}

void ascii_lowercase(std::string& s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
}

} // namespace glovekit
