#pragma once

// UTF-8 helpers shared by the tokenizer, the HTML walker and the stores.

#include <cstdint>
#include <string>
#include <string_view>

namespace encyclogen::utf8 {

constexpr char32_t kReplacement = 0xFFFD;

/// Decodes one code point starting at `pos`. Invalid sequences decode to U+FFFD and consume one
/// byte, so a walk over arbitrary bytes always terminates.
inline char32_t decode(std::string_view s, std::size_t pos, std::size_t& len) {
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    unsigned char c = byte(pos);
    if (c < 0x80) {
        len = 1;
        return c;
    }
    std::size_t need = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
        need = 1;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        need = 2;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        need = 3;
        cp = c & 0x07;
    } else {
        len = 1;
        return kReplacement;
    }
    if (pos + need >= s.size()) {
        len = 1;
        return kReplacement;
    }
    for (std::size_t i = 1; i <= need; ++i) {
        unsigned char cc = byte(pos + i);
        if ((cc & 0xC0) != 0x80) {
            len = 1;
            return kReplacement;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    len = need + 1;
    return cp;
}

inline void append(std::string& out, char32_t cp) {
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

/// Simple one-to-one case folding for Latin, Greek, Cyrillic and fullwidth Latin.
constexpr char32_t fold(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c < 0x80) return c;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    if (c >= 0x100 && c <= 0x17F) {
        if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
        if (c == 0x130 || c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) return c;
        if (c == 0x178) return 0xFF;
        return (c % 2 == 0) ? c + 1 : c;
    }
    if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
    if (c >= 0x410 && c <= 0x42F) return c + 0x20;
    if (c >= 0x400 && c <= 0x40F) return c + 0x50;
    if (c >= 0xFF21 && c <= 0xFF3A) return c + 0x20;
    return c;
}

constexpr bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
           c == 0x3000 || (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029;
}

/// Ideographs and hiragana form one-character words.
constexpr bool is_ideographic(char32_t c) {
    return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) || (c >= 0xF900 && c <= 0xFAFF) ||
           (c >= 0x20000 && c <= 0x2FFFF) || (c >= 0x3040 && c <= 0x309F) || c == 0x3005;
}

constexpr bool is_katakana(char32_t c) {
    return (c >= 0x30A0 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF) || (c >= 0xFF66 && c <= 0xFF9F);
}

constexpr bool is_digit(char32_t c) { return (c >= '0' && c <= '9') || (c >= 0xFF10 && c <= 0xFF19); }

/// Letters, digits and combining marks of alphabetic scripts. Katakana and ideographs are
/// handled separately.
constexpr bool is_alnum(char32_t c) {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c == 0xD7 || c == 0xF7) return false;
    if (c == 0x37E || c == 0x387) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows
    if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF0F) return false;
    if (c >= 0xFF1A && c <= 0xFF20) return false;
    if (c >= 0xFF3B && c <= 0xFF40) return false;
    if (c >= 0xFF5B && c <= 0xFF65) return false;
    if (c == kReplacement || (c >= 0xE000 && c <= 0xF8FF)) return false;
    if (is_space(c) || is_ideographic(c) || is_katakana(c)) return false;
    return true;
}

inline std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        std::size_t len = 0;
        char32_t cp = decode(s, i, len);
        if (cp < 0x80) {
            out.push_back(static_cast<char>(fold(cp)));
        } else if (cp == kReplacement) {
            out.append(s.substr(i, len));
        } else {
            append(out, fold(cp));
        }
        i += len;
    }
    return out;
}

/// Collapses every run of whitespace to one ASCII space and trims both ends.
inline std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t len = 0;
        char32_t cp = decode(s, i, len);
        if (is_space(cp)) {
            pending = !out.empty();
        } else {
            if (pending) out.push_back(' ');
            pending = false;
            out.append(s.substr(i, len));
        }
        i += len;
    }
    return out;
}

/// Canonical lookup key for terms: folded case, single spaces, trimmed.
inline std::string term_key(std::string_view term) { return collapse_whitespace(fold_case(term)); }

}  // namespace encyclogen::utf8
