#pragma once

// UTF-8 helpers backed by ICU character properties.

#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace evdet::unicode {

/// Decodes UTF-8; ill-formed sequences decode to U+FFFD.
inline std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    const auto n = static_cast<int32_t>(s.size());
    while (i < n) {
        UChar32 c;
        U8_NEXT_OR_FFFD(p, i, n, c);
        out.push_back(static_cast<char32_t>(c));
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t c) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(len));
}

inline std::string encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) append_utf8(out, c);
    return out;
}

inline char32_t to_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

inline bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

inline bool is_alphabetic(char32_t c) {
    return u_hasBinaryProperty(static_cast<UChar32>(c), UCHAR_ALPHABETIC);
}

/// Unicode punctuation categories (Pc Pd Ps Pe Pi Pf Po) plus '#' and '@'.
inline bool is_punctuation(char32_t c) {
    if (c == U'#' || c == U'@') return true;
    return u_ispunct(static_cast<UChar32>(c));
}

/// Basic Latin, Latin-1 Supplement, Latin Extended-A and Latin Extended-B.
inline bool in_latin_blocks(char32_t c) { return c <= 0x024F; }

} // namespace evdet::unicode
