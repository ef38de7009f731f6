#pragma once

#include <string>
#include <string_view>

namespace lexeval::unicode {

/// Decodes UTF-8 into code points. Malformed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);

std::string encode(std::u32string_view text);

/// Code point view as wchar_t, for std::wregex (wchar_t is UTF-32 on the
/// platforms we build for).
std::wstring to_wide(std::u32string_view text);
std::u32string from_wide(std::wstring_view text);

std::size_t length(std::string_view utf8);

bool is_space(char32_t c);
bool is_ascii_letter(char32_t c);
/// CJK Unified Ideographs (U+4E00..U+9FFF) and Extension A (U+3400..U+4DBF).
bool is_cjk_ideograph(char32_t c);
/// Unicode punctuation (general category P*) over the blocks that occur in
/// English and Chinese text, plus full-width CJK punctuation.
bool is_punctuation(char32_t c);

std::u32string_view trim(std::u32string_view text);

}  // namespace lexeval::unicode
