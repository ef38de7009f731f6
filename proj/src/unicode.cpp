#include "lexeval/unicode.hpp"

#include <algorithm>
#include <array>

namespace lexeval::unicode {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Range {
  char32_t lo;
  char32_t hi;
};

// Sorted, non-overlapping.
constexpr std::array kPunctuation{
    Range{0x21, 0x23},     Range{0x25, 0x2A},     Range{0x2C, 0x2F},
    Range{0x3A, 0x3B},     Range{0x3F, 0x40},     Range{0x5B, 0x5D},
    Range{0x5F, 0x5F},     Range{0x7B, 0x7B},     Range{0x7D, 0x7D},
    Range{0xA1, 0xA1},     Range{0xA7, 0xA7},     Range{0xAB, 0xAB},
    Range{0xB6, 0xB7},     Range{0xBB, 0xBB},     Range{0xBF, 0xBF},
    Range{0x2010, 0x2027}, Range{0x2030, 0x2043}, Range{0x2045, 0x2051},
    Range{0x2053, 0x205E}, Range{0x3001, 0x3003}, Range{0x3008, 0x3011},
    Range{0x3014, 0x301F}, Range{0x3030, 0x3030}, Range{0x303D, 0x303D},
    Range{0x30FB, 0x30FB}, Range{0xFE10, 0xFE19}, Range{0xFE30, 0xFE52},
    Range{0xFE54, 0xFE61}, Range{0xFE63, 0xFE63}, Range{0xFE68, 0xFE68},
    Range{0xFE6A, 0xFE6B}, Range{0xFF01, 0xFF03}, Range{0xFF05, 0xFF0A},
    Range{0xFF0C, 0xFF0F}, Range{0xFF1A, 0xFF1B}, Range{0xFF1F, 0xFF20},
    Range{0xFF3B, 0xFF3D}, Range{0xFF3F, 0xFF3F}, Range{0xFF5B, 0xFF5B},
    Range{0xFF5D, 0xFF5D}, Range{0xFF5F, 0xFF65},
};

bool continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  const std::size_t n = utf8.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(utf8[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
      min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
      min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
      min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    std::size_t consumed = 1;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= n || !continuation(static_cast<unsigned char>(utf8[i + k]))) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (static_cast<unsigned char>(utf8[i + k]) & 0x3F);
      ++consumed;
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      i += consumed;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c > 0x10FFFF || (c >= 0xD800 && c <= 0xDFFF)) c = kReplacement;
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::wstring to_wide(std::u32string_view text) {
  static_assert(sizeof(wchar_t) == sizeof(char32_t), "wchar_t must be UTF-32");
  return {text.begin(), text.end()};
}

std::u32string from_wide(std::wstring_view text) {
  return {text.begin(), text.end()};
}

std::size_t length(std::string_view utf8) {
  std::size_t count = 0;
  for (char c : utf8) {
    if (!continuation(static_cast<unsigned char>(c))) ++count;
  }
  return count;
}

bool is_space(char32_t c) {
  switch (c) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\v':
    case U'\f':
    case U'\r':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_ascii_letter(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}

bool is_cjk_ideograph(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF);
}

bool is_punctuation(char32_t c) {
  auto it = std::upper_bound(kPunctuation.begin(), kPunctuation.end(), c,
                             [](char32_t v, const Range& r) { return v < r.lo; });
  if (it == kPunctuation.begin()) return false;
  --it;
  return c <= it->hi;
}

std::u32string_view trim(std::u32string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

}  // namespace lexeval::unicode
