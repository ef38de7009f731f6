#include "lexeval/segmenter.hpp"

#include <algorithm>
#include <stdexcept>

#include "lexeval/unicode.hpp"

namespace lexeval {

namespace {

using unicode::is_punctuation;
using unicode::is_space;

void push_trimmed(std::vector<Element>& out, std::u32string_view text, std::size_t start,
                  std::size_t end) {
  while (start < end && is_space(text[start])) ++start;
  while (end > start && is_space(text[end - 1])) --end;
  if (start < end) out.push_back({text.substr(start, end - start), {start, end}});
}

std::vector<Element> paragraphs(std::u32string_view text) {
  std::vector<Element> out;
  std::size_t region = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != U'\n' && text[i] != U'\r') {
      ++i;
      continue;
    }
    std::size_t j = i;
    int newlines = 0;
    while (j < text.size() && (text[j] == U'\n' || text[j] == U'\r')) {
      if (text[j] == U'\n') ++newlines;
      ++j;
    }
    if (newlines >= 2) {
      push_trimmed(out, text, region, i);
      region = j;
    }
    i = j;
  }
  push_trimmed(out, text, region, text.size());
  return out;
}

template <typename Fn>
void for_each_line(std::u32string_view text, Fn&& fn) {
  std::size_t start = 0;
  for (;;) {
    const std::size_t nl = text.find(U'\n', start);
    const std::size_t end = nl == std::u32string_view::npos ? text.size() : nl;
    fn(start, end);
    if (nl == std::u32string_view::npos) break;
    start = nl + 1;
  }
}

std::vector<Element> lines(std::u32string_view text) {
  std::vector<Element> out;
  for_each_line(text, [&](std::size_t s, std::size_t e) { push_trimmed(out, text, s, e); });
  return out;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

std::vector<Element> bullets(std::u32string_view text) {
  std::vector<Element> out;
  for_each_line(text, [&](std::size_t s, std::size_t e) {
    std::size_t i = s;
    while (i < e && (text[i] == U' ' || text[i] == U'\t')) ++i;
    if (i >= e) return;
    if (text[i] == U'*' || text[i] == U'+' || text[i] == U'-') {
      ++i;
    } else if (is_digit(text[i])) {
      while (i < e && is_digit(text[i])) ++i;
      if (i >= e || (text[i] != U'.' && text[i] != U')')) return;
      ++i;
    } else {
      return;
    }
    if (i >= e || (text[i] != U' ' && text[i] != U'\t')) return;
    push_trimmed(out, text, i, e);
  });
  return out;
}

bool is_en_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

bool is_zh_terminator(char32_t c) {
  return c == U'。' || c == U'！' || c == U'？' || c == U'…';
}

bool is_abbreviation(std::u32string_view text, std::size_t sentence_start, std::size_t run_end) {
  std::size_t b = run_end;
  while (b > sentence_start && !is_space(text[b - 1])) --b;
  while (b < run_end && is_punctuation(text[b])) ++b;
  const auto token = text.substr(b, run_end - b);
  const auto& abbrevs = english_abbreviations();
  return std::find(abbrevs.begin(), abbrevs.end(), token) != abbrevs.end();
}

std::vector<Element> sentences(std::u32string_view text, Language language) {
  std::vector<Element> out;
  std::size_t start = 0;
  std::size_t i = 0;
  const bool en = language == Language::kEn;
  while (i < text.size()) {
    const bool term = en ? is_en_terminator(text[i]) : is_zh_terminator(text[i]);
    if (!term) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && (en ? is_en_terminator(text[j]) : is_zh_terminator(text[j]))) ++j;
    bool split = true;
    if (en) {
      split = (j == text.size() || is_space(text[j])) && !is_abbreviation(text, start, j);
    }
    if (split) {
      push_trimmed(out, text, start, j);
      start = j;
    }
    i = j;
  }
  push_trimmed(out, text, start, text.size());
  return out;
}

std::vector<Element> words(std::u32string_view text) {
  std::vector<Element> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && is_punctuation(text[b])) ++b;
    while (e > b && is_punctuation(text[e - 1])) --e;
    if (b < e) out.push_back({text.substr(b, e - b), {b, e}});
    i = j;
  }
  return out;
}

template <typename Pred>
std::vector<Element> single_code_points(std::u32string_view text, Pred pred) {
  std::vector<Element> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (pred(text[i])) out.push_back({text.substr(i, 1), {i, i + 1}});
  }
  return out;
}

std::vector<Element> matches(std::u32string_view text, const std::wregex& re) {
  std::vector<Element> out;
  const std::wstring wide = unicode::to_wide(text);
  for (auto it = std::wsregex_iterator(wide.begin(), wide.end(), re); it != std::wsregex_iterator();
       ++it) {
    const auto pos = static_cast<std::size_t>(it->position(0));
    const auto len = static_cast<std::size_t>(it->length(0));
    if (len == 0) continue;
    out.push_back({text.substr(pos, len), {pos, pos + len}});
  }
  return out;
}

}  // namespace

const std::vector<std::u32string>& english_abbreviations() {
  static const std::vector<std::u32string> list = {
      U"Mr.", U"Mrs.", U"Dr.", U"Prof.", U"St.", U"e.g.", U"i.e.", U"etc.", U"vs.", U"Fig.", U"Eq.",
  };
  return list;
}

std::vector<Element> segment(std::u32string_view text, Level level, Language language,
                             const std::wregex* pattern) {
  if ((level == Level::kPattern) != (pattern != nullptr)) {
    throw std::invalid_argument("a pattern is required exactly for the pattern level");
  }
  switch (level) {
    case Level::kAnswer:
      if (text.empty()) return {};
      return {Element{text, {0, text.size()}}};
    case Level::kParagraph:
      return paragraphs(text);
    case Level::kLine:
      return lines(text);
    case Level::kBullet:
      return bullets(text);
    case Level::kSentence:
      return sentences(text, language);
    case Level::kWord:
      return words(text);
    case Level::kCharacter:
      return single_code_points(text, unicode::is_cjk_ideograph);
    case Level::kLetter:
      return single_code_points(text, unicode::is_ascii_letter);
    case Level::kPunc:
      return single_code_points(text, unicode::is_punctuation);
    case Level::kPattern:
      return matches(text, *pattern);
  }
  return {};
}

std::vector<Element> gaps(const std::vector<Element>& elements, std::u32string_view parent) {
  std::vector<Element> out;
  for (std::size_t i = 1; i < elements.size(); ++i) {
    const std::size_t s = elements[i - 1].span.end;
    const std::size_t e = elements[i].span.start;
    out.push_back({parent.substr(s, e - s), {s, e}});
  }
  return out;
}

std::vector<std::string> segment_texts(std::string_view text, Level level, Language language,
                                       const std::optional<std::string>& pattern) {
  std::shared_ptr<const std::wregex> re;
  if (pattern) re = compile_pattern(*pattern);
  const std::u32string decoded = unicode::decode(text);
  std::vector<std::string> out;
  for (const Element& e : segment(decoded, level, language, re.get())) {
    out.push_back(unicode::encode(e.text));
  }
  return out;
}

}  // namespace lexeval
