#pragma once

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "lexeval/rule.hpp"

namespace lexeval {

/// Half-open code-point range into the segmented text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// One unit of text at some level. `text` is always exactly
/// `parent.substr(span.start, span.size())`; levels that trim whitespace or
/// strip punctuation do so by narrowing the span.
struct Element {
  std::u32string_view text;
  Span span;
};

/// Splits `text` into the elements of `level`:
///
///  - answer: the whole text, or nothing when empty.
///  - paragraph: regions between runs of line breaks containing at least two
///    '\n', trimmed; whitespace-only regions dropped.
///  - line: '\n'-separated lines, trimmed; blank lines dropped.
///  - bullet: lines of the form `[ws] (*|+|-|<digits>.|<digits>)) ws+ content`;
///    the element is the content without the marker.
///  - sentence: en splits after runs of . ! ? followed by whitespace or end of
///    text unless the token is a known abbreviation; zh splits after runs of
///    。！？…  Terminators stay attached.
///  - word: whitespace tokens with leading/trailing punctuation stripped;
///    all-punctuation tokens dropped.
///  - character / letter / punc: single CJK ideographs, ASCII letters,
///    punctuation marks.
///  - pattern: non-empty, non-overlapping leftmost matches of `pattern`.
///
/// `pattern` must be non-null exactly when level is pattern
/// (std::invalid_argument otherwise).
std::vector<Element> segment(std::u32string_view text, Level level, Language language,
                             const std::wregex* pattern = nullptr);

/// Raw text strictly between consecutive elements; empty for fewer than two.
std::vector<Element> gaps(const std::vector<Element>& elements, std::u32string_view parent);

/// UTF-8 convenience wrapper; compiles `pattern` (std::regex_error if invalid).
std::vector<std::string> segment_texts(std::string_view text, Level level, Language language,
                                       const std::optional<std::string>& pattern = std::nullopt);

/// Abbreviations that do not end an English sentence.
const std::vector<std::u32string>& english_abbreviations();

}  // namespace lexeval
