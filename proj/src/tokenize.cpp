#include "gistline/transduction.hpp"

#include <cctype>

namespace gistline::transduction {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

// Typographic apostrophe U+2019 folds to '.
std::string fold_quotes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

}  // namespace

Tokens tokenize(std::string_view raw) {
  const std::string text = fold_quotes(raw);
  Tokens tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
    } else if (is_word_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '\'') {
      const bool internal = i > 0 && i + 1 < text.size() &&
                            is_word_byte(static_cast<unsigned char>(text[i - 1])) &&
                            is_word_byte(static_cast<unsigned char>(text[i + 1]));
      if (internal) current.push_back('\'');
    }
  }
  flush();
  return tokens;
}

std::vector<Tokens> tokenize_sentences(std::string_view text) {
  std::vector<Tokens> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '.' || text[i] == '?' || text[i] == '!' || text[i] == ';') {
      Tokens tokens = tokenize(text.substr(start, i - start));
      if (!tokens.empty()) sentences.push_back(std::move(tokens));
      start = i + 1;
    }
  }
  return sentences;
}

std::string join(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace gistline::transduction
