#include "gistline/error.hpp"
#include "gistline/transduction.hpp"

#include <algorithm>

namespace gistline::transduction {
namespace {

class Matcher {
 public:
  Matcher(const Pattern& pattern, std::span<const Token> input, const FeatureLexicon& lexicon)
      : elements_(pattern.elements), input_(input), lexicon_(lexicon),
        lengths_(elements_.size(), 0), min_tail_(elements_.size() + 1, 0) {
    // Tokens the suffix starting at element i needs at minimum.
    for (std::size_t i = elements_.size(); i-- > 0;) {
      const bool single = !std::holds_alternative<Wildcard>(elements_[i]);
      min_tail_[i] = min_tail_[i + 1] + (single ? 1 : 0);
    }
  }

  std::optional<Captures> run() {
    if (!step(0, 0)) return std::nullopt;
    Captures captures;
    captures.spans.reserve(elements_.size());
    std::size_t pos = 0;
    for (std::size_t len : lengths_) {
      captures.spans.emplace_back(input_.begin() + static_cast<std::ptrdiff_t>(pos),
                                  input_.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
    }
    return captures;
  }

 private:
  bool step(std::size_t element, std::size_t pos) {
    if (element == elements_.size()) return pos == input_.size();
    const std::size_t remaining = input_.size() - pos;
    if (remaining < min_tail_[element]) return false;

    const auto& e = elements_[element];
    if (const auto* w = std::get_if<Wildcard>(&e)) {
      std::size_t longest = remaining - min_tail_[element + 1];
      if (w->max_len) longest = std::min(longest, *w->max_len);
      for (std::size_t len = 0; len <= longest; ++len) {
        lengths_[element] = len;
        if (step(element + 1, pos + len)) return true;
      }
      return false;
    }
    const Token& token = input_[pos];
    bool ok = false;
    if (const auto* lit = std::get_if<Literal>(&e)) {
      ok = lit->word == token;
    } else {
      ok = lexicon_.has_feature(token, std::get<Feature>(e).name);
    }
    if (!ok) return false;
    lengths_[element] = 1;
    return step(element + 1, pos + 1);
  }

  const std::vector<PatternElement>& elements_;
  std::span<const Token> input_;
  const FeatureLexicon& lexicon_;
  std::vector<std::size_t> lengths_;
  std::vector<std::size_t> min_tail_;
};

}  // namespace

std::optional<Captures> match(const Pattern& pattern, std::span<const Token> input,
                              const FeatureLexicon& lexicon) {
  return Matcher(pattern, input, lexicon).run();
}

std::size_t Template::max_ref() const {
  std::size_t best = 0;
  for (const auto& part : parts) {
    if (const auto* ref = std::get_if<TemplateRef>(&part)) best = std::max(best, ref->index);
  }
  return best;
}

const DeixisMap& default_deixis() {
  static const DeixisMap map{
      {"i", "you"},   {"you", "i"},     {"my", "your"},    {"your", "my"},     {"me", "you"},
      {"am", "are"},  {"are", "am"},    {"mine", "yours"}, {"yours", "mine"},
  };
  return map;
}

Tokens instantiate(const Template& tmpl, const Captures& captures, const DeixisMap& deixis,
                   std::string_view template_name) {
  Tokens out;
  for (const auto& part : tmpl.parts) {
    if (const auto* lit = std::get_if<TemplateLiteral>(&part)) {
      out.push_back(lit->word);
      continue;
    }
    const auto& ref = std::get<TemplateRef>(part);
    if (ref.index == 0 || ref.index > captures.spans.size()) {
      throw ContentError("template '" + std::string(template_name) + "' refers to element " +
                         std::to_string(ref.index) + " but only " +
                         std::to_string(captures.spans.size()) + " were captured");
    }
    for (const auto& token : captures.spans[ref.index - 1]) {
      if (ref.invert) {
        auto it = deixis.find(token);
        out.push_back(it == deixis.end() ? token : it->second);
      } else {
        out.push_back(token);
      }
    }
  }
  return out;
}

}  // namespace gistline::transduction
