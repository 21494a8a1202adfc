#include "gistline/error.hpp"
#include "gistline/transduction.hpp"

#include <vector>

namespace gistline::transduction {

bool is_feature_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

void FeatureLexicon::add_word(const std::string& word, const std::vector<std::string>& features) {
  auto& set = word_features_[word];
  for (const auto& f : features) {
    if (!is_feature_name(f)) throw ContentError("invalid feature name '" + f + "'");
    set.insert(f);
  }
}

void FeatureLexicon::add_implication(const std::string& from, const std::string& to) {
  if (!is_feature_name(from) || !is_feature_name(to)) {
    throw ContentError("invalid feature name in implication '" + from + " => " + to + "'");
  }
  if (from == to || reaches(to, from)) {
    throw ContentError("feature implication cycle through '" + from + "' and '" + to + "'");
  }
  implications_[from].insert(to);
}

bool FeatureLexicon::reaches(std::string_view from, std::string_view to) const {
  std::vector<std::string_view> stack{from};
  std::set<std::string_view> seen;
  while (!stack.empty()) {
    const auto current = stack.back();
    stack.pop_back();
    if (current == to) return true;
    if (!seen.insert(current).second) continue;
    if (auto it = implications_.find(current); it != implications_.end()) {
      for (const auto& next : it->second) stack.push_back(next);
    }
  }
  return false;
}

bool FeatureLexicon::has_feature(std::string_view word, std::string_view feature) const {
  auto it = word_features_.find(word);
  if (it == word_features_.end()) return false;
  for (const auto& f : it->second) {
    if (reaches(f, feature)) return true;
  }
  return false;
}

bool FeatureLexicon::knows_feature(std::string_view feature) const {
  for (const auto& [word, features] : word_features_) {
    if (features.contains(feature)) return true;
  }
  for (const auto& [from, tos] : implications_) {
    if (from == feature || tos.contains(feature)) return true;
  }
  return false;
}

}  // namespace gistline::transduction
