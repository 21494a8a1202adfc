#pragma once

// Verbal-valence channel, break advice and the end-of-session summary.
// Nonverbal channels are never computed here; callers may attach externally
// computed scores in [0,1].

#include "gistline/transduction.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gistline::feedback {

using transduction::Token;

class ValenceLexicon {
 public:
  /// Throws ContentError for scores outside [-1, 1].
  void add(const std::string& word, double score);
  const double* find(std::string_view word) const;
  const std::map<std::string, double, std::less<>>& entries() const { return scores_; }
  bool operator==(const ValenceLexicon&) const = default;

 private:
  std::map<std::string, double, std::less<>> scores_;
};

/// `word <tab> score` lines.
ValenceLexicon parse_valence(std::string_view text, std::string_view source = "<input>");
std::string format_valence(const ValenceLexicon& lexicon);

struct ValenceScore {
  double mean = 0.0;
  std::size_t scored = 0;
};

/// Mean over the tokens present in the lexicon; (0, 0) when none are.
ValenceScore valence_score(std::span<const Token> tokens, const ValenceLexicon& lexicon);

struct SubsessionStats {
  std::size_t user_tokens = 0;
  std::size_t scored_tokens = 0;
  double valence_sum = 0.0;
  std::size_t turns = 0;
  std::map<std::string, double> external_channels;

  double mean_valence() const {
    return valence_sum / static_cast<double>(scored_tokens == 0 ? 1 : scored_tokens);
  }
  void add_turn(std::span<const Token> tokens, const ValenceLexicon& lexicon);
  bool operator==(const SubsessionStats&) const = default;
};

enum class AdviceId { Praise, NeutralTip, PositivityNudge };

std::string_view advice_name(AdviceId id);
std::optional<AdviceId> parse_advice_name(std::string_view name);

struct Thresholds {
  double praise_at = 0.2;   // mean >= praise_at -> praise
  double nudge_at = -0.2;   // mean <= nudge_at -> positivity-nudge
  double channel_strong_at = 0.5;
};

AdviceId band(double mean_valence, const Thresholds& thresholds = {});

/// `id | text` lines. Keys: praise, neutral-tip, positivity-nudge,
/// summary-intro, summary-empty, channel-strong, channel-weak. `{channel}` in
/// the channel lines is replaced by the channel name.
class AdviceTemplates {
 public:
  AdviceTemplates();  // built-in defaults
  void set(const std::string& key, std::string text);
  const std::string& get(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return texts_; }
  bool operator==(const AdviceTemplates&) const = default;

 private:
  std::map<std::string, std::string, std::less<>> texts_;
};

AdviceTemplates parse_advice(std::string_view text, std::string_view source = "<input>");
std::string format_advice(const AdviceTemplates& templates);

struct Advice {
  AdviceId id = AdviceId::NeutralTip;
  std::string text;
  std::vector<std::string> channel_lines;

  bool operator==(const Advice&) const = default;

  /// Advice text followed by any channel lines.
  std::string full_text() const;
};

Advice break_feedback(const SubsessionStats& stats, const AdviceTemplates& templates,
                      const Thresholds& thresholds = {});

/// Fixed framing line, then each advice text in issue order.
std::string render_summary(std::span<const Advice> advice, const AdviceTemplates& templates);

}  // namespace gistline::feedback
