#include "gistline/feedback.hpp"

#include "gistline/error.hpp"
#include "gistline/text.hpp"

#include <charconv>
#include <cstdio>

namespace gistline::feedback {

void ValenceLexicon::add(const std::string& word, double score) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw ContentError("valence for '" + word + "' outside [-1, 1]");
  }
  scores_[word] = score;
}

const double* ValenceLexicon::find(std::string_view word) const {
  auto it = scores_.find(word);
  return it == scores_.end() ? nullptr : &it->second;
}

ValenceLexicon parse_valence(std::string_view content, std::string_view source) {
  ValenceLexicon lexicon;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto words = text::split_ws(line);
    double score = 0.0;
    bool ok = words.size() == 2;
    if (ok) {
      const auto& s = words[1];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
      ok = ec == std::errc{} && ptr == s.data() + s.size();
    }
    try {
      if (!ok) throw ContentError("expected 'word <tab> score'");
      lexicon.add(words[0], score);
    } catch (const ContentError& e) {
      throw ContentError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lexicon;
}

std::string format_valence(const ValenceLexicon& lexicon) {
  std::string out;
  char buf[64];
  for (const auto& [word, score] : lexicon.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", score);
    out += word + "\t" + buf + "\n";
  }
  return out;
}

ValenceScore valence_score(std::span<const Token> tokens, const ValenceLexicon& lexicon) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : tokens) {
    if (const double* s = lexicon.find(t)) {
      sum += *s;
      ++n;
    }
  }
  return n == 0 ? ValenceScore{} : ValenceScore{sum / static_cast<double>(n), n};
}

void SubsessionStats::add_turn(std::span<const Token> tokens, const ValenceLexicon& lexicon) {
  ++turns;
  user_tokens += tokens.size();
  for (const auto& t : tokens) {
    if (const double* s = lexicon.find(t)) {
      valence_sum += *s;
      ++scored_tokens;
    }
  }
}

std::string_view advice_name(AdviceId id) {
  switch (id) {
    case AdviceId::Praise: return "praise";
    case AdviceId::NeutralTip: return "neutral-tip";
    case AdviceId::PositivityNudge: return "positivity-nudge";
  }
  return "neutral-tip";
}

std::optional<AdviceId> parse_advice_name(std::string_view name) {
  if (name == "praise") return AdviceId::Praise;
  if (name == "neutral-tip") return AdviceId::NeutralTip;
  if (name == "positivity-nudge") return AdviceId::PositivityNudge;
  return std::nullopt;
}

AdviceId band(double mean_valence, const Thresholds& thresholds) {
  if (mean_valence >= thresholds.praise_at) return AdviceId::Praise;
  if (mean_valence <= thresholds.nudge_at) return AdviceId::PositivityNudge;
  return AdviceId::NeutralTip;
}

AdviceTemplates::AdviceTemplates()
    : texts_{
          {"praise", "You sounded upbeat and positive. Keep sharing the things you enjoy."},
          {"neutral-tip",
           "You are doing fine. Try adding a little more about how you feel when you talk about "
           "something."},
          {"positivity-nudge",
           "Some of what you said sounded a bit down. It can help to mention something good, "
           "even a small thing."},
          {"summary-intro", "Here is a short look at your strong areas and what to work on."},
          {"summary-empty", "Thank you for talking with me today."},
          {"channel-strong", "Your {channel} was good."},
          {"channel-weak", "Try to pay a little more attention to your {channel}."},
      } {}

void AdviceTemplates::set(const std::string& key, std::string text) { texts_[key] = std::move(text); }

const std::string& AdviceTemplates::get(std::string_view key) const {
  auto it = texts_.find(key);
  if (it == texts_.end()) throw ContentError("no advice template '" + std::string(key) + "'");
  return it->second;
}

AdviceTemplates parse_advice(std::string_view content, std::string_view source) {
  AdviceTemplates templates;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto fields = text::split_fields(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ContentError(std::string(source) + ":" + std::to_string(line_no) +
                         ": expected 'id | text'");
    }
    templates.set(fields[0], fields[1]);
  }
  return templates;
}

std::string format_advice(const AdviceTemplates& templates) {
  std::string out;
  for (const auto& [key, value] : templates.entries()) out += key + " | " + value + "\n";
  return out;
}

namespace {

std::string fill_channel(std::string tmpl, const std::string& channel) {
  const std::string slot = "{channel}";
  std::string name = channel;
  for (char& c : name) {
    if (c == '_' || c == '-') c = ' ';
  }
  for (auto pos = tmpl.find(slot); pos != std::string::npos; pos = tmpl.find(slot, pos)) {
    tmpl.replace(pos, slot.size(), name);
    pos += name.size();
  }
  return tmpl;
}

}  // namespace

std::string Advice::full_text() const {
  std::string out = text;
  for (const auto& line : channel_lines) out += " " + line;
  return out;
}

Advice break_feedback(const SubsessionStats& stats, const AdviceTemplates& templates,
                      const Thresholds& thresholds) {
  Advice advice;
  advice.id = band(stats.mean_valence(), thresholds);
  advice.text = templates.get(advice_name(advice.id));
  for (const auto& [channel, score] : stats.external_channels) {
    const bool strong = score >= thresholds.channel_strong_at;
    advice.channel_lines.push_back(
        fill_channel(templates.get(strong ? "channel-strong" : "channel-weak"), channel));
  }
  return advice;
}

std::string render_summary(std::span<const Advice> advice, const AdviceTemplates& templates) {
  if (advice.empty()) return templates.get("summary-empty");
  std::string out = templates.get("summary-intro");
  for (const auto& a : advice) out += " " + a.full_text();
  return out;
}

}  // namespace gistline::feedback
