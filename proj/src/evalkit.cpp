#include "gistline/evalkit.hpp"

#include "gistline/content.hpp"
#include "gistline/error.hpp"
#include "gistline/text.hpp"
#include "gistline/transduction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace gistline::evalkit {

std::string_view speaker_name(Speaker s) {
  switch (s) {
    case Speaker::Agent: return "AGENT";
    case Speaker::User: return "USER";
    case Speaker::Feedback: return "FEEDBACK";
  }
  return "AGENT";
}

std::string_view condition_name(Condition c) { return c == Condition::Woz ? "WOZ" : "AUTO"; }

std::optional<Condition> parse_condition(std::string_view s) {
  std::string up(s);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "WOZ") return Condition::Woz;
  if (up == "AUTO") return Condition::Auto;
  return std::nullopt;
}

namespace {

std::optional<Speaker> parse_speaker(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "AGENT") return Speaker::Agent;
  if (s == "USER") return Speaker::User;
  if (s == "FEEDBACK") return Speaker::Feedback;
  return std::nullopt;
}

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

Transcript parse_transcript(std::string_view content, std::string default_id) {
  Transcript t;
  t.id = std::move(default_id);
  std::size_t line_no = 0;
  for (const auto& line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (line.front() == '#') {
      const auto body = text::trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = text::trim(body.substr(0, eq));
      const auto value = text::trim(body.substr(eq + 1));
      if (key == "id") t.id = std::string(value);
      if (key == "condition") {
        t.condition = parse_condition(value);
        if (!t.condition) throw Error("line " + std::to_string(line_no) + ": unknown condition");
      }
      continue;
    }
    const auto first = line.find('\t');
    const auto second = first == std::string_view::npos ? first : line.find('\t', first + 1);
    if (second == std::string_view::npos) {
      throw Error("line " + std::to_string(line_no) + ": expected 'timestamp<TAB>speaker<TAB>text'");
    }
    const auto speaker = parse_speaker(line.substr(first + 1, second - first - 1));
    if (!speaker) throw Error("line " + std::to_string(line_no) + ": unknown speaker");
    t.turns.push_back(Turn{t.turns.size(), *speaker, std::string(line.substr(second + 1)),
                           std::string(line.substr(0, first))});
  }
  return t;
}

std::string format_transcript(const Transcript& t) {
  std::string out;
  if (!t.id.empty()) out += "# id=" + t.id + "\n";
  if (t.condition) out += "# condition=" + std::string(condition_name(*t.condition)) + "\n";
  for (const auto& turn : t.turns) {
    out += one_line(turn.timestamp) + "\t" + std::string(speaker_name(turn.speaker)) + "\t" +
           one_line(turn.text) + "\n";
  }
  return out;
}

std::vector<std::string> check_transcript(const Transcript& t) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < t.turns.size(); ++i) {
    if (t.turns[i].index != i) v.push_back("turn " + std::to_string(i) + ": index is " + std::to_string(t.turns[i].index));
    // ISO-8601 in one zone and format orders lexicographically.
    if (i > 0 && t.turns[i].timestamp < t.turns[i - 1].timestamp) {
      v.push_back("turn " + std::to_string(i) + ": timestamp goes backwards");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

NameSet parse_names(std::string_view content) {
  NameSet names;
  for (const auto& line : text::split_lines(content)) {
    const auto body = text::trim(text::strip_comment(line));
    for (auto word : text::split_ws(body)) {
      for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      names.insert(word);
    }
  }
  return names;
}

std::string deidentify_text(std::string_view s, const NameSet& names) {
  std::string out;
  std::size_t i = 0;
  const auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < s.size()) {
    std::size_t j = i;
    if (is_alpha(s[i])) {
      while (j < s.size() && is_alpha(s[j])) ++j;
      const auto word = s.substr(i, j - i);
      std::string lower(word);
      for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      const bool placeholder = word == "NAME" || word == "NUMBER";
      out += (!placeholder && names.contains(lower)) ? std::string("NAME") : std::string(word);
    } else if (is_digit(s[i])) {
      while (j < s.size() && is_digit(s[j])) ++j;
      out += (j - i >= 5) ? std::string("NUMBER") : std::string(s.substr(i, j - i));
    } else {
      out.push_back(s[i]);
      j = i + 1;
    }
    i = j;
  }
  return out;
}

std::vector<std::string> random_labels(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::uint64_t> used;
  std::vector<std::string> labels;
  while (labels.size() < count) {
    const std::uint64_t n = 100000 + rng() % 900000;
    if (used.insert(n).second) labels.push_back(std::to_string(n));
  }
  return labels;
}

Transcript deidentify(const Transcript& transcript, const NameSet& names, const std::string& label) {
  Transcript out;
  out.id = label;
  out.turns = transcript.turns;
  for (auto& turn : out.turns) turn.text = deidentify_text(turn.text, names);
  return out;
}

std::vector<Transcript> deidentify_all(const std::vector<Transcript>& transcripts,
                                       const NameSet& names, std::uint64_t seed,
                                       std::vector<DeidMapping>* mapping) {
  const auto labels = random_labels(transcripts.size(), seed);
  std::vector<Transcript> out;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    out.push_back(deidentify(transcripts[i], names, labels[i]));
    if (mapping) mapping->push_back(DeidMapping{labels[i], transcripts[i].id, transcripts[i].condition});
  }
  return out;
}

// ---------------------------------------------------------------------------

Assignment assign_raters(const AssignmentParams& p) {
  const std::size_t needed = p.coverage * p.transcripts;
  const std::size_t capacity = p.load * p.raters;
  if (needed > capacity) {
    throw FeasibilityError("infeasible rater assignment: coverage*T = " + std::to_string(needed) +
                           " exceeds load*R = " + std::to_string(capacity));
  }
  if (p.coverage > p.raters) {
    throw FeasibilityError("infeasible rater assignment: coverage " + std::to_string(p.coverage) +
                           " exceeds the " + std::to_string(p.raters) + " available raters");
  }
  std::vector<std::size_t> transcripts(p.transcripts);
  std::iota(transcripts.begin(), transcripts.end(), 0);
  std::vector<std::size_t> raters(p.raters);
  std::iota(raters.begin(), raters.end(), 0);
  content::seeded_shuffle(transcripts, p.seed);
  content::seeded_shuffle(raters, p.seed ^ 0x9e3779b97f4a7c15ULL);

  // Slot k goes to rater k mod R, so the c slots of one transcript land on c
  // distinct raters and loads differ by at most one.
  Assignment a;
  a.params = p;
  a.by_rater.resize(p.raters);
  for (std::size_t k = 0; k < needed; ++k) {
    a.by_rater[raters[k % p.raters]].push_back(transcripts[k / p.coverage]);
  }
  for (auto& list : a.by_rater) std::sort(list.begin(), list.end());
  return a;
}

std::vector<std::string> check_assignment(const Assignment& a) {
  std::vector<std::string> v;
  const auto& p = a.params;
  if (a.by_rater.size() != p.raters) v.push_back("rater count mismatch");
  std::vector<std::size_t> cover(p.transcripts, 0);
  for (std::size_t r = 0; r < a.by_rater.size(); ++r) {
    const auto& list = a.by_rater[r];
    if (list.size() > p.load) {
      v.push_back("rater " + std::to_string(r + 1) + " has " + std::to_string(list.size()) +
                  " transcripts, load is " + std::to_string(p.load));
    }
    std::set<std::size_t> seen;
    for (std::size_t t : list) {
      if (t >= p.transcripts) {
        v.push_back("rater " + std::to_string(r + 1) + " has unknown transcript " + std::to_string(t));
        continue;
      }
      if (!seen.insert(t).second) {
        v.push_back("rater " + std::to_string(r + 1) + " rates transcript " + std::to_string(t) + " twice");
        continue;
      }
      ++cover[t];
    }
  }
  for (std::size_t t = 0; t < cover.size(); ++t) {
    if (cover[t] < p.coverage) {
      v.push_back("transcript " + std::to_string(t) + " has " + std::to_string(cover[t]) +
                  " raters, coverage is " + std::to_string(p.coverage));
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

std::vector<RatingSheet> parse_sheets(std::string_view csv) {
  std::vector<RatingSheet> sheets;
  bool header = true;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(csv)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    const auto fields = text::split_fields(line, ',');
    const auto where = "sheets line " + std::to_string(line_no) + ": ";
    if (header) {
      if (fields.size() != kCriteria + 2 || fields[0] != "transcript" || fields[1] != "rater") {
        throw Error(where + "expected header 'transcript,rater,natural,...,polite'");
      }
      for (std::size_t c = 0; c < kCriteria; ++c) {
        if (fields[c + 2] != kCriterionNames[c]) throw Error(where + "unexpected column '" + fields[c + 2] + "'");
      }
      header = false;
      continue;
    }
    if (fields.size() != kCriteria + 2) throw Error(where + "expected 8 fields");
    RatingSheet sheet{fields[0], fields[1], {}};
    for (std::size_t c = 0; c < kCriteria; ++c) {
      const auto& f = fields[c + 2];
      if (f.size() != 1 || f[0] < '1' || f[0] > '5') {
        throw Error(where + std::string(kCriterionNames[c]) + " must be an integer 1..5, got '" + f + "'");
      }
      sheet.scores[c] = f[0] - '0';
    }
    sheets.push_back(std::move(sheet));
  }
  return sheets;
}

std::string_view Report::largest_difference() const {
  std::string_view best;
  double best_diff = -INFINITY;
  for (const auto& row : rows) {
    if (row.difference() > best_diff) {
      best_diff = row.difference();
      best = row.criterion;
    }
  }
  return best;
}

namespace {

struct MeanSd {
  double mean = NAN;
  double sd = NAN;
};

// Sorting first makes the sums independent of input order.
MeanSd mean_sd(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  MeanSd r;
  r.mean = sum / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

}  // namespace

Report aggregate(const std::vector<RatingSheet>& sheets, const std::vector<Transcript>& transcripts) {
  std::map<std::string, const Transcript*> known;
  for (const auto& t : transcripts) known[t.id] = &t;

  std::map<std::string, std::vector<const RatingSheet*>> by_transcript;
  for (const auto& s : sheets) {
    if (!known.contains(s.transcript)) {
      throw PreconditionError("rating sheet references unknown transcript '" + s.transcript + "'");
    }
    by_transcript[s.transcript].push_back(&s);
  }

  Report report;
  std::array<std::vector<double>, kCriteria> woz;
  std::array<std::vector<double>, kCriteria> automatic;
  for (const auto& [id, t] : known) {
    auto it = by_transcript.find(id);
    if (it == by_transcript.end()) {
      report.warnings.push_back("transcript '" + id + "' has no rating sheets; excluded");
      continue;
    }
    if (!t->condition) throw PreconditionError("transcript '" + id + "' has no condition");
    std::array<double, kCriteria> consensus{};
    for (std::size_t c = 0; c < kCriteria; ++c) {
      std::vector<int> scores;
      for (const auto* s : it->second) scores.push_back(s->scores[c]);
      std::sort(scores.begin(), scores.end());
      double sum = 0.0;
      for (int x : scores) sum += x;
      consensus[c] = sum / static_cast<double>(scores.size());
      (*t->condition == Condition::Woz ? woz : automatic)[c].push_back(consensus[c]);
    }
    report.consensus[id] = consensus;
  }
  for (std::size_t c = 0; c < kCriteria; ++c) {
    const auto w = mean_sd(woz[c]);
    const auto a = mean_sd(automatic[c]);
    report.rows.push_back(ReportRow{kCriterionNames[c], w.mean, w.sd, a.mean, a.sd, woz[c].size(),
                                    automatic[c].size()});
  }
  return report;
}

std::string format_report(const Report& report) {
  const auto num = [](double x) {
    if (std::isnan(x)) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return std::string(buf);
  };
  std::string out = "# sd: " + report.sd_kind + "\n";
  for (const auto& w : report.warnings) out += "# warning: " + w + "\n";
  out += "criterion,woz_mean,woz_sd,auto_mean,auto_sd,difference,woz_n,auto_n\n";
  for (const auto& r : report.rows) {
    out += std::string(r.criterion) + "," + num(r.woz_mean) + "," + num(r.woz_sd) + "," +
           num(r.auto_mean) + "," + num(r.auto_sd) + "," + num(r.difference()) + "," +
           std::to_string(r.woz_n) + "," + std::to_string(r.auto_n) + "\n";
  }
  out += "# largest difference: " + std::string(report.largest_difference()) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

Verbosity verbosity(const Transcript& transcript) {
  Verbosity v;
  for (const auto& turn : transcript.turns) {
    if (turn.speaker == Speaker::User) v.per_user_turn.push_back(transduction::tokenize(turn.text).size());
  }
  if (!v.per_user_turn.empty()) {
    double sum = 0.0;
    for (auto n : v.per_user_turn) sum += static_cast<double>(n);
    v.mean = sum / static_cast<double>(v.per_user_turn.size());
  }
  return v;
}

std::vector<TrajectoryPoint> sentiment_trajectory(const Transcript& transcript,
                                                  const feedback::ValenceLexicon& valence,
                                                  std::size_t window) {
  if (window == 0) throw PreconditionError("trajectory window must be at least 1");
  std::vector<TrajectoryPoint> series;
  for (const auto& turn : transcript.turns) {
    if (turn.speaker != Speaker::User) continue;
    const auto tokens = transduction::tokenize(turn.text);
    series.push_back(TrajectoryPoint{turn.index, feedback::valence_score(tokens, valence).mean, 0.0});
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t from = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = from; k <= i; ++k) sum += series[k].raw;
    series[i].smoothed = sum / static_cast<double>(i - from + 1);
  }
  return series;
}

}  // namespace gistline::evalkit
