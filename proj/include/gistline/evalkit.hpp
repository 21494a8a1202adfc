#pragma once

// Transcript exchange, de-identification, rater assignment, rating
// aggregation and per-transcript conversation metrics.

#include "gistline/feedback.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gistline::evalkit {

enum class Speaker { Agent, User, Feedback };
enum class Condition { Woz, Auto };

std::string_view speaker_name(Speaker s);
std::string_view condition_name(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

struct Turn {
  std::size_t index = 0;
  Speaker speaker = Speaker::Agent;
  std::string text;
  std::string timestamp;  // ISO-8601
  bool operator==(const Turn&) const = default;
};

struct Transcript {
  std::string id;
  std::optional<Condition> condition;  // hidden after de-identification
  std::vector<Turn> turns;
  bool operator==(const Transcript&) const = default;
};

/// `timestamp <tab> speaker <tab> text` lines, optional `# id=` and
/// `# condition=` header lines. Turn indices are assigned in file order.
Transcript parse_transcript(std::string_view text, std::string default_id = {});
std::string format_transcript(const Transcript& transcript);

/// Consecutive indices from 0 and nondecreasing timestamps.
std::vector<std::string> check_transcript(const Transcript& transcript);

// ---------------------------------------------------------------------------
// De-identification

using NameSet = std::set<std::string, std::less<>>;

/// One or more names per line, case-insensitive.
NameSet parse_names(std::string_view text);

/// Names become NAME, digit runs of five or more become NUMBER.
std::string deidentify_text(std::string_view text, const NameSet& names);

/// Distinct six-digit labels, a pure function of (count, seed).
std::vector<std::string> random_labels(std::size_t count, std::uint64_t seed);

struct DeidMapping {
  std::string label;
  std::string original_id;
  std::optional<Condition> condition;
};

/// Scrubs every turn, relabels the transcript and hides its condition.
Transcript deidentify(const Transcript& transcript, const NameSet& names, const std::string& label);

/// Labels come from the seed and the position in `transcripts`.
std::vector<Transcript> deidentify_all(const std::vector<Transcript>& transcripts,
                                       const NameSet& names, std::uint64_t seed,
                                       std::vector<DeidMapping>* mapping = nullptr);

// ---------------------------------------------------------------------------
// Rater assignment

struct AssignmentParams {
  std::size_t transcripts = 0;
  std::size_t raters = 0;
  std::size_t coverage = 0;  // raters per transcript
  std::size_t load = 0;      // transcripts per rater, at most
  std::uint64_t seed = 0;
};

struct Assignment {
  AssignmentParams params;
  std::vector<std::vector<std::size_t>> by_rater;  // rater -> transcript indices (sorted)
};

/// Seeded round-robin. Throws FeasibilityError when coverage*T > load*R or
/// coverage > R.
Assignment assign_raters(const AssignmentParams& params);

/// Coverage, load and no-duplicate checks; empty means valid.
std::vector<std::string> check_assignment(const Assignment& assignment);

// ---------------------------------------------------------------------------
// Ratings

inline constexpr std::size_t kCriteria = 6;
inline constexpr std::array<std::string_view, kCriteria> kCriterionNames = {
    "natural", "encouraging", "on_track", "relevant", "understanding", "polite"};

struct RatingSheet {
  std::string transcript;
  std::string rater;
  std::array<int, kCriteria> scores{};
  bool operator==(const RatingSheet&) const = default;
};

/// Header `transcript,rater,natural,encouraging,on_track,relevant,understanding,polite`.
/// Scores must be integers 1..5.
std::vector<RatingSheet> parse_sheets(std::string_view csv);

struct ReportRow {
  std::string_view criterion;
  double woz_mean = 0, woz_sd = 0, auto_mean = 0, auto_sd = 0;
  std::size_t woz_n = 0, auto_n = 0;

  double difference() const { return auto_mean - woz_mean; }
};

struct Report {
  std::vector<ReportRow> rows;  // one per criterion, in kCriterionNames order
  std::map<std::string, std::array<double, kCriteria>> consensus;
  std::vector<std::string> warnings;
  std::string sd_kind = "sample (n-1) SD over per-transcript consensus scores";

  /// Criterion with the largest AUTO - WOZ difference.
  std::string_view largest_difference() const;
};

/// Mean per criterion across raters for each transcript, then per-condition
/// mean and sample SD of those consensus scores. Transcripts without sheets
/// are excluded and listed in warnings. A sheet naming an unknown transcript,
/// or a rated transcript without a condition, is a PreconditionError.
Report aggregate(const std::vector<RatingSheet>& sheets, const std::vector<Transcript>& transcripts);

std::string format_report(const Report& report);

// ---------------------------------------------------------------------------
// Metrics

struct Verbosity {
  std::vector<std::size_t> per_user_turn;
  double mean = 0.0;
};

Verbosity verbosity(const Transcript& transcript);

struct TrajectoryPoint {
  std::size_t turn = 0;
  double raw = 0.0;
  double smoothed = 0.0;
};

/// Raw valence per USER turn and a trailing moving average over the last
/// `window` USER turns (fewer at the start).
std::vector<TrajectoryPoint> sentiment_trajectory(const Transcript& transcript,
                                                  const feedback::ValenceLexicon& valence,
                                                  std::size_t window);

}  // namespace gistline::evalkit
