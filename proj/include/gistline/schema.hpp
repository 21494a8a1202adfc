#pragma once

// Authored dialogue schemas and the live, editable plans built from them.

#include "gistline/transduction.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gistline::schema {

using transduction::GistClause;
using transduction::Pattern;
using transduction::Tokens;

enum class EpisodeKind { Say, ExpectUser, Break, End };

enum class Intensity { Easy = 1, Medium = 2, Hard = 3 };

std::optional<Intensity> parse_intensity(std::string_view s);
std::string_view intensity_name(Intensity i);

struct Episode {
  EpisodeKind kind = EpisodeKind::Say;
  std::string text;            // Say: surface text
  Tokens gist;                 // Say: canonical question gist
  std::string gist_tree;       // Say: tree interpreting the reply
  std::string reaction_tree;   // Say: tree reacting to the reply's gist
  std::vector<Pattern> answered;

  static Episode say(std::string text, Tokens gist, std::string gist_tree,
                     std::string reaction_tree, std::vector<Pattern> answered = {});
  static Episode user() { return Episode{EpisodeKind::ExpectUser, {}, {}, {}, {}, {}}; }
  static Episode brk() { return Episode{EpisodeKind::Break, {}, {}, {}, {}, {}}; }
  static Episode end() { return Episode{EpisodeKind::End, {}, {}, {}, {}, {}}; }

  bool operator==(const Episode&) const = default;
};

struct DialogueSchema {
  std::string name;
  std::string topic;                    // empty for subdialogues
  std::optional<Intensity> intensity;   // set on topic schemas
  std::vector<Episode> episodes;

  bool operator==(const DialogueSchema&) const = default;
};

/// Structural checks: a single trailing End, Say/ExpectUser alternation,
/// nonempty Say content, and 3-5 questions per subsession for topic schemas.
std::vector<std::string> check_structure(const DialogueSchema& schema);

inline constexpr std::size_t kMinQuestionsPerSubsession = 3;
inline constexpr std::size_t kMaxQuestionsPerSubsession = 5;
inline constexpr std::size_t kMaxSplicesPerSubsession = 3;

struct PlannedEpisode {
  Episode episode;
  std::string origin;           // schema the episode came from
  std::size_t origin_index = 0; // index inside that schema
  bool spliced = false;
  bool skipped = false;

  bool operator==(const PlannedEpisode&) const = default;
};

struct SkipRecord {
  std::size_t episode = 0;
  std::size_t pattern = 0;  // which answered pattern matched
  GistClause gist;

  bool operator==(const SkipRecord&) const = default;
};

struct Plan {
  std::vector<PlannedEpisode> episodes;
  std::size_t cursor = 0;
  std::vector<SkipRecord> skip_log;
  std::size_t splices_in_subsession = 0;

  bool at_end() const { return cursor >= episodes.size(); }
  bool operator==(const Plan&) const = default;
};

/// Fresh plan, cursor at 0. The schema must already be validated.
Plan instantiate_plan(const DialogueSchema& schema);

/// Marks every Say at or after the cursor whose answered patterns match a
/// remembered gist. Returns the number of newly skipped episodes.
std::size_t apply_skip_edits(Plan& plan, std::span<const GistClause> memory,
                             const transduction::FeatureLexicon& lexicon);

/// Inserts the subschema (minus its End) right at the cursor. Throws
/// OffTrackLimitError once the per-subsession splice budget is spent.
void splice_subschema(Plan& plan, const DialogueSchema& sub);

/// Called when the cursor passes a Break.
void enter_next_subsession(Plan& plan);

// Schema file format.
std::vector<DialogueSchema> parse_schemas(std::string_view text,
                                          std::string_view source = "<input>");
std::string format_schema(const DialogueSchema& schema);

}  // namespace gistline::schema
