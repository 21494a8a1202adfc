#pragma once

// The turn loop: interpret, remember, answer, react, replan, advance.

#include "gistline/content.hpp"
#include "gistline/feedback.hpp"
#include "gistline/schema.hpp"
#include "gistline/transduction.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gistline::dialogue {

using transduction::GistClause;

inline constexpr int kFirstSession = 1;
inline constexpr int kLastSession = 10;
inline constexpr std::size_t kSubsessions = 3;

enum class OutputKind { Utterance, FeedbackText, SessionSummary, SessionOver };

std::string_view output_kind_name(OutputKind kind);
std::optional<OutputKind> parse_output_kind(std::string_view name);

/// Where an output item came from. `source` is one of say, subdialogue,
/// reaction, answer, fallback, redirect, feedback, summary, end; `ref` names
/// the schema episode (`schema#n`) or tree node (`tree#1.2`).
struct Provenance {
  std::string source;
  std::string ref;
  bool operator==(const Provenance&) const = default;
};

struct OutputItem {
  OutputKind kind = OutputKind::Utterance;
  std::string text;
  Provenance provenance;
  std::vector<std::string> advice_ids;  // FeedbackText: one id; SessionSummary: all, in order
  bool operator==(const OutputItem&) const = default;
};

struct AgentOutput {
  std::vector<OutputItem> items;
  std::vector<GistClause> gists;  // what this turn was understood as

  bool session_over() const { return !items.empty() && items.back().kind == OutputKind::SessionOver; }
  bool operator==(const AgentOutput&) const = default;
};

struct StoredGist {
  GistClause gist;
  std::size_t turn = 0;
  bool operator==(const StoredGist&) const = default;
};

struct SessionState {
  std::string user_id;
  int session_index = kFirstSession;
  std::uint64_t seed = 0;
  std::vector<std::string> topics;
  schema::Plan plan;
  std::vector<StoredGist> gist_memory;        // this session, non-nil only
  std::vector<GistClause> prior_gists;        // carried over from earlier sessions
  std::vector<feedback::SubsessionStats> subsession_stats;
  std::size_t subsession = 0;
  std::vector<feedback::Advice> advice;       // one per break, in issue order
  std::vector<std::string> persona_facts;
  std::optional<std::size_t> last_say;        // plan index of the last emitted Say
  std::size_t turns = 0;
  bool over = false;

  bool operator==(const SessionState&) const = default;
};

struct EngineConfig {
  transduction::DerivationConfig derivation;
  transduction::ReactionConfig reaction;
  feedback::Thresholds thresholds;
};

class Engine {
 public:
  explicit Engine(const content::ContentPack& pack, EngineConfig config = {});

  /// Concatenates the session's three topic schemas with a Break between
  /// each and emits everything up to the first expected user input.
  /// PreconditionError for a session index outside 1..10; ContentError when
  /// a scheduled topic or its schema is missing.
  std::pair<SessionState, AgentOutput> start_session(const std::string& user_id,
                                                     const content::Curriculum& curriculum,
                                                     int session_index, std::uint64_t seed,
                                                     std::vector<GistClause> prior_gists = {}) const;

  /// SessionOverError once the session has ended.
  AgentOutput handle_turn(SessionState& state, std::string_view user_text) const;

  /// Advice from both breaks in order, then a closing persona line.
  /// PreconditionError unless the plan has reached its End.
  std::string session_summary(const SessionState& state) const;

  /// Attach an externally computed nonverbal score (0..1) to the current
  /// subsession.
  void record_channel_score(SessionState& state, const std::string& channel, double score) const;

  const content::ContentPack& pack() const { return pack_; }
  const EngineConfig& config() const { return config_; }

 private:
  void advance(SessionState& state, AgentOutput& out, bool spliced_only) const;
  void emit_reaction(SessionState& state, AgentOutput& out, const transduction::ReactionResult& r,
                     std::string_view source) const;

  const content::ContentPack& pack_;
  EngineConfig config_;
};

/// Lowercase tokens as a sentence: capitalized, "i" upper-cased, closing
/// '?' when the first word opens a question and '.' otherwise.
std::string render_sentence(std::span<const transduction::Token> tokens);

}  // namespace gistline::dialogue
