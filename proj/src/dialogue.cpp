#include "gistline/dialogue.hpp"

#include "gistline/error.hpp"

#include <random>
#include <set>

namespace gistline::dialogue {

using schema::EpisodeKind;
using transduction::GistKind;

std::string_view output_kind_name(OutputKind kind) {
  switch (kind) {
    case OutputKind::Utterance: return "utterance";
    case OutputKind::FeedbackText: return "feedback";
    case OutputKind::SessionSummary: return "summary";
    case OutputKind::SessionOver: return "session_over";
  }
  return "utterance";
}

std::optional<OutputKind> parse_output_kind(std::string_view name) {
  for (auto k : {OutputKind::Utterance, OutputKind::FeedbackText, OutputKind::SessionSummary,
                 OutputKind::SessionOver}) {
    if (output_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string render_sentence(std::span<const transduction::Token> tokens) {
  static const std::set<std::string, std::less<>> openers = {
      "what", "where", "when", "who",   "why",   "how", "which", "do",   "does",
      "did",  "are",   "is",   "have",  "has",   "can", "could", "would", "will"};
  if (tokens.empty()) return {};
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    if (t == "i" || t.rfind("i'", 0) == 0) {
      out += 'I' + t.substr(1);
    } else {
      out += t;
    }
  }
  if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  out.push_back(openers.contains(tokens.front()) ? '?' : '.');
  return out;
}

namespace {

std::string trace_ref(const std::vector<transduction::TraceHop>& trace) {
  if (trace.empty()) return {};
  const auto& hop = trace.back();
  std::string ref = hop.tree;
  for (std::size_t i = 0; i < hop.path.size(); ++i) {
    ref += (i == 0 ? '#' : '.');
    ref += std::to_string(hop.path[i] + 1);
  }
  return ref;
}

std::vector<GistClause> memory_view(const SessionState& state) {
  std::vector<GistClause> all = state.prior_gists;
  for (const auto& g : state.gist_memory) all.push_back(g.gist);
  return all;
}

}  // namespace

Engine::Engine(const content::ContentPack& pack, EngineConfig config)
    : pack_(pack), config_(std::move(config)) {}

std::pair<SessionState, AgentOutput> Engine::start_session(const std::string& user_id,
                                                           const content::Curriculum& curriculum,
                                                           int session_index, std::uint64_t seed,
                                                           std::vector<GistClause> prior_gists) const {
  if (session_index < kFirstSession || session_index > kLastSession) {
    throw PreconditionError("session index " + std::to_string(session_index) + " outside 1..10");
  }
  if (curriculum.sessions.size() < static_cast<std::size_t>(session_index)) {
    throw PreconditionError("curriculum has no session " + std::to_string(session_index));
  }

  SessionState state;
  state.user_id = user_id;
  state.session_index = session_index;
  state.seed = seed;
  state.prior_gists = std::move(prior_gists);
  state.subsession_stats.resize(kSubsessions);
  state.persona_facts = pack_.persona.facts;

  const auto& topic_ids = curriculum.sessions[static_cast<std::size_t>(session_index - 1)];
  for (std::size_t t = 0; t < topic_ids.size(); ++t) {
    const content::Topic* topic = pack_.find_topic(topic_ids[t]);
    if (topic == nullptr) throw ContentError("scheduled topic '" + topic_ids[t] + "' is not in the pack");
    const schema::DialogueSchema* s = pack_.find_schema(topic->schema);
    if (s == nullptr) {
      throw ContentError("topic '" + topic->id + "' has no schema '" + topic->schema + "'");
    }
    state.topics.push_back(topic->id);
    schema::Plan part = schema::instantiate_plan(*s);
    for (auto& pe : part.episodes) {
      if (pe.episode.kind == EpisodeKind::End) continue;
      state.plan.episodes.push_back(std::move(pe));
    }
    const bool last = t + 1 == topic_ids.size();
    state.plan.episodes.push_back(schema::PlannedEpisode{
        last ? schema::Episode::end() : schema::Episode::brk(), "session", t, false, false});
  }

  const auto memory = memory_view(state);
  schema::apply_skip_edits(state.plan, memory, pack_.lexicon);

  AgentOutput out;
  advance(state, out, false);
  return {std::move(state), std::move(out)};
}

AgentOutput Engine::handle_turn(SessionState& state, std::string_view user_text) const {
  if (state.over) throw SessionOverError("session " + std::to_string(state.session_index) + " is over");

  auto& plan = state.plan;
  if (!plan.at_end() && plan.episodes[plan.cursor].episode.kind == EpisodeKind::ExpectUser) {
    ++plan.cursor;
  }
  const std::size_t turn = state.turns++;

  // Interpretation context: the question the user is answering.
  std::string gist_tree = config_.reaction.fallback_tree;
  std::string reaction_tree = config_.reaction.fallback_tree;
  if (state.last_say) {
    const auto& say = plan.episodes[*state.last_say].episode;
    gist_tree = say.gist_tree;
    reaction_tree = say.reaction_tree;
  }

  const auto sentences = transduction::tokenize_sentences(user_text);
  AgentOutput out;
  out.gists = transduction::derive_gists(pack_.trees, gist_tree, sentences, pack_.lexicon,
                                         config_.derivation);
  for (const auto& g : out.gists) {
    if (g.kind != GistKind::Nil) state.gist_memory.push_back(StoredGist{g, turn});
  }

  if (state.subsession < state.subsession_stats.size()) {
    state.subsession_stats[state.subsession].add_turn(transduction::tokenize(user_text), pack_.valence);
  }

  const auto targets = transduction::select_reaction_targets(out.gists);

  // Answer the user's questions first.
  for (std::size_t qi : targets.questions) {
    auto r = transduction::derive_reaction(pack_.trees, out.gists[qi], reaction_tree, pack_.lexicon,
                                           config_.reaction);
    emit_reaction(state, out, r, "answer");
    if (std::holds_alternative<transduction::SchemaRequest>(r)) advance(state, out, true);
  }

  // Then comment on what they told us.
  if (targets.statement) {
    auto r = transduction::derive_reaction(pack_.trees, out.gists[*targets.statement], reaction_tree,
                                           pack_.lexicon, config_.reaction);
    if (std::holds_alternative<std::monostate>(r)) {
      r = transduction::derive_reaction(pack_.trees, GistClause::nil(), reaction_tree, pack_.lexicon,
                                        config_.reaction);
      emit_reaction(state, out, r, "fallback");
    } else {
      emit_reaction(state, out, r, out.gists[*targets.statement].kind == GistKind::Nil ? "fallback"
                                                                                         : "reaction");
    }
  }

  const auto memory = memory_view(state);
  schema::apply_skip_edits(plan, memory, pack_.lexicon);
  advance(state, out, false);
  return out;
}

void Engine::emit_reaction(SessionState& state, AgentOutput& out,
                           const transduction::ReactionResult& r, std::string_view source) const {
  if (const auto* reaction = std::get_if<transduction::Reaction>(&r)) {
    if (reaction->tokens.empty()) return;
    out.items.push_back(OutputItem{OutputKind::Utterance, render_sentence(reaction->tokens),
                                   Provenance{std::string(source), trace_ref(reaction->trace)}, {}});
    return;
  }
  const auto* request = std::get_if<transduction::SchemaRequest>(&r);
  if (request == nullptr) return;
  const schema::DialogueSchema* sub = pack_.find_schema(request->name);
  if (sub == nullptr) throw ContentError("requested schema '" + request->name + "' does not exist");
  try {
    schema::splice_subschema(state.plan, *sub);
  } catch (const OffTrackLimitError&) {
    out.items.push_back(OutputItem{OutputKind::Utterance, pack_.persona.redirect,
                                   Provenance{"redirect", request->name}, {}});
  }
}

void Engine::advance(SessionState& state, AgentOutput& out, bool spliced_only) const {
  auto& plan = state.plan;
  while (!plan.at_end()) {
    auto& pe = plan.episodes[plan.cursor];
    if (spliced_only && !pe.spliced) return;
    if (pe.skipped) {
      ++plan.cursor;
      if (!plan.at_end() && plan.episodes[plan.cursor].episode.kind == EpisodeKind::ExpectUser) {
        ++plan.cursor;
      }
      continue;
    }
    switch (pe.episode.kind) {
      case EpisodeKind::Say:
        out.items.push_back(OutputItem{
            OutputKind::Utterance, pe.episode.text,
            Provenance{pe.spliced ? "subdialogue" : "say",
                       pe.origin + "#" + std::to_string(pe.origin_index + 1)},
            {}});
        state.last_say = plan.cursor;
        ++plan.cursor;
        break;
      case EpisodeKind::ExpectUser:
        return;
      case EpisodeKind::Break: {
        feedback::SubsessionStats stats;
        if (state.subsession < state.subsession_stats.size()) {
          stats = state.subsession_stats[state.subsession];
        }
        auto advice = feedback::break_feedback(stats, pack_.advice, config_.thresholds);
        out.items.push_back(OutputItem{OutputKind::FeedbackText, advice.full_text(),
                                       Provenance{"feedback", std::string(feedback::advice_name(advice.id))},
                                       {std::string(feedback::advice_name(advice.id))}});
        state.advice.push_back(std::move(advice));
        ++state.subsession;
        schema::enter_next_subsession(plan);
        ++plan.cursor;
        break;
      }
      case EpisodeKind::End: {
        OutputItem summary{OutputKind::SessionSummary, session_summary(state),
                           Provenance{"summary", "session-" + std::to_string(state.session_index)},
                           {}};
        for (const auto& a : state.advice) summary.advice_ids.emplace_back(feedback::advice_name(a.id));
        out.items.push_back(std::move(summary));
        out.items.push_back(OutputItem{OutputKind::SessionOver, {}, Provenance{"end", {}}, {}});
        state.over = true;
        ++plan.cursor;
        return;
      }
    }
  }
}

std::string Engine::session_summary(const SessionState& state) const {
  const auto& plan = state.plan;
  const bool at_end = state.over || (!plan.at_end() &&
                                     plan.episodes[plan.cursor].episode.kind == EpisodeKind::End);
  if (!at_end) throw PreconditionError("session summary requested before the session's end");
  std::string text = feedback::render_summary(state.advice, pack_.advice);
  const auto& closings = pack_.persona.closings;
  if (!closings.empty()) {
    std::mt19937_64 rng(state.seed ^ static_cast<std::uint64_t>(state.session_index));
    text += " " + closings[static_cast<std::size_t>(rng() % closings.size())];
  }
  return text;
}

void Engine::record_channel_score(SessionState& state, const std::string& channel, double score) const {
  if (!(score >= 0.0 && score <= 1.0)) throw PreconditionError("channel score outside [0, 1]");
  if (state.subsession < state.subsession_stats.size()) {
    state.subsession_stats[state.subsession].external_channels[channel] = score;
  }
}

}  // namespace gistline::dialogue
