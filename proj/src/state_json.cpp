#include "gistline/error.hpp"
#include "gistline/serialize.hpp"

namespace gistline {

namespace transduction {

namespace {
std::string_view gist_kind_name(GistKind k) {
  switch (k) {
    case GistKind::Statement: return "statement";
    case GistKind::Question: return "question";
    case GistKind::Nil: return "nil";
  }
  return "nil";
}
}  // namespace

void to_json(nlohmann::json& j, const GistClause& gist) {
  j = {{"text", gist.text()}, {"kind", gist_kind_name(gist.kind)}};
}

void from_json(const nlohmann::json& j, GistClause& gist) {
  gist.tokens = tokenize(j.at("text").get<std::string>());
  const auto kind = j.at("kind").get<std::string>();
  gist.kind = kind == "statement" ? GistKind::Statement
              : kind == "question" ? GistKind::Question
                                   : GistKind::Nil;
  gist.trace.clear();
}

}  // namespace transduction

namespace schema {
namespace {

std::string_view episode_kind_name(EpisodeKind k) {
  switch (k) {
    case EpisodeKind::Say: return "say";
    case EpisodeKind::ExpectUser: return "user";
    case EpisodeKind::Break: return "break";
    case EpisodeKind::End: return "end";
  }
  return "end";
}

EpisodeKind parse_episode_kind(const std::string& s) {
  if (s == "say") return EpisodeKind::Say;
  if (s == "user") return EpisodeKind::ExpectUser;
  if (s == "break") return EpisodeKind::Break;
  if (s == "end") return EpisodeKind::End;
  throw Error("unknown episode kind '" + s + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const PlannedEpisode& pe) {
  const Episode& e = pe.episode;
  j = {{"kind", episode_kind_name(e.kind)},
       {"origin", pe.origin},
       {"origin_index", pe.origin_index},
       {"spliced", pe.spliced},
       {"skipped", pe.skipped}};
  if (e.kind == EpisodeKind::Say) {
    j["text"] = e.text;
    j["gist"] = transduction::join(e.gist);
    j["gist_tree"] = e.gist_tree;
    j["reaction_tree"] = e.reaction_tree;
    auto answered = nlohmann::json::array();
    for (const auto& p : e.answered) answered.push_back(transduction::format_pattern(p));
    j["answered"] = std::move(answered);
  }
}

void from_json(const nlohmann::json& j, PlannedEpisode& pe) {
  pe.episode = Episode{};
  pe.episode.kind = parse_episode_kind(j.at("kind").get<std::string>());
  pe.origin = j.at("origin").get<std::string>();
  pe.origin_index = j.at("origin_index").get<std::size_t>();
  pe.spliced = j.at("spliced").get<bool>();
  pe.skipped = j.at("skipped").get<bool>();
  if (pe.episode.kind == EpisodeKind::Say) {
    pe.episode.text = j.at("text").get<std::string>();
    pe.episode.gist = transduction::tokenize(j.at("gist").get<std::string>());
    pe.episode.gist_tree = j.at("gist_tree").get<std::string>();
    pe.episode.reaction_tree = j.at("reaction_tree").get<std::string>();
    for (const auto& p : j.at("answered")) {
      pe.episode.answered.push_back(transduction::parse_pattern(p.get<std::string>()));
    }
  }
}

void to_json(nlohmann::json& j, const SkipRecord& r) {
  j = {{"episode", r.episode}, {"pattern", r.pattern}, {"gist", r.gist}};
}

void from_json(const nlohmann::json& j, SkipRecord& r) {
  r.episode = j.at("episode").get<std::size_t>();
  r.pattern = j.at("pattern").get<std::size_t>();
  r.gist = j.at("gist").get<GistClause>();
}

void to_json(nlohmann::json& j, const Plan& plan) {
  j = {{"episodes", plan.episodes},
       {"cursor", plan.cursor},
       {"skip_log", plan.skip_log},
       {"splices_in_subsession", plan.splices_in_subsession}};
}

void from_json(const nlohmann::json& j, Plan& plan) {
  plan.episodes = j.at("episodes").get<std::vector<PlannedEpisode>>();
  plan.cursor = j.at("cursor").get<std::size_t>();
  plan.skip_log = j.at("skip_log").get<std::vector<SkipRecord>>();
  plan.splices_in_subsession = j.at("splices_in_subsession").get<std::size_t>();
}

}  // namespace schema

namespace feedback {

void to_json(nlohmann::json& j, const SubsessionStats& s) {
  j = {{"user_tokens", s.user_tokens},
       {"scored_tokens", s.scored_tokens},
       {"valence_sum", s.valence_sum},
       {"turns", s.turns},
       {"external_channels", s.external_channels}};
}

void from_json(const nlohmann::json& j, SubsessionStats& s) {
  s.user_tokens = j.at("user_tokens").get<std::size_t>();
  s.scored_tokens = j.at("scored_tokens").get<std::size_t>();
  s.valence_sum = j.at("valence_sum").get<double>();
  s.turns = j.at("turns").get<std::size_t>();
  s.external_channels = j.at("external_channels").get<std::map<std::string, double>>();
}

void to_json(nlohmann::json& j, const Advice& a) {
  j = {{"id", advice_name(a.id)}, {"text", a.text}, {"channel_lines", a.channel_lines}};
}

void from_json(const nlohmann::json& j, Advice& a) {
  const auto id = parse_advice_name(j.at("id").get<std::string>());
  if (!id) throw Error("unknown advice id");
  a.id = *id;
  a.text = j.at("text").get<std::string>();
  a.channel_lines = j.at("channel_lines").get<std::vector<std::string>>();
}

}  // namespace feedback

namespace dialogue {

void to_json(nlohmann::json& j, const OutputItem& item) {
  j = {{"kind", output_kind_name(item.kind)},
       {"text", item.text},
       {"source", item.provenance.source},
       {"ref", item.provenance.ref}};
  if (!item.advice_ids.empty()) j["advice_ids"] = item.advice_ids;
}

void from_json(const nlohmann::json& j, OutputItem& item) {
  const auto kind = parse_output_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown output kind");
  item.kind = *kind;
  item.text = j.at("text").get<std::string>();
  item.provenance.source = j.value("source", "");
  item.provenance.ref = j.value("ref", "");
  item.advice_ids = j.value("advice_ids", std::vector<std::string>{});
}

void to_json(nlohmann::json& j, const AgentOutput& out) {
  j = {{"items", out.items}, {"gists", out.gists}};
}

void from_json(const nlohmann::json& j, AgentOutput& out) {
  out.items = j.at("items").get<std::vector<OutputItem>>();
  out.gists = j.at("gists").get<std::vector<GistClause>>();
}

void to_json(nlohmann::json& j, const SessionState& s) {
  auto memory = nlohmann::json::array();
  for (const auto& g : s.gist_memory) memory.push_back({{"gist", g.gist}, {"turn", g.turn}});
  j = {{"user_id", s.user_id},
       {"session_index", s.session_index},
       {"seed", s.seed},
       {"topics", s.topics},
       {"plan", s.plan},
       {"gist_memory", std::move(memory)},
       {"prior_gists", s.prior_gists},
       {"subsession_stats", s.subsession_stats},
       {"subsession", s.subsession},
       {"advice", s.advice},
       {"persona_facts", s.persona_facts},
       {"turns", s.turns},
       {"over", s.over}};
  j["last_say"] = s.last_say ? nlohmann::json(*s.last_say) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, SessionState& s) {
  s.user_id = j.at("user_id").get<std::string>();
  s.session_index = j.at("session_index").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.topics = j.at("topics").get<std::vector<std::string>>();
  s.plan = j.at("plan").get<schema::Plan>();
  s.gist_memory.clear();
  for (const auto& m : j.at("gist_memory")) {
    s.gist_memory.push_back(StoredGist{m.at("gist").get<GistClause>(), m.at("turn").get<std::size_t>()});
  }
  s.prior_gists = j.at("prior_gists").get<std::vector<GistClause>>();
  s.subsession_stats = j.at("subsession_stats").get<std::vector<feedback::SubsessionStats>>();
  s.subsession = j.at("subsession").get<std::size_t>();
  s.advice = j.at("advice").get<std::vector<feedback::Advice>>();
  s.persona_facts = j.at("persona_facts").get<std::vector<std::string>>();
  s.turns = j.at("turns").get<std::size_t>();
  s.over = j.at("over").get<bool>();
  if (j.at("last_say").is_null()) {
    s.last_say.reset();
  } else {
    s.last_say = j.at("last_say").get<std::size_t>();
  }
}

}  // namespace dialogue
}  // namespace gistline
