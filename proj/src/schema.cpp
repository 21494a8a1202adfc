#include "gistline/schema.hpp"

#include "gistline/error.hpp"

namespace gistline::schema {

std::optional<Intensity> parse_intensity(std::string_view s) {
  if (s == "easy" || s == "1") return Intensity::Easy;
  if (s == "medium" || s == "2") return Intensity::Medium;
  if (s == "hard" || s == "3") return Intensity::Hard;
  return std::nullopt;
}

std::string_view intensity_name(Intensity i) {
  switch (i) {
    case Intensity::Easy: return "easy";
    case Intensity::Medium: return "medium";
    case Intensity::Hard: return "hard";
  }
  return "easy";
}

Episode Episode::say(std::string text, Tokens gist, std::string gist_tree,
                     std::string reaction_tree, std::vector<Pattern> answered) {
  return Episode{EpisodeKind::Say,          std::move(text),          std::move(gist),
                 std::move(gist_tree),      std::move(reaction_tree), std::move(answered)};
}

std::vector<std::string> check_structure(const DialogueSchema& schema) {
  std::vector<std::string> v;
  const auto where = [&](std::size_t i) {
    return "schema '" + schema.name + "' episode " + std::to_string(i + 1) + ": ";
  };
  const auto& eps = schema.episodes;
  if (eps.empty() || eps.back().kind != EpisodeKind::End) {
    v.push_back("schema '" + schema.name + "': must end with 'end'");
  }
  std::size_t ends = 0;
  std::size_t says = 0;
  std::size_t in_subsession = 0;
  const bool topic = !schema.topic.empty();
  const auto close_subsession = [&](std::size_t i) {
    if (topic && (in_subsession < kMinQuestionsPerSubsession ||
                  in_subsession > kMaxQuestionsPerSubsession)) {
      v.push_back(where(i) + "subsession has " + std::to_string(in_subsession) +
                  " questions, expected 3-5");
    }
    in_subsession = 0;
  };
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Episode& e = eps[i];
    const EpisodeKind prev = i == 0 ? EpisodeKind::Break : eps[i - 1].kind;
    switch (e.kind) {
      case EpisodeKind::Say:
        ++says;
        ++in_subsession;
        if (e.text.empty()) v.push_back(where(i) + "say has no text");
        if (e.gist.empty()) v.push_back(where(i) + "say has no canonical gist");
        if (e.gist_tree.empty() || e.reaction_tree.empty()) v.push_back(where(i) + "say has no trees");
        if (prev == EpisodeKind::Say) v.push_back(where(i) + "two says in a row");
        break;
      case EpisodeKind::ExpectUser:
        if (prev != EpisodeKind::Say) v.push_back(where(i) + "'user' must follow a say");
        break;
      case EpisodeKind::Break:
        close_subsession(i);
        break;
      case EpisodeKind::End:
        ++ends;
        if (i + 1 != eps.size()) v.push_back(where(i) + "'end' must be last");
        close_subsession(i);
        break;
    }
  }
  if (ends > 1) v.push_back("schema '" + schema.name + "': more than one 'end'");
  if (says == 0) v.push_back("schema '" + schema.name + "': empty body");
  return v;
}

Plan instantiate_plan(const DialogueSchema& schema) {
  Plan plan;
  plan.episodes.reserve(schema.episodes.size());
  for (std::size_t i = 0; i < schema.episodes.size(); ++i) {
    plan.episodes.push_back(PlannedEpisode{schema.episodes[i], schema.name, i, false, false});
  }
  return plan;
}

std::size_t apply_skip_edits(Plan& plan, std::span<const GistClause> memory,
                             const transduction::FeatureLexicon& lexicon) {
  std::size_t skipped = 0;
  for (std::size_t i = plan.cursor; i < plan.episodes.size(); ++i) {
    PlannedEpisode& pe = plan.episodes[i];
    if (pe.skipped || pe.episode.kind != EpisodeKind::Say) continue;
    const auto& patterns = pe.episode.answered;
    bool hit = false;
    for (std::size_t p = 0; p < patterns.size() && !hit; ++p) {
      for (const auto& gist : memory) {
        if (gist.kind == transduction::GistKind::Nil) continue;
        if (transduction::match(patterns[p], gist.tokens, lexicon)) {
          pe.skipped = true;
          plan.skip_log.push_back(SkipRecord{i, p, gist});
          ++skipped;
          hit = true;
          break;
        }
      }
    }
  }
  return skipped;
}

void splice_subschema(Plan& plan, const DialogueSchema& sub) {
  if (plan.splices_in_subsession >= kMaxSplicesPerSubsession) {
    throw OffTrackLimitError("off-track limit of " + std::to_string(kMaxSplicesPerSubsession) +
                             " subdialogues per subsession reached");
  }
  std::vector<PlannedEpisode> inserted;
  for (std::size_t i = 0; i < sub.episodes.size(); ++i) {
    if (sub.episodes[i].kind == EpisodeKind::End) continue;
    inserted.push_back(PlannedEpisode{sub.episodes[i], sub.name, i, true, false});
  }
  const auto at = static_cast<std::ptrdiff_t>(plan.cursor);
  plan.episodes.insert(plan.episodes.begin() + at, inserted.begin(), inserted.end());
  for (auto& rec : plan.skip_log) {
    if (rec.episode >= plan.cursor) rec.episode += inserted.size();
  }
  ++plan.splices_in_subsession;
}

void enter_next_subsession(Plan& plan) { plan.splices_in_subsession = 0; }

}  // namespace gistline::schema
