#include "gistline/error.hpp"
#include "gistline/transduction.hpp"

namespace gistline::transduction {

std::vector<Tokens> split_clauses(std::span<const Token> input,
                                  const std::set<Token, std::less<>>& separators) {
  std::vector<Tokens> clauses;
  Tokens current;
  for (const auto& token : input) {
    if (separators.contains(token)) {
      if (!current.empty()) clauses.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(token);
    }
  }
  if (!current.empty()) clauses.push_back(std::move(current));
  return clauses;
}

std::vector<GistClause> derive_gists(const TreeSet& trees, std::string_view context_tree,
                                     std::span<const Tokens> sentences,
                                     const FeatureLexicon& lexicon,
                                     const DerivationConfig& config) {
  if (!trees.contains(context_tree)) {
    throw ContentError("context tree '" + std::string(context_tree) + "' does not exist");
  }
  const bool detect_questions = trees.contains(config.question_tree);

  std::vector<GistClause> gists;
  for (const auto& sentence : sentences) {
    for (const auto& clause : split_clauses(sentence, config.separators)) {
      if (detect_questions) {
        if (auto q = evaluate(trees, config.question_tree, clause, lexicon)) {
          if (q->kind != DirectiveKind::Gist) {
            throw ContentError("question tree '" + config.question_tree + "' produced a non-gist");
          }
          gists.push_back(GistClause{std::move(q->tokens), GistKind::Question, std::move(q->trace)});
          continue;
        }
      }
      if (auto s = evaluate(trees, context_tree, clause, lexicon)) {
        if (s->kind != DirectiveKind::Gist) {
          throw ContentError("gist tree '" + std::string(context_tree) + "' produced a non-gist");
        }
        gists.push_back(GistClause{std::move(s->tokens), GistKind::Statement, std::move(s->trace)});
      }
    }
  }
  if (gists.empty()) gists.push_back(GistClause::nil());
  return gists;
}

std::vector<GistClause> derive_gists(const TreeSet& trees, std::string_view context_tree,
                                     std::span<const Token> input, const FeatureLexicon& lexicon,
                                     const DerivationConfig& config) {
  std::vector<Tokens> sentences;
  if (!input.empty()) sentences.emplace_back(input.begin(), input.end());
  return derive_gists(trees, context_tree, sentences, lexicon, config);
}

ReactionResult derive_reaction(const TreeSet& trees, const GistClause& gist,
                               std::string_view reaction_tree, const FeatureLexicon& lexicon,
                               const ReactionConfig& config) {
  std::string_view tree = reaction_tree;
  if (gist.kind == GistKind::Nil) tree = config.fallback_tree;
  if (gist.kind == GistKind::Question) tree = config.answer_tree;
  if (!trees.contains(tree)) {
    throw ContentError("reaction tree '" + std::string(tree) + "' does not exist");
  }
  auto result = evaluate(trees, tree, gist.tokens, lexicon);
  if (!result) return std::monostate{};
  switch (result->kind) {
    case DirectiveKind::Reaction:
      return Reaction{std::move(result->tokens), std::move(result->trace)};
    case DirectiveKind::Schema:
      return SchemaRequest{std::move(result->schema), std::move(result->trace)};
    default:
      throw ContentError("reaction tree '" + std::string(tree) + "' produced a gist");
  }
}

ReactionTargets select_reaction_targets(std::span<const GistClause> gists) {
  ReactionTargets targets;
  for (std::size_t i = 0; i < gists.size(); ++i) {
    if (gists[i].kind == GistKind::Question) {
      targets.questions.push_back(i);
    } else if (!targets.statement) {
      // a lone nil gist is reacted to through the fallback tree
      targets.statement = i;
    }
  }
  return targets;
}

}  // namespace gistline::transduction
