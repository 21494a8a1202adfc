#pragma once

// Pattern language, feature lexicon, matcher, output templates and the
// hierarchical transduction trees that turn utterances into gist clauses
// and gist clauses into reactions.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gistline::transduction {

using Token = std::string;
using Tokens = std::vector<Token>;

/// Lowercases, drops punctuation (apostrophes inside a word survive) and
/// splits on whitespace.
Tokens tokenize(std::string_view text);

/// Splits raw text at sentence punctuation (. ? ! ;) and tokenizes each
/// piece. Empty sentences are dropped.
std::vector<Tokens> tokenize_sentences(std::string_view text);

std::string join(std::span<const Token> tokens);

// ---------------------------------------------------------------------------

class FeatureLexicon {
 public:
  void add_word(const std::string& word, const std::vector<std::string>& features);

  /// Throws ContentError if the implication would close a cycle.
  void add_implication(const std::string& from, const std::string& to);

  /// True if `feature` is in the implication closure of the word's features.
  bool has_feature(std::string_view word, std::string_view feature) const;

  /// True if any word carries the feature or any implication mentions it.
  bool knows_feature(std::string_view feature) const;

  const std::map<std::string, std::set<std::string, std::less<>>, std::less<>>& word_features() const {
    return word_features_;
  }
  const std::map<std::string, std::set<std::string, std::less<>>, std::less<>>& implications() const {
    return implications_;
  }

  bool operator==(const FeatureLexicon&) const = default;

 private:
  bool reaches(std::string_view from, std::string_view to) const;

  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> word_features_;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> implications_;
};

bool is_feature_name(std::string_view name);

// ---------------------------------------------------------------------------

struct Literal {
  Token word;
  bool operator==(const Literal&) const = default;
};

struct Wildcard {
  std::optional<std::size_t> max_len;  // nullopt: unbounded
  bool operator==(const Wildcard&) const = default;
};

struct Feature {
  std::string name;
  bool operator==(const Feature&) const = default;
};

using PatternElement = std::variant<Literal, Wildcard, Feature>;

struct Pattern {
  std::vector<PatternElement> elements;

  std::size_t arity() const { return elements.size(); }
  bool operator==(const Pattern&) const = default;
};

struct Captures {
  std::vector<Tokens> spans;  // one per pattern element
  bool operator==(const Captures&) const = default;
};

/// Left-to-right assignment, wildcards shortest-first with backtracking.
/// The whole input must be consumed. Returns the first complete match.
std::optional<Captures> match(const Pattern& pattern, std::span<const Token> input,
                              const FeatureLexicon& lexicon);

// ---------------------------------------------------------------------------

struct TemplateLiteral {
  Token word;
  bool operator==(const TemplateLiteral&) const = default;
};

struct TemplateRef {
  std::size_t index;  // 1-based pattern element index
  bool invert = false;
  bool operator==(const TemplateRef&) const = default;
};

using TemplatePart = std::variant<TemplateLiteral, TemplateRef>;

struct Template {
  std::vector<TemplatePart> parts;

  std::size_t max_ref() const;
  bool operator==(const Template&) const = default;
};

using DeixisMap = std::map<Token, Token, std::less<>>;

/// i->you, you->i, my->your, your->my, me->you, am->are, are->am,
/// mine->yours, yours->mine.
const DeixisMap& default_deixis();

/// Throws ContentError naming `template_name` when a ref is out of range.
Tokens instantiate(const Template& tmpl, const Captures& captures, const DeixisMap& deixis,
                   std::string_view template_name = {});

// ---------------------------------------------------------------------------

enum class DirectiveKind { Gist, Reaction, Subtree, Schema };

struct Directive {
  DirectiveKind kind = DirectiveKind::Gist;
  Template tmpl;                     // Gist, Reaction
  std::string target;                // Subtree tree name, Schema name
  std::optional<std::size_t> scope;  // Subtree: span to pass down; nullopt = whole input
  bool operator==(const Directive&) const = default;
};

struct TreeNode {
  Pattern pattern;
  std::optional<Directive> directive;  // set on terminals
  std::vector<TreeNode> children;      // set on inner nodes
  bool operator==(const TreeNode&) const = default;
};

struct TransductionTree {
  std::string name;
  std::vector<TreeNode> nodes;
  bool operator==(const TransductionTree&) const = default;
};

class TreeSet {
 public:
  /// Throws ContentError on duplicate names.
  void add(TransductionTree tree);
  const TransductionTree* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const std::map<std::string, TransductionTree, std::less<>>& trees() const { return trees_; }
  std::size_t size() const { return trees_.size(); }

  /// Dangling subtree references, subtree cycles, template/scope refs out of
  /// range and unknown features. Schema requests are checked by the caller
  /// against `schema_exists`.
  std::vector<std::string> validate(const FeatureLexicon& lexicon) const;

  bool operator==(const TreeSet&) const = default;

 private:
  std::map<std::string, TransductionTree, std::less<>> trees_;
};

/// One step of a derivation: the tree, the child-index path to the terminal
/// (or subtree) node, the input the tree saw and the captures at that node.
struct TraceHop {
  std::string tree;
  std::vector<std::size_t> path;
  Tokens input;
  Captures captures;
};

struct TreeResult {
  DirectiveKind kind = DirectiveKind::Gist;  // Gist, Reaction or Schema
  Tokens tokens;
  std::string schema;
  std::vector<TraceHop> trace;
};

/// Depth-first, in order. A node that matches but whose subtree yields
/// nothing is backtracked over.
std::optional<TreeResult> evaluate(const TreeSet& trees, std::string_view tree_name,
                                   std::span<const Token> input, const FeatureLexicon& lexicon,
                                   const DeixisMap& deixis = default_deixis());

const TreeNode* node_at(const TransductionTree& tree, std::span<const std::size_t> path);

// ---------------------------------------------------------------------------

enum class GistKind { Statement, Question, Nil };

struct GistClause {
  Tokens tokens;
  GistKind kind = GistKind::Nil;
  std::vector<TraceHop> trace;  // provenance, ignored by ==

  static GistClause nil() { return {}; }
  std::string text() const { return join(tokens); }
  bool operator==(const GistClause& other) const {
    return tokens == other.tokens && kind == other.kind;
  }
};

struct DerivationConfig {
  std::string question_tree = "question";
  std::set<Token, std::less<>> separators = {"and", "but", "so", "because"};
};

/// Splits at separator tokens. Empty fragments are dropped.
std::vector<Tokens> split_clauses(std::span<const Token> input,
                                  const std::set<Token, std::less<>>& separators);

/// Runs every clause through the question-detection tree, then the context
/// tree; at most one gist per clause. Yields a single nil gist when nothing
/// matched anywhere.
std::vector<GistClause> derive_gists(const TreeSet& trees, std::string_view context_tree,
                                     std::span<const Tokens> sentences,
                                     const FeatureLexicon& lexicon,
                                     const DerivationConfig& config = {});

std::vector<GistClause> derive_gists(const TreeSet& trees, std::string_view context_tree,
                                     std::span<const Token> input, const FeatureLexicon& lexicon,
                                     const DerivationConfig& config = {});

struct Reaction {
  Tokens tokens;
  std::vector<TraceHop> trace;
};

struct SchemaRequest {
  std::string name;
  std::vector<TraceHop> trace;
};

using ReactionResult = std::variant<std::monostate, Reaction, SchemaRequest>;

struct ReactionConfig {
  std::string answer_tree = "answer";
  std::string fallback_tree = "fallback";
};

/// Statement gists go to `reaction_tree`, question gists to the answer tree,
/// nil gists to the fallback tree.
ReactionResult derive_reaction(const TreeSet& trees, const GistClause& gist,
                               std::string_view reaction_tree, const FeatureLexicon& lexicon,
                               const ReactionConfig& config = {});

/// Which gists of one turn get a reaction: the first statement and every
/// question.
struct ReactionTargets {
  std::optional<std::size_t> statement;
  std::vector<std::size_t> questions;
};

ReactionTargets select_reaction_targets(std::span<const GistClause> gists);

// ---------------------------------------------------------------------------
// Text formats

Pattern parse_pattern(std::string_view text);
Template parse_template(std::string_view text);
std::string format_pattern(const Pattern& pattern);
std::string format_template(const Template& tmpl);

/// `tree <name>` blocks with 2-space indented `match ( ... )` nodes and
/// terminal directives. Errors carry `source:line`.
std::vector<TransductionTree> parse_trees(std::string_view text, std::string_view source = "<input>");
std::string format_tree(const TransductionTree& tree);

/// `word : feat1 feat2` and `feat1 => feat2` lines.
void parse_lexicon(std::string_view text, FeatureLexicon& lexicon,
                   std::string_view source = "<input>");
std::string format_lexicon(const FeatureLexicon& lexicon);

}  // namespace gistline::transduction
