#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"

#include "gistline/error.hpp"
#include "gistline/transduction.hpp"

#include <random>

using namespace gistline;
using namespace gistline::transduction;

namespace {

Pattern pat(const char* text) { return parse_pattern(text); }

Tokens toks(std::initializer_list<const char*> words) { return Tokens(words.begin(), words.end()); }

FeatureLexicon pets_lexicon() {
  FeatureLexicon lex;
  lex.add_word("dogs", {"pet"});
  lex.add_word("cat", {"pet"});
  lex.add_implication("pet", "animal");
  return lex;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Yes, I have.") == toks({"yes", "i", "have"}));
  CHECK(tokenize("").empty());
  CHECK(tokenize("Where's the dog?!") == toks({"where's", "the", "dog"}));
  CHECK(tokenize("  MIXED   case\tand\nlines ") == toks({"mixed", "case", "and", "lines"}));
  CHECK(tokenize("well-known") == toks({"wellknown"}));
  CHECK(tokenize("'quoted'") == toks({"quoted"}));
  CHECK(tokenize("it\xE2\x80\x99s") == toks({"it's"}));
}

TEST_CASE("tokenize_sentences splits at sentence punctuation") {
  const auto s = tokenize_sentences("I am from Ohio. Where are you from? Great; thanks!");
  REQUIRE(s.size() == 4);
  CHECK(s[0] == toks({"i", "am", "from", "ohio"}));
  CHECK(s[1] == toks({"where", "are", "you", "from"}));
  CHECK(s[3] == toks({"thanks"}));
  CHECK(tokenize_sentences("...").empty());
}

TEST_CASE("feature lexicon closure and cycles") {
  auto lex = pets_lexicon();
  CHECK(lex.has_feature("dogs", "pet"));
  CHECK(lex.has_feature("dogs", "animal"));
  CHECK_FALSE(lex.has_feature("animal", "pet"));
  CHECK(lex.knows_feature("animal"));
  CHECK_FALSE(lex.knows_feature("plant"));
  CHECK_THROWS_AS(lex.add_implication("animal", "pet"), ContentError);
  CHECK_THROWS_AS(lex.add_implication("pet", "pet"), ContentError);
}

TEST_CASE("match examples") {
  const FeatureLexicon lex;
  const auto input = toks({"yes", "i", "have", "seen", "the", "new", "star", "wars", "movie"});
  auto c = match(pat("* star wars *"), input, lex);
  REQUIRE(c);
  REQUIRE(c->spans.size() == 4);
  CHECK(c->spans[0] == toks({"yes", "i", "have", "seen", "the", "new"}));
  CHECK(c->spans[1] == toks({"star"}));
  CHECK(c->spans[2] == toks({"wars"}));
  CHECK(c->spans[3] == toks({"movie"}));

  auto empty = match(Pattern{}, Tokens{}, lex);
  REQUIRE(empty);
  CHECK(empty->spans.empty());

  CHECK_FALSE(match(pat("*1 dog"), toks({"the", "big", "dog"}), lex));
  CHECK_FALSE(match(Pattern{}, toks({"x"}), lex));
  CHECK_FALSE(match(pat("a b"), toks({"a", "b", "c"}), lex));
}

TEST_CASE("match with features and bounded wildcards") {
  const auto lex = pets_lexicon();
  auto c = match(pat("* i have *2 .pet *"), toks({"i", "have", "two", "dogs"}), lex);
  REQUIRE(c);
  CHECK(c->spans[3] == toks({"two"}));
  CHECK(c->spans[4] == toks({"dogs"}));
  CHECK(match(pat(".animal"), toks({"cat"}), lex));
  CHECK(match(pat("* i have *2 .pet *"), toks({"i", "have", "three", "big", "dogs"}), lex));
  CHECK_FALSE(match(pat("* i have *2 .pet *"), toks({"i", "have", "three", "very", "big", "dogs"}), lex));
  // shortest-first: the first wildcard takes as little as possible
  auto d = match(pat("* a *"), toks({"a", "a", "a"}), lex);
  REQUIRE(d);
  CHECK(d->spans[0].empty());
  CHECK(d->spans[2] == toks({"a", "a"}));
}

TEST_CASE("match agrees with the brute-force oracle on a random sample") {
  FeatureLexicon lex;
  lex.add_word("a", {"f"});
  lex.add_word("b", {"f", "g"});
  lex.add_word("c", {"g"});
  const Tokens vocab = toks({"a", "b", "c", "d", "e", "x"});
  std::mt19937_64 rng(12345);
  auto element = [&]() -> PatternElement {
    switch (rng() % 5) {
      case 0: return Wildcard{};
      case 1: return Wildcard{1 + rng() % 3};
      case 2: return Feature{rng() % 2 ? "f" : "g"};
      default: return Literal{vocab[rng() % vocab.size()]};
    }
  };
  std::size_t matched = 0;
  for (int i = 0; i < 20000; ++i) {
    Pattern p;
    const auto k = rng() % 7;
    for (std::size_t j = 0; j < k; ++j) p.elements.push_back(element());
    Tokens input;
    const auto n = rng() % 9;
    for (std::size_t j = 0; j < n; ++j) input.push_back(vocab[rng() % vocab.size()]);
    const auto got = match(p, input, lex);
    const auto want = oracle::brute_match(p, input, lex);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      REQUIRE(got->spans == want->spans);
      Tokens joined;
      for (const auto& s : got->spans) joined.insert(joined.end(), s.begin(), s.end());
      REQUIRE(joined == input);
      ++matched;
    }
  }
  CHECK(matched > 500);
}

TEST_CASE("instantiate") {
  const auto& deixis = default_deixis();
  Captures none;
  CHECK(instantiate(parse_template("i have seen the new star wars movie"), none, deixis) ==
        toks({"i", "have", "seen", "the", "new", "star", "wars", "movie"}));

  Captures one{{toks({"my", "daughter"})}};
  CHECK(instantiate(parse_template("1!"), one, deixis) == toks({"your", "daughter"}));
  CHECK(instantiate(parse_template("1"), one, deixis) == toks({"my", "daughter"}));

  Captures two{{toks({"a"}), toks({"b", "c"})}};
  CHECK(instantiate(parse_template("2"), two, deixis) == toks({"b", "c"}));

  Captures odd{{toks({"i", "am", "zebra", "yours"})}};
  CHECK(instantiate(parse_template("1!"), odd, deixis) == toks({"you", "are", "zebra", "mine"}));

  CHECK_THROWS_AS(instantiate(parse_template("3"), two, deixis, "t"), ContentError);
}

TEST_CASE("pattern and template text round trip") {
  for (const char* text : {"* star wars *", "*2 .pet i", "", "a *1 b"}) {
    CHECK(parse_pattern(format_pattern(parse_pattern(text))) == parse_pattern(text));
  }
  CHECK_THROWS_AS(parse_pattern("a *0 b"), ContentError);
  CHECK(format_pattern(parse_pattern("*  .pet   *3")) == "* .pet *3");
  CHECK(format_template(parse_template("i have 4 5!")) == "i have 4 5!");
  CHECK(parse_template("\\65 years").parts.size() == 2);
  CHECK(instantiate(parse_template("\\65 years"), Captures{}, default_deixis()) == toks({"65", "years"}));
  CHECK_THROWS_AS(parse_pattern("Bad!"), ContentError);
  CHECK_THROWS_AS(parse_template("0"), ContentError);
}

namespace {

const char* kTrees = R"(
# test trees
tree question
  match ( * where are you from * )
    gist ( user asked where mara is from )

tree starwars
  match ( .no * )
    gist ( i have not seen the new star wars movie )
  match ( .yes * )
    gist ( i have seen the new star wars movie )

tree pets
  match ( * i have *2 .pet * )
    gist ( i have 4 5 )
  match ( * )
    subtree chat

tree chat
  match ( * my * )
    match ( * my .family * )
      gist ( i mentioned my 3 )
  match ( * i love * )
    gist ( i love 4! )

tree answer
  match ( user asked where mara is from )
    schema answer-from
  match ( * )
    react ( good question )

tree fallback
  match ( * )
    react ( i see )

tree pets-react
  match ( i have *2 .pet )
    react ( how nice 3 4 )
)";

struct Trees {
  TreeSet set;
  FeatureLexicon lex;
  Trees() {
    for (auto& t : parse_trees(kTrees, "test.tree")) set.add(std::move(t));
    lex.add_word("yes", {"yes"});
    lex.add_word("yeah", {"yes"});
    lex.add_word("no", {"no"});
    lex.add_word("dogs", {"pet"});
    lex.add_word("daughter", {"family"});
  }
};

}  // namespace

TEST_CASE("tree file round trip and errors") {
  const auto trees = parse_trees(kTrees, "t");
  REQUIRE(trees.size() == 7);
  for (const auto& t : trees) {
    const auto again = parse_trees(format_tree(t), "t");
    REQUIRE(again.size() == 1);
    CHECK(format_tree(again[0]) == format_tree(t));
  }
  CHECK_THROWS_WITH_AS(parse_trees("tree a\n    match ( x )\n", "f.tree"), doctest::Contains("f.tree:2"),
                       ContentError);
  CHECK_THROWS_AS(parse_trees("tree a\n  match ( x )\n  gist ( y )\n", "f"), ContentError);
  CHECK_THROWS_AS(parse_trees("tree a\n\tmatch ( x )\n", "f"), ContentError);
  CHECK_THROWS_AS(parse_trees("match ( x )\n", "f"), ContentError);

  TreeSet set;
  set.add(parse_trees("tree a\n  match ( * )\n    react ( x )\n")[0]);
  CHECK_THROWS_AS(set.add(parse_trees("tree a\n  match ( * )\n    react ( y )\n")[0]), ContentError);
}

TEST_CASE("tree set validation") {
  Trees t;
  CHECK(t.set.validate(t.lex).empty());

  TreeSet bad;
  for (auto& tree : parse_trees("tree a\n  match ( x y z )\n    gist ( 5 )\n"
                                "tree b\n  match ( .nope )\n    subtree missing\n"
                                "tree c\n  match ( * )\n    subtree d\n"
                                "tree d\n  match ( * )\n    subtree c\n")) {
    bad.add(std::move(tree));
  }
  const auto v = bad.validate(t.lex);
  auto has = [&](const char* needle) {
    for (const auto& s : v) {
      if (s.find(needle) != std::string::npos) return true;
    }
    return false;
  };
  CHECK(has("5"));
  CHECK(has("nope"));
  CHECK(has("missing"));
  CHECK(has("cycle"));
}

TEST_CASE("derive_gists examples") {
  Trees t;
  const auto g = derive_gists(t.set, "starwars", tokenize("Yes, I have."), t.lex);
  REQUIRE(g.size() == 1);
  CHECK(g[0].text() == "i have seen the new star wars movie");
  CHECK(g[0].kind == GistKind::Statement);

  const auto empty = derive_gists(t.set, "starwars", Tokens{}, t.lex);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].kind == GistKind::Nil);

  const auto pets = derive_gists(t.set, "pets", toks({"i", "have", "two", "dogs"}), t.lex);
  REQUIRE(pets.size() == 1);
  CHECK(pets[0].text() == "i have two dogs");
  REQUIRE(pets[0].trace.size() == 1);
  CHECK(pets[0].trace[0].tree == "pets");
  CHECK(pets[0].trace[0].path == std::vector<std::size_t>{0});

  CHECK_THROWS_AS(derive_gists(t.set, "nope", Tokens{}, t.lex), ContentError);
}

TEST_CASE("derive_gists splits clauses and detects questions") {
  Trees t;
  const auto sentences = tokenize_sentences("Yeah and where are you from? I love my daughter");
  const auto g = derive_gists(t.set, "starwars", sentences, t.lex);
  REQUIRE(g.size() == 2);
  CHECK(g[0].text() == "i have seen the new star wars movie");
  CHECK(g[1].kind == GistKind::Question);
  CHECK(g[1].text() == "user asked where mara is from");

  // backtracking: "* my *" matches but its child needs a family word
  const auto love = derive_gists(t.set, "pets", tokenize("I love my dogs"), t.lex);
  REQUIRE(love.size() == 1);
  CHECK(love[0].text() == "i love your dogs");
  REQUIRE(love[0].trace.size() == 2);
  CHECK(love[0].trace[0].tree == "pets");
  CHECK(love[0].trace[1].tree == "chat");
  CHECK(love[0].trace[1].path == std::vector<std::size_t>{1});
}

TEST_CASE("every derived gist is reproducible from its trace") {
  Trees t;
  const std::vector<std::string> inputs = {"yes i have two dogs", "i love my daughter and my dogs",
                                           "i have a cat", "my daughter is here", "where are you from"};
  for (const auto& ctx : {"pets", "starwars", "chat"}) {
    for (const auto& in : inputs) {
      for (const auto& g : derive_gists(t.set, ctx, tokenize(in), t.lex)) {
        if (g.kind == GistKind::Nil) continue;
        REQUIRE_FALSE(g.trace.empty());
        const auto& hop = g.trace.back();
        const auto* tree = t.set.find(hop.tree);
        REQUIRE(tree != nullptr);
        const auto* node = node_at(*tree, hop.path);
        REQUIRE(node != nullptr);
        REQUIRE(node->directive);
        const auto again = match(node->pattern, hop.input, t.lex);
        REQUIRE(again);
        CHECK(*again == hop.captures);
        CHECK(instantiate(node->directive->tmpl, *again, default_deixis()) == g.tokens);
        // deterministic
        CHECK(derive_gists(t.set, ctx, tokenize(in), t.lex) == derive_gists(t.set, ctx, tokenize(in), t.lex));
      }
    }
  }
}

TEST_CASE("derive_reaction") {
  Trees t;
  const auto gists = derive_gists(t.set, "pets", toks({"i", "have", "two", "dogs"}), t.lex);
  auto r = derive_reaction(t.set, gists[0], "pets-react", t.lex);
  REQUIRE(std::holds_alternative<Reaction>(r));
  CHECK(join(std::get<Reaction>(r).tokens) == "how nice two dogs");

  auto nil = derive_reaction(t.set, GistClause::nil(), "pets-react", t.lex);
  REQUIRE(std::holds_alternative<Reaction>(nil));
  CHECK(join(std::get<Reaction>(nil).tokens) == "i see");

  const auto q = derive_gists(t.set, "pets", tokenize("where are you from"), t.lex);
  auto a = derive_reaction(t.set, q[0], "pets-react", t.lex);
  REQUIRE(std::holds_alternative<SchemaRequest>(a));
  CHECK(std::get<SchemaRequest>(a).name == "answer-from");

  GistClause other{toks({"something", "else"}), GistKind::Statement, {}};
  CHECK(std::holds_alternative<std::monostate>(derive_reaction(t.set, other, "pets-react", t.lex)));
  CHECK_THROWS_AS(derive_reaction(t.set, other, "nope", t.lex), ContentError);
}

TEST_CASE("reaction policy: first statement plus every question") {
  std::vector<GistClause> g = {
      {toks({"q1"}), GistKind::Question, {}},
      {toks({"s1"}), GistKind::Statement, {}},
      {toks({"s2"}), GistKind::Statement, {}},
      {toks({"q2"}), GistKind::Question, {}},
  };
  const auto targets = select_reaction_targets(g);
  REQUIRE(targets.statement);
  CHECK(*targets.statement == 1);
  CHECK(targets.questions == std::vector<std::size_t>{0, 3});

  std::vector<GistClause> nil = {GistClause::nil()};
  const auto n = select_reaction_targets(nil);
  REQUIRE(n.statement);
  CHECK(*n.statement == 0);
}

TEST_CASE("default pack: shipped fixtures") {
  const auto& pack = fixtures::default_pack();
  const auto g = derive_gists(pack.trees, "activities-and-hobbies-q1", tokenize_sentences("Yes, I have."),
                              pack.lexicon);
  REQUIRE(g.size() == 1);
  CHECK(g[0].text() == "i have seen the new star wars movie");

  const auto q = derive_gists(pack.trees, "pets-q1", tokenize_sentences("Where are you from?"), pack.lexicon);
  REQUIRE(q.size() == 1);
  CHECK(q[0].kind == GistKind::Question);
  auto r = derive_reaction(pack.trees, q[0], "pets-react", pack.lexicon);
  REQUIRE(std::holds_alternative<SchemaRequest>(r));
  CHECK(std::get<SchemaRequest>(r).name == "answer-from");
}
