#include "doctest.h"

#include "gistline/error.hpp"
#include "gistline/feedback.hpp"

using namespace gistline;
using namespace gistline::feedback;
using transduction::tokenize;

namespace {

ValenceLexicon lex(std::initializer_list<std::pair<const char*, double>> entries) {
  ValenceLexicon v;
  for (const auto& [w, s] : entries) v.add(w, s);
  return v;
}

}  // namespace

TEST_CASE("valence_score examples") {
  const auto v = lex({{"great", 1.0}, {"awful", -1.0}, {"fine", 0.5}});
  auto s = valence_score(tokenize("great awful"), v);
  CHECK(s.mean == 0.0);
  CHECK(s.scored == 2);
  s = valence_score(tokenize("great great fine"), v);
  CHECK(s.mean == doctest::Approx((1.0 + 1.0 + 0.5) / 3.0).epsilon(1e-12));
  CHECK(s.scored == 3);
  s = valence_score(tokenize("the a"), v);
  CHECK(s.mean == 0.0);
  CHECK(s.scored == 0);
}

TEST_CASE("valence lexicon bounds and file format") {
  ValenceLexicon v;
  CHECK_THROWS_AS(v.add("x", 1.5), ContentError);
  CHECK_THROWS_AS(v.add("x", -1.01), ContentError);
  CHECK_NOTHROW(v.add("edge", -1.0));
  const auto parsed = parse_valence("# c\ngood\t0.5\nbad\t-0.25\n");
  REQUIRE(parsed.find("bad") != nullptr);
  CHECK(*parsed.find("bad") == -0.25);
  CHECK(parse_valence(format_valence(parsed)) == parsed);
  CHECK_THROWS_AS(parse_valence("good\tlots\n"), ContentError);
  CHECK_THROWS_AS(parse_valence("good\t2\n"), ContentError);
}

TEST_CASE("subsession stats accumulate") {
  const auto v = lex({{"happy", 0.8}, {"sad", -0.6}});
  SubsessionStats stats;
  CHECK(stats.mean_valence() == 0.0);
  stats.add_turn(tokenize("I am happy"), v);
  stats.add_turn(tokenize("a bit sad today"), v);
  CHECK(stats.turns == 2);
  CHECK(stats.user_tokens == 7);
  CHECK(stats.scored_tokens == 2);
  CHECK(stats.mean_valence() == doctest::Approx(0.1));
}

TEST_CASE("bands") {
  CHECK(band(0.5) == AdviceId::Praise);
  CHECK(band(0.0) == AdviceId::NeutralTip);
  CHECK(band(-0.3) == AdviceId::PositivityNudge);
  CHECK(band(0.2) == AdviceId::Praise);
  CHECK(band(-0.2) == AdviceId::PositivityNudge);
  CHECK(band(0.19999) == AdviceId::NeutralTip);
  CHECK(band(-0.19999) == AdviceId::NeutralTip);
  Thresholds strict{0.6, -0.6, 0.5};
  CHECK(band(0.5, strict) == AdviceId::NeutralTip);
  // monotone
  int last = 0;
  for (double m = -1.0; m <= 1.0; m += 0.01) {
    const int rank = band(m) == AdviceId::PositivityNudge ? 0 : band(m) == AdviceId::NeutralTip ? 1 : 2;
    CHECK(rank >= last);
    last = rank;
  }
}

TEST_CASE("break feedback and channel lines") {
  const AdviceTemplates templates;
  SubsessionStats stats;
  stats.valence_sum = 1.0;
  stats.scored_tokens = 2;
  auto a = break_feedback(stats, templates);
  CHECK(a.id == AdviceId::Praise);
  CHECK(a.text == templates.get("praise"));
  CHECK(a.channel_lines.empty());

  stats.external_channels = {{"eye_contact", 0.9}, {"smiling", 0.1}};
  a = break_feedback(stats, templates);
  REQUIRE(a.channel_lines.size() == 2);
  CHECK(a.channel_lines[0] == "Your eye contact was good.");
  CHECK(a.channel_lines[1] == "Try to pay a little more attention to your smiling.");
  CHECK(a.full_text().find(a.text) == 0);
}

TEST_CASE("advice file format") {
  const auto t = parse_advice("praise | Well done!\n# comment\nneutral-tip | Fine.\n");
  CHECK(t.get("praise") == "Well done!");
  CHECK(t.get("positivity-nudge") == AdviceTemplates().get("positivity-nudge"));
  CHECK(parse_advice(format_advice(t)) == t);
  CHECK_THROWS_AS(parse_advice("praise Well done\n"), ContentError);
}

TEST_CASE("render_summary") {
  const AdviceTemplates templates;
  const Advice praise{AdviceId::Praise, templates.get("praise"), {}};
  const Advice tip{AdviceId::NeutralTip, templates.get("neutral-tip"), {}};

  const std::vector<Advice> both = {praise, tip};
  const auto s = render_summary(both, templates);
  CHECK(s.find(templates.get("summary-intro")) == 0);
  const auto p = s.find(praise.text);
  const auto n = s.find(tip.text);
  REQUIRE(p != std::string::npos);
  REQUIRE(n != std::string::npos);
  CHECK(p < n);

  CHECK(render_summary({}, templates) == templates.get("summary-empty"));

  const std::vector<Advice> twice = {praise, praise};
  const auto t = render_summary(twice, templates);
  const auto first = t.find(praise.text);
  CHECK(t.find(praise.text, first + 1) != std::string::npos);
}

TEST_CASE("advice names") {
  for (auto id : {AdviceId::Praise, AdviceId::NeutralTip, AdviceId::PositivityNudge}) {
    CHECK(parse_advice_name(advice_name(id)) == id);
  }
  CHECK(advice_name(AdviceId::NeutralTip) == "neutral-tip");
  CHECK_FALSE(parse_advice_name("scold"));
}
