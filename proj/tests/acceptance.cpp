// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include "fixtures.hpp"
#include "oracle.hpp"

#include "gistline/content.hpp"
#include "gistline/dialogue.hpp"
#include "gistline/error.hpp"
#include "gistline/evalkit.hpp"
#include "gistline/feedback.hpp"
#include "gistline/service.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

using namespace gistline;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------------------

Outcome matcher_oracle() {
  using namespace transduction;
  Outcome o;
  FeatureLexicon lex;
  lex.add_word("a", {"f"});
  lex.add_word("b", {"f", "g"});
  lex.add_word("c", {"g"});
  lex.add_implication("g", "h");
  const Tokens vocab = {"a", "b", "c", "d", "e", "x"};

  std::vector<PatternElement> alphabet;
  for (const auto& w : vocab) alphabet.push_back(Literal{w});
  alphabet.push_back(Wildcard{});
  for (std::size_t m = 1; m <= 3; ++m) alphabet.push_back(Wildcard{m});
  for (const char* f : {"f", "g", "h"}) alphabet.push_back(Feature{f});

  std::size_t cases = 0, matched = 0;
  auto compare = [&](const Pattern& p, const Tokens& input) {
    ++cases;
    const auto got = match(p, input, lex);
    const auto want = oracle::brute_match(p, input, lex);
    if (got.has_value() != want.has_value()) {
      o.require(false, "status differs for " + format_pattern(p) + " on '" + join(input) + "'");
      return;
    }
    if (got) {
      ++matched;
      o.require(got->spans == want->spans, "captures differ for " + format_pattern(p) + " on '" + join(input) + "'");
    }
  };

  std::vector<Tokens> inputs_upto[9];
  inputs_upto[0] = {Tokens{}};
  std::vector<Tokens> layer = {Tokens{}};
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<Tokens> next;
    for (const auto& t : layer) {
      for (const auto& w : vocab) {
        auto u = t;
        u.push_back(w);
        next.push_back(std::move(u));
      }
    }
    inputs_upto[n] = inputs_upto[n - 1];
    inputs_upto[n].insert(inputs_upto[n].end(), next.begin(), next.end());
    layer = std::move(next);
  }

  const auto start = std::chrono::steady_clock::now();
  // Exhaustive: every pattern of up to 2 elements against every input of up
  // to 4 tokens, and every 3-element pattern against inputs of up to 3.
  std::vector<Pattern> patterns = {Pattern{}};
  std::vector<Pattern> frontier = {Pattern{}};
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<Pattern> next;
    for (const auto& p : frontier) {
      for (const auto& e : alphabet) {
        auto q = p;
        q.elements.push_back(e);
        next.push_back(std::move(q));
      }
    }
    for (const auto& p : next) {
      for (const auto& in : inputs_upto[k <= 2 ? 4 : 3]) compare(p, in);
    }
    frontier = std::move(next);
  }
  for (const auto& in : inputs_upto[4]) compare(Pattern{}, in);
  const std::size_t exhaustive = cases;

  // Sampled: up to 6 elements, up to 8 tokens, to a million cases in total.
  std::mt19937_64 rng(20240601);
  while (cases < 1'000'000 && o.ok) {
    Pattern p;
    const auto k = rng() % 7;
    for (std::size_t j = 0; j < k; ++j) p.elements.push_back(alphabet[rng() % alphabet.size()]);
    Tokens input;
    const auto n = rng() % 9;
    for (std::size_t j = 0; j < n; ++j) input.push_back(vocab[rng() % vocab.size()]);
    compare(p, input);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 300.0, "took longer than five minutes");
  if (o.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu cases (%zu exhaustive), %zu matched, %.1fs", cases, exhaustive, matched,
                  secs);
    o.detail = buf;
  }
  return o;
}

content::Curriculum one_session(std::array<std::string, 3> topics) {
  content::Curriculum c;
  c.sessions.push_back(std::move(topics));
  return c;
}

Outcome star_wars() {
  Outcome o;
  const dialogue::Engine engine(fixtures::default_pack());
  auto [state, first] = engine.start_session("u", one_session({"activities-and-hobbies", "pets", "home"}), 1, 1);
  o.require(!first.items.empty() &&
                first.items.back().text.ends_with("Have you seen the new Star Wars movie?"),
            "first question is not the Star Wars question");
  const auto out = engine.handle_turn(state, "Yes, I have.");
  o.require(out.gists.size() == 1, "expected one gist");
  if (o.ok) {
    o.detail = out.gists[0].text();
    o.require(out.gists[0].text() == "i have seen the new star wars movie", "gist was '" + o.detail + "'");
  }
  return o;
}

Outcome pets_skip() {
  Outcome o;
  const dialogue::Engine engine(fixtures::default_pack());
  auto [state, first] = engine.start_session("u", one_session({"pets", "activities-and-hobbies", "home"}), 1, 1);
  std::vector<std::string> said;
  auto collect = [&](const dialogue::AgentOutput& out) {
    for (const auto& i : out.items) said.push_back(i.text);
  };
  collect(first);
  collect(engine.handle_turn(state, "Yes, I have two dogs."));
  int guard = 0;
  while (!state.over && guard++ < 50) collect(engine.handle_turn(state, "I see"));
  o.require(state.over, "session did not end");
  for (const auto& s : said) o.require(s != "Do you have any pets?", "the pet question was asked");
  o.require(state.plan.skip_log.size() == 1, "expected one skip record");
  if (o.ok) {
    o.detail = "skipped on gist '" + state.plan.skip_log[0].gist.text() + "'";
    o.require(state.plan.skip_log[0].gist.text() == "i have two dogs", o.detail);
  }
  return o;
}

Outcome curriculum() {
  Outcome o;
  const auto& topics = fixtures::default_pack().topics;
  std::size_t tiers[4] = {0, 0, 0, 0};
  for (const auto& t : topics) ++tiers[static_cast<int>(t.tier)];
  o.require(topics.size() == 30 && tiers[1] == 9 && tiers[2] == 15 && tiers[3] == 6, "pack is not 9/15/6");
  const std::vector<double> want = {1, 1, 1, 2, 2, 2, 2, 2, 3, 3};
  for (std::uint64_t seed = 0; seed < 1000 && o.ok; ++seed) {
    const auto c = content::compose_curriculum(topics, seed);
    o.require(c.sessions.size() == 10, "not ten sessions");
    std::set<std::string> seen;
    for (const auto& s : c.sessions) seen.insert(s.begin(), s.end());
    o.require(seen.size() == 30, "a topic repeats or is missing for seed " + std::to_string(seed));
    o.require(content::session_means(c, topics) == want, "session means differ for seed " + std::to_string(seed));
  }
  if (o.ok) o.detail = "1000 seeds";
  return o;
}

const std::vector<std::string> kScript = {
    "Yes, I have.", "I like to paint", "no", "I would like to try dancing",
    "Yes, I have two dogs.", "My first pet was a cat", "yes they are great company",
    "I am from Ohio.", "I remember the lake", "yes my sister", "I would love to go back"};

Outcome session_shape() {
  Outcome o;
  const dialogue::Engine engine(fixtures::default_pack());
  auto [state, first] =
      engine.start_session("u", one_session({"activities-and-hobbies", "pets", "where-are-you-from"}), 1, 42);
  std::vector<dialogue::AgentOutput> outs = {first};
  for (const auto& line : kScript) {
    if (!state.over) outs.push_back(engine.handle_turn(state, line));
  }
  o.require(state.over, "session did not end on the script");

  std::vector<std::string> issued;
  std::vector<std::vector<std::string>> summaries;
  std::vector<std::size_t> questions(1, 0);
  for (const auto& out : outs) {
    for (const auto& item : out.items) {
      using dialogue::OutputKind;
      if (item.kind == OutputKind::FeedbackText) {
        issued.insert(issued.end(), item.advice_ids.begin(), item.advice_ids.end());
        questions.push_back(0);
      } else if (item.kind == OutputKind::SessionSummary) {
        summaries.push_back(item.advice_ids);
      } else if (item.kind == OutputKind::Utterance && item.provenance.source == "say") {
        ++questions.back();
      }
    }
  }
  o.require(issued.size() == 2, "expected two feedback items, got " + std::to_string(issued.size()));
  o.require(summaries.size() == 1, "expected one summary");
  o.require(o.ok && summaries[0] == issued, "summary advice ids differ from the issued ones");
  std::string counts;
  for (auto q : questions) {
    o.require(q >= 3 && q <= 5, "a subsession asked " + std::to_string(q) + " questions");
    counts += (counts.empty() ? "" : "/") + std::to_string(q);
  }
  if (o.ok) o.detail = "questions per subsession " + counts;
  return o;
}

service::ServiceOptions fixed_options() {
  service::ServiceOptions opts;
  opts.base_seed = 11;
  auto tick = std::make_shared<int>(0);
  opts.clock = [tick] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2024-02-01T10:%02d:%02d.000Z", (*tick / 60) % 60, *tick % 60);
    ++*tick;
    return std::string(buf);
  };
  return opts;
}

Outcome determinism_and_replay() {
  Outcome o;
  const auto& pack = fixtures::default_pack();
  auto run = [&](const std::filesystem::path& store, std::optional<std::size_t> crash_at,
                 std::string* sid_out) {
    auto opts = fixed_options();
    if (crash_at) {
      auto count = std::make_shared<std::size_t>(0);
      opts.after_turn_logged = [count, at = *crash_at](const std::string&) {
        if ((*count)++ == at) throw std::runtime_error("crash");
      };
    }
    std::vector<dialogue::AgentOutput> outs;
    service::Service svc(pack, store, opts);
    const auto uid = svc.create_user("Pat");
    const auto sid = svc.open_session(uid).session_id;
    *sid_out = sid;
    for (std::size_t i = 0; i < kScript.size(); ++i) {
      try {
        outs.push_back(svc.post_turn(sid, kScript[i]));
      } catch (const std::runtime_error&) {
        break;
      }
    }
    return std::make_pair(outs, svc.transcript(sid));
  };

  fixtures::TempDir a("acc-a"), b("acc-b"), c("acc-c");
  std::string sid;
  const auto [outs_a, text_a] = run(a.path, std::nullopt, &sid);
  const auto [outs_b, text_b] = run(b.path, std::nullopt, &sid);
  o.require(text_a == text_b, "two identical runs produced different transcripts");

  const std::size_t crash_at = 5;
  const auto partial = run(c.path, crash_at, &sid);
  o.require(partial.first.size() == crash_at, "the crash did not happen where expected");
  service::Service restarted(pack, c.path, fixed_options());
  const auto recovered = restarted.last_output(sid);
  o.require(recovered && *recovered == outs_a[crash_at], "replayed response differs from the uninterrupted one");
  if (o.ok) {
    o.detail = "transcripts identical (" + std::to_string(text_a.size()) + " bytes); response after crash at turn " +
               std::to_string(crash_at + 1) + " reproduced";
  }
  return o;
}

Outcome aggregation() {
  Outcome o;
  using evalkit::Condition;
  // Published condition means, WOZ then AUTO, in criterion order.
  const double woz[6] = {3.7, 4.1, 3.8, 3.8, 3.8, 4.2};
  const double aut[6] = {3.9, 4.2, 4.3, 3.8, 3.9, 4.3};

  // Ten integer ratings whose mean is exactly `m` (one decimal, in [3, 5]).
  auto ten_ratings = [](double m) {
    const int tenths = static_cast<int>(std::lround(m * 10));
    const int base = tenths / 10;
    const int high = tenths % 10;
    std::vector<int> r(10, base);
    for (int i = 0; i < high; ++i) r[static_cast<std::size_t>(i)] = base + 1;
    return r;
  };

  std::vector<evalkit::Transcript> transcripts;
  std::vector<evalkit::RatingSheet> sheets;
  for (int t = 0; t < 8; ++t) {
    const bool is_auto = t % 2 == 1;
    evalkit::Transcript tr{"t" + std::to_string(t), is_auto ? Condition::Auto : Condition::Woz, {}};
    transcripts.push_back(tr);
    std::vector<std::vector<int>> per_criterion;
    for (int k = 0; k < 6; ++k) per_criterion.push_back(ten_ratings(is_auto ? aut[k] : woz[k]));
    for (std::size_t r = 0; r < 10; ++r) {
      evalkit::RatingSheet s{tr.id, "r" + std::to_string(r), {}};
      for (std::size_t k = 0; k < 6; ++k) s.scores[k] = per_criterion[k][r];
      sheets.push_back(s);
    }
  }
  const auto report = evalkit::aggregate(sheets, transcripts);
  for (std::size_t k = 0; k < 6; ++k) {
    o.require(std::fabs(report.rows[k].woz_mean - woz[k]) < 1e-9 && std::fabs(report.rows[k].auto_mean - aut[k]) < 1e-9,
              "means differ for " + std::string(evalkit::kCriterionNames[k]));
  }
  o.require(std::fabs(report.rows[2].difference() - 0.5) < 1e-9, "on_track difference is not 0.5");
  o.require(report.largest_difference() == "on_track", "largest difference is not on_track");

  // Synthetic sheets. WOZ consensus 4, 2, 1.5: mean 2.5, sample SD sqrt(1.75).
  // AUTO consensus 5, 3.5: mean 4.25, sample SD sqrt(1.125).
  const std::vector<std::pair<std::string, std::vector<int>>> raw = {
      {"w1", {3, 5}}, {"w2", {2, 2}}, {"w3", {1, 2}}, {"a1", {5, 5}}, {"a2", {4, 3}}};
  std::vector<evalkit::Transcript> ts;
  std::vector<evalkit::RatingSheet> ss;
  for (const auto& [id, scores] : raw) {
    ts.push_back({id, id[0] == 'a' ? Condition::Auto : Condition::Woz, {}});
    for (std::size_t r = 0; r < scores.size(); ++r) {
      evalkit::RatingSheet s{id, "r" + std::to_string(r), {}};
      s.scores.fill(scores[r]);
      ss.push_back(s);
    }
  }
  const auto synth = evalkit::aggregate(ss, ts);
  for (const auto& row : synth.rows) {
    o.require(std::fabs(row.woz_mean - 2.5) < 1e-9 && std::fabs(row.woz_sd - std::sqrt(1.75)) < 1e-9 &&
                  std::fabs(row.auto_mean - 4.25) < 1e-9 && std::fabs(row.auto_sd - std::sqrt(1.125)) < 1e-9,
              "synthetic means or SDs differ for " + std::string(row.criterion));
  }
  if (o.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "on_track difference %.3f, largest", report.rows[2].difference());
    o.detail = buf;
  }
  return o;
}

Outcome rater_assignment() {
  Outcome o;
  bool rejected = false;
  try {
    evalkit::assign_raters({16, 6, 3, 3, 1});
  } catch (const FeasibilityError&) {
    rejected = true;
  }
  o.require(rejected, "T=16 R=6 coverage=3 load=3 was accepted");
  for (std::uint64_t seed = 0; seed < 100 && o.ok; ++seed) {
    const auto a = evalkit::assign_raters({16, 6, 3, 8, seed});
    const auto violations = evalkit::check_assignment(a);
    o.require(violations.empty(), "seed " + std::to_string(seed) + ": " +
                                      (violations.empty() ? std::string() : violations.front()));
  }
  if (o.ok) o.detail = "infeasible case rejected; 100 seeds valid";
  return o;
}

Outcome feedback_bands() {
  using feedback::AdviceId;
  using feedback::band;
  Outcome o;
  o.require(band(0.5) == AdviceId::Praise, "+0.5");
  o.require(band(0.0) == AdviceId::NeutralTip, "0.0");
  o.require(band(-0.3) == AdviceId::PositivityNudge, "-0.3");
  o.require(band(0.2) == AdviceId::Praise, "+0.2 boundary");
  o.require(band(-0.2) == AdviceId::PositivityNudge, "-0.2 boundary");
  o.require(band(0.19999) == AdviceId::NeutralTip && band(-0.19999) == AdviceId::NeutralTip, "just inside the bands");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"matcher-oracle", matcher_oracle},
      {"star-wars-gist", star_wars},
      {"pets-skip", pets_skip},
      {"curriculum", curriculum},
      {"session-shape", session_shape},
      {"determinism-replay", determinism_and_replay},
      {"aggregation", aggregation},
      {"rater-assignment", rater_assignment},
      {"feedback-bands", feedback_bands},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.ok;
    std::printf("%s %s%s%s\n", o.ok ? "PASS" : "FAIL", name, o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
