#include "gistline/content.hpp"
#include "gistline/dialogue.hpp"
#include "gistline/error.hpp"
#include "gistline/evalkit.hpp"
#include "gistline/service.hpp"
#include "gistline/text.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gistline;

namespace {

std::string default_pack() {
#ifdef GISTLINE_DEFAULT_PACK
  return GISTLINE_DEFAULT_PACK;
#else
  return "content/default";
#endif
}

content::ContentPack load_checked(const std::string& dir) {
  auto pack = content::load_pack(dir);
  const auto violations = content::validate(pack);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "invalid pack: " << v << '\n';
    throw ContentError("pack '" + dir + "' has " + std::to_string(violations.size()) + " violation(s)");
  }
  return pack;
}

void print_output(const dialogue::AgentOutput& out) {
  for (const auto& item : out.items) {
    switch (item.kind) {
      case dialogue::OutputKind::Utterance: std::cout << "agent> " << item.text << '\n'; break;
      case dialogue::OutputKind::FeedbackText: std::cout << "\n[feedback] " << item.text << "\n\n"; break;
      case dialogue::OutputKind::SessionSummary: std::cout << "\n[summary] " << item.text << '\n'; break;
      case dialogue::OutputKind::SessionOver: std::cout << "[session over]\n"; break;
    }
  }
}

std::vector<evalkit::Transcript> read_transcripts(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<evalkit::Transcript> out;
  for (const auto& f : files) {
    out.push_back(evalkit::parse_transcript(text::read_file(f.string()), f.stem().string()));
  }
  return out;
}

// label <tab> original id <tab> condition
void apply_mapping(std::vector<evalkit::Transcript>& transcripts, const std::string& map_file) {
  std::map<std::string, evalkit::Condition> conditions;
  for (const auto& line : text::split_lines(text::read_file(map_file))) {
    const auto fields = text::split_ws(text::strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() != 3) throw PreconditionError("bad mapping line '" + std::string(line) + "'");
    if (auto c = evalkit::parse_condition(fields[2])) conditions[fields[0]] = *c;
  }
  for (auto& t : transcripts) {
    if (!t.condition) {
      if (auto it = conditions.find(t.id); it != conditions.end()) t.condition = it->second;
    }
  }
}

int run_chat(const std::string& pack_dir, std::uint64_t seed, int session) {
  const auto pack = load_checked(pack_dir);
  dialogue::Engine engine(pack);
  const auto curriculum = content::compose_curriculum(pack.topics, seed);
  auto [state, out] = engine.start_session("local", curriculum, session, seed);
  std::cout << "Session " << session << ": ";
  for (std::size_t i = 0; i < state.topics.size(); ++i) std::cout << (i ? ", " : "") << state.topics[i];
  std::cout << "\n(type /quit to leave)\n\n";
  print_output(out);
  std::string line;
  while (!state.over) {
    std::cout << "you> " << std::flush;
    if (!std::getline(std::cin, line) || line == "/quit") break;
    print_output(engine.handle_turn(state, line));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gistline: a rule-based conversation practice agent"};
  app.require_subcommand(1);

  std::string pack_dir = default_pack();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string store = "store";
  std::optional<std::uint64_t> base_seed;
  serve->add_option("--pack", pack_dir, "Content pack directory");
  serve->add_option("--port", port, "Port to listen on");
  serve->add_option("--host", host, "Address to bind");
  serve->add_option("--store", store, "Event log directory (GISTLINE_STORE overrides)");
  serve->add_option("--seed", base_seed, "Fix user seeds for reproducible runs");

  auto* chat = app.add_subcommand("chat", "Talk to the agent in the terminal");
  std::uint64_t chat_seed = 1;
  int chat_session = 1;
  chat->add_option("--pack", pack_dir, "Content pack directory");
  chat->add_option("--seed", chat_seed, "Curriculum and session seed");
  chat->add_option("--session", chat_session, "Session number, 1-10")->check(CLI::Range(1, 10));

  auto* compose = app.add_subcommand("compose", "Compose the ten-session curriculum");
  std::uint64_t compose_seed = 0;
  std::string compose_out;
  compose->add_option("--pack", pack_dir, "Content pack directory");
  compose->add_option("--seed", compose_seed, "Shuffle seed")->required();
  compose->add_option("--out", compose_out, "Output JSON file (stdout if omitted)");

  auto* validate = app.add_subcommand("validate", "Check a content pack");
  validate->add_option("--pack", pack_dir, "Content pack directory");

  auto* eval = app.add_subcommand("eval", "Evaluation tools");
  eval->require_subcommand(1);

  auto* deid = eval->add_subcommand("deid", "De-identify transcripts");
  std::string names_file, deid_in, deid_out, deid_map;
  std::uint64_t deid_seed = 0;
  deid->add_option("--names", names_file, "Name list, one or more per line")->required();
  deid->add_option("--in", deid_in, "Directory of transcripts")->required();
  deid->add_option("--out", deid_out, "Output directory")->required();
  deid->add_option("--seed", deid_seed, "Label seed");
  deid->add_option("--map", deid_map, "Where to write the label mapping (default: <out>/../mapping.tsv)");

  auto* assign = eval->add_subcommand("assign", "Assign transcripts to raters");
  evalkit::AssignmentParams params;
  assign->add_option("--t", params.transcripts, "Number of transcripts")->required();
  assign->add_option("--r", params.raters, "Number of raters")->required();
  assign->add_option("--coverage", params.coverage, "Raters per transcript")->required();
  assign->add_option("--load", params.load, "Maximum transcripts per rater")->required();
  assign->add_option("--seed", params.seed, "Shuffle seed");

  auto* aggregate = eval->add_subcommand("aggregate", "Aggregate rating sheets into a report");
  std::string sheets_file, transcripts_dir, report_out, map_file, valence_file, series_file;
  std::size_t window = 3;
  aggregate->add_option("--sheets", sheets_file, "Rating sheets CSV")->required();
  aggregate->add_option("--transcripts", transcripts_dir, "Directory of transcripts")->required();
  aggregate->add_option("--out", report_out, "Report file")->required();
  aggregate->add_option("--map", map_file, "Label mapping from 'eval deid'");
  aggregate->add_option("--valence", valence_file, "Valence lexicon for trajectories");
  aggregate->add_option("--window", window, "Moving average window");
  aggregate->add_option("--series", series_file, "Trajectory series file (default: <out>.series.tsv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      if (const char* env = std::getenv(service::kStoreEnv); env != nullptr && *env != '\0') store = env;
      const auto pack = load_checked(pack_dir);
      service::ServiceOptions options;
      options.base_seed = base_seed;
      service::Service svc(pack, store, options);
      httplib::Server server;
      server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
      server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
      service::mount_routes(server, svc);
      std::cerr << "serving on http://" << host << ":" << port << " (store " << svc.store().string() << ")\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << '\n';
        return 1;
      }
      return 0;
    }
    if (*chat) return run_chat(pack_dir, chat_seed, chat_session);
    if (*compose) {
      const auto pack = content::load_pack(pack_dir);
      const auto curriculum = content::compose_curriculum(pack.topics, compose_seed);
      const auto json = content::curriculum_to_json(curriculum, pack.topics);
      if (compose_out.empty()) {
        std::cout << json;
      } else {
        text::write_file(compose_out, json);
      }
      return 0;
    }
    if (*validate) {
      const auto pack = content::load_pack(pack_dir);
      const auto violations = content::validate(pack);
      for (const auto& v : violations) std::cout << v << '\n';
      if (violations.empty()) {
        std::cout << "ok: " << pack.topics.size() << " topics, " << pack.schemas.size() << " schemas, "
                  << pack.trees.size() << " trees\n";
      }
      return violations.empty() ? 0 : 1;
    }
    if (*deid) {
      const auto names = evalkit::parse_names(text::read_file(names_file));
      const auto transcripts = read_transcripts(deid_in);
      std::vector<evalkit::DeidMapping> mapping;
      const auto scrubbed = evalkit::deidentify_all(transcripts, names, deid_seed, &mapping);
      fs::create_directories(deid_out);
      for (const auto& t : scrubbed) {
        text::write_file((fs::path(deid_out) / (t.id + ".txt")).string(), evalkit::format_transcript(t));
      }
      if (deid_map.empty()) deid_map = (fs::path(deid_out).parent_path() / "mapping.tsv").string();
      std::string map_text = "# label\toriginal id\tcondition\n";
      for (const auto& m : mapping) {
        map_text += m.label + "\t" + m.original_id + "\t" +
                    (m.condition ? std::string(evalkit::condition_name(*m.condition)) : "-") + "\n";
      }
      text::write_file(deid_map, map_text);
      std::cout << scrubbed.size() << " transcripts written to " << deid_out << ", mapping in " << deid_map << '\n';
      return 0;
    }
    if (*assign) {
      const auto a = evalkit::assign_raters(params);
      for (std::size_t r = 0; r < a.by_rater.size(); ++r) {
        std::cout << "rater" << (r + 1) << ':';
        for (auto t : a.by_rater[r]) std::cout << ' ' << (t + 1);
        std::cout << '\n';
      }
      return 0;
    }
    if (*aggregate) {
      const auto sheets = evalkit::parse_sheets(text::read_file(sheets_file));
      auto transcripts = read_transcripts(transcripts_dir);
      if (!map_file.empty()) apply_mapping(transcripts, map_file);
      const auto report = evalkit::aggregate(sheets, transcripts);
      text::write_file(report_out, evalkit::format_report(report));

      feedback::ValenceLexicon valence;
      if (valence_file.empty()) {
        const auto fallback = fs::path(default_pack()) / "valence.txt";
        if (fs::exists(fallback)) valence_file = fallback.string();
      }
      if (!valence_file.empty()) valence = feedback::parse_valence(text::read_file(valence_file), valence_file);
      if (series_file.empty()) series_file = report_out + ".series.tsv";
      std::string series = "transcript\tcondition\tturn\twords\tvalence\tsmoothed\n";
      for (const auto& t : transcripts) {
        const auto words = evalkit::verbosity(t);
        const auto points = evalkit::sentiment_trajectory(t, valence, window);
        const std::string cond = t.condition ? std::string(evalkit::condition_name(*t.condition)) : "-";
        for (std::size_t i = 0; i < points.size(); ++i) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "\t%zu\t%zu\t%.6f\t%.6f\n", points[i].turn,
                        i < words.per_user_turn.size() ? words.per_user_turn[i] : 0, points[i].raw,
                        points[i].smoothed);
          series += t.id + "\t" + cond + buf;
        }
      }
      text::write_file(series_file, series);
      std::cout << evalkit::format_report(report);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
