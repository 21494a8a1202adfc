#include "gistline/content.hpp"

#include "gistline/error.hpp"
#include "gistline/text.hpp"

#include <algorithm>
#include <functional>

namespace gistline::content {
namespace fs = std::filesystem;

const Topic* ContentPack::find_topic(std::string_view id) const {
  auto it = std::find_if(topics.begin(), topics.end(), [&](const Topic& t) { return t.id == id; });
  return it == topics.end() ? nullptr : &*it;
}

const schema::DialogueSchema* ContentPack::find_schema(std::string_view name) const {
  auto it = schemas.find(name);
  return it == schemas.end() ? nullptr : &it->second;
}

std::vector<std::string> ContentPack::topic_trees(const Topic& topic) const {
  std::vector<std::string> names;
  const auto* s = find_schema(topic.schema);
  if (s == nullptr) return names;
  for (const auto& e : s->episodes) {
    if (e.kind != schema::EpisodeKind::Say) continue;
    for (const auto* n : {&e.gist_tree, &e.reaction_tree}) {
      if (std::find(names.begin(), names.end(), *n) == names.end()) names.push_back(*n);
    }
  }
  return names;
}

namespace {

std::vector<fs::path> files_with_extension(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Topic> parse_topics(std::string_view content, const std::string& source) {
  std::vector<Topic> topics;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    const auto fields = text::split_fields(line);
    if (fields.size() != 4) throw ContentError(where + "expected 'id | title | tier | schema'");
    auto tier = schema::parse_intensity(fields[2]);
    if (!tier) throw ContentError(where + "unknown tier '" + fields[2] + "'");
    if (fields[0].empty() || fields[3].empty()) throw ContentError(where + "empty id or schema");
    for (const auto& t : topics) {
      if (t.id == fields[0]) throw ContentError(where + "duplicate topic id '" + fields[0] + "'");
    }
    topics.push_back(Topic{fields[0], fields[1], *tier, fields[3]});
  }
  return topics;
}

Persona parse_persona(std::string_view content, const std::string& source) {
  Persona persona;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    const auto line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const auto fields = text::split_fields(line);
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    if (fields.size() != 2 || fields[1].empty()) throw ContentError(where + "expected 'key | text'");
    if (fields[0] == "fact") {
      persona.facts.push_back(fields[1]);
    } else if (fields[0] == "closing") {
      persona.closings.push_back(fields[1]);
    } else if (fields[0] == "redirect") {
      persona.redirect = fields[1];
    } else {
      throw ContentError(where + "unknown persona key '" + fields[0] + "'");
    }
  }
  return persona;
}

}  // namespace

ContentPack load_pack(const fs::path& dir) {
  ContentPack pack;
  const fs::path topics_file = dir / "topics.txt";
  if (!fs::exists(topics_file)) throw ContentError("no topics: '" + topics_file.string() + "' missing");
  pack.topics = parse_topics(text::read_file(topics_file.string()), topics_file.string());
  if (pack.topics.empty()) throw ContentError("no topics in '" + topics_file.string() + "'");

  for (const auto& file : files_with_extension(dir / "trees", ".tree")) {
    for (auto& tree : transduction::parse_trees(text::read_file(file.string()), file.string())) {
      try {
        pack.trees.add(std::move(tree));
      } catch (const ContentError& e) {
        throw ContentError(file.string() + ": " + e.what());
      }
    }
  }
  for (const auto& file : files_with_extension(dir / "schemas", ".schema")) {
    for (auto& s : schema::parse_schemas(text::read_file(file.string()), file.string())) {
      if (pack.schemas.contains(s.name)) {
        throw ContentError(file.string() + ": duplicate schema name '" + s.name + "'");
      }
      std::string name = s.name;
      pack.schemas.emplace(std::move(name), std::move(s));
    }
  }
  if (fs::exists(dir / "lexicon.txt")) {
    const auto path = (dir / "lexicon.txt").string();
    transduction::parse_lexicon(text::read_file(path), pack.lexicon, path);
  }
  if (fs::exists(dir / "valence.txt")) {
    const auto path = (dir / "valence.txt").string();
    pack.valence = feedback::parse_valence(text::read_file(path), path);
  }
  if (fs::exists(dir / "advice.txt")) {
    const auto path = (dir / "advice.txt").string();
    pack.advice = feedback::parse_advice(text::read_file(path), path);
  }
  if (fs::exists(dir / "persona.txt")) {
    const auto path = (dir / "persona.txt").string();
    pack.persona = parse_persona(text::read_file(path), path);
  }
  return pack;
}

void write_pack(const ContentPack& pack, const fs::path& dir) {
  fs::create_directories(dir / "trees");
  fs::create_directories(dir / "schemas");
  std::string topics;
  for (const auto& t : pack.topics) {
    topics += t.id + " | " + t.title + " | " + std::string(schema::intensity_name(t.tier)) + " | " +
              t.schema + "\n";
  }
  text::write_file((dir / "topics.txt").string(), topics);
  for (const auto& [name, tree] : pack.trees.trees()) {
    text::write_file((dir / "trees" / (name + ".tree")).string(), transduction::format_tree(tree));
  }
  for (const auto& [name, s] : pack.schemas) {
    text::write_file((dir / "schemas" / (name + ".schema")).string(), schema::format_schema(s));
  }
  text::write_file((dir / "lexicon.txt").string(), transduction::format_lexicon(pack.lexicon));
  text::write_file((dir / "valence.txt").string(), feedback::format_valence(pack.valence));
  text::write_file((dir / "advice.txt").string(), feedback::format_advice(pack.advice));
  std::string persona;
  for (const auto& f : pack.persona.facts) persona += "fact | " + f + "\n";
  for (const auto& c : pack.persona.closings) persona += "closing | " + c + "\n";
  persona += "redirect | " + pack.persona.redirect + "\n";
  text::write_file((dir / "persona.txt").string(), persona);
}

std::vector<std::string> validate(const ContentPack& pack) {
  std::vector<std::string> v = pack.trees.validate(pack.lexicon);

  for (const auto& [name, tree] : pack.trees.trees()) {
    std::function<void(const std::vector<transduction::TreeNode>&)> walk =
        [&](const std::vector<transduction::TreeNode>& nodes) {
          for (const auto& node : nodes) {
            if (node.directive && node.directive->kind == transduction::DirectiveKind::Schema &&
                !pack.schemas.contains(node.directive->target)) {
              v.push_back("tree '" + name + "': schema '" + node.directive->target +
                          "' does not exist");
            }
            walk(node.children);
          }
        };
    walk(tree.nodes);
  }

  for (const auto& [name, s] : pack.schemas) {
    for (auto& msg : schema::check_structure(s)) v.push_back(std::move(msg));
    for (std::size_t i = 0; i < s.episodes.size(); ++i) {
      const auto& e = s.episodes[i];
      if (e.kind != schema::EpisodeKind::Say) continue;
      const std::string where = "schema '" + name + "' episode " + std::to_string(i + 1) + ": ";
      for (const auto* tree : {&e.gist_tree, &e.reaction_tree}) {
        if (!tree->empty() && !pack.trees.contains(*tree)) {
          v.push_back(where + "tree '" + *tree + "' does not exist");
        }
      }
      for (const auto& p : e.answered) {
        for (const auto& el : p.elements) {
          if (const auto* f = std::get_if<transduction::Feature>(&el);
              f && !pack.lexicon.knows_feature(f->name)) {
            v.push_back(where + "unknown feature '." + f->name + "'");
          }
        }
      }
    }
  }

  for (const auto& t : pack.topics) {
    const auto* s = pack.find_schema(t.schema);
    if (s == nullptr) {
      v.push_back("topic '" + t.id + "': schema '" + t.schema + "' does not exist");
      continue;
    }
    if (s->topic != t.id) v.push_back("topic '" + t.id + "': schema '" + s->name + "' has topic='" + s->topic + "'");
    if (s->intensity != t.tier) {
      v.push_back("topic '" + t.id + "': tier differs from schema '" + s->name + "' intensity");
    }
  }

  for (const char* required : {"answer", "fallback"}) {
    if (!pack.trees.contains(required)) v.push_back(std::string("missing required tree '") + required + "'");
  }
  for (const char* key : {"praise", "neutral-tip", "positivity-nudge", "summary-intro",
                          "summary-empty", "channel-strong", "channel-weak"}) {
    if (!pack.advice.entries().contains(key)) v.push_back(std::string("missing advice '") + key + "'");
  }
  return v;
}

}  // namespace gistline::content
