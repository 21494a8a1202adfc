#include "gistline/error.hpp"
#include "gistline/schema.hpp"
#include "gistline/text.hpp"

namespace gistline::schema {
namespace {

struct SayParser {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  std::string quoted() {
    skip_ws();
    if (pos >= s.size() || s[pos] != '"') throw ContentError("say needs a quoted text");
    ++pos;
    std::string out;
    while (pos < s.size() && s[pos] != '"') {
      if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
      out.push_back(s[pos++]);
    }
    if (pos >= s.size()) throw ContentError("unterminated quoted text");
    ++pos;
    return out;
  }

  // key=value or key=( ... ); returns false at end of line
  bool attribute(std::string& key, std::string& value) {
    skip_ws();
    if (pos >= s.size()) return false;
    const auto eq = s.find('=', pos);
    if (eq == std::string_view::npos) throw ContentError("expected key=value");
    key = std::string(text::trim(s.substr(pos, eq - pos)));
    pos = eq + 1;
    if (pos < s.size() && s[pos] == '(') {
      const auto close = s.find(')', pos);
      if (close == std::string_view::npos) throw ContentError("unbalanced '(' in " + key);
      value = std::string(text::trim(s.substr(pos + 1, close - pos - 1)));
      pos = close + 1;
    } else {
      const auto end = s.find_first_of(" \t", pos);
      value = std::string(s.substr(pos, end == std::string_view::npos ? end : end - pos));
      pos = end == std::string_view::npos ? s.size() : end;
    }
    return true;
  }
};

Episode parse_say(std::string_view rest) {
  SayParser p{rest};
  Episode e;
  e.kind = EpisodeKind::Say;
  e.text = p.quoted();
  std::string key;
  std::string value;
  while (p.attribute(key, value)) {
    if (key == "gist") {
      e.gist = transduction::tokenize(value);
    } else if (key == "trees") {
      const auto slash = value.find('/');
      if (slash == std::string::npos) throw ContentError("trees= expects <gistTree>/<reactTree>");
      e.gist_tree = value.substr(0, slash);
      e.reaction_tree = value.substr(slash + 1);
    } else if (key == "answered") {
      e.answered.push_back(transduction::parse_pattern(value));
    } else {
      throw ContentError("unknown say attribute '" + key + "'");
    }
  }
  return e;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<DialogueSchema> parse_schemas(std::string_view content, std::string_view source) {
  std::vector<DialogueSchema> schemas;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    try {
      const std::string_view line = text::strip_comment(raw);
      if (text::trim(line).empty()) continue;
      const std::size_t level = text::indentation(line);
      const auto [keyword, rest] = text::split_keyword(line);
      if (level == 0) {
        if (keyword != "schema") throw ContentError("expected 'schema <name> ...' at top level");
        const auto words = text::split_ws(rest);
        if (words.empty()) throw ContentError("schema needs a name");
        DialogueSchema schema;
        schema.name = words[0];
        for (std::size_t i = 1; i < words.size(); ++i) {
          const auto eq = words[i].find('=');
          const std::string key = words[i].substr(0, eq);
          const std::string value = eq == std::string::npos ? "" : words[i].substr(eq + 1);
          if (key == "topic") {
            schema.topic = value;
          } else if (key == "intensity") {
            schema.intensity = parse_intensity(value);
            if (!schema.intensity) throw ContentError("unknown intensity '" + value + "'");
          } else {
            throw ContentError("unknown schema attribute '" + words[i] + "'");
          }
        }
        schemas.push_back(std::move(schema));
        continue;
      }
      if (schemas.empty()) throw ContentError("episode outside of a schema");
      if (level != 1) throw ContentError("episodes are indented one level");
      auto& eps = schemas.back().episodes;
      if (keyword == "say") {
        eps.push_back(parse_say(rest));
      } else if (keyword == "user" && rest.empty()) {
        eps.push_back(Episode::user());
      } else if (keyword == "break" && rest.empty()) {
        eps.push_back(Episode::brk());
      } else if (keyword == "end" && rest.empty()) {
        eps.push_back(Episode::end());
      } else {
        throw ContentError("unknown episode '" + std::string(text::trim(line)) + "'");
      }
    } catch (const ContentError& e) {
      throw ContentError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return schemas;
}

std::string format_schema(const DialogueSchema& schema) {
  std::string out = "schema " + schema.name;
  if (!schema.topic.empty()) out += " topic=" + schema.topic;
  if (schema.intensity) out += " intensity=" + std::string(intensity_name(*schema.intensity));
  out += '\n';
  for (const auto& e : schema.episodes) {
    switch (e.kind) {
      case EpisodeKind::Say:
        out += "  say " + quote(e.text) + " gist=( " + transduction::join(e.gist) + " ) trees=" +
               e.gist_tree + "/" + e.reaction_tree;
        for (const auto& p : e.answered) out += " answered=( " + transduction::format_pattern(p) + " )";
        break;
      case EpisodeKind::ExpectUser: out += "  user"; break;
      case EpisodeKind::Break: out += "  break"; break;
      case EpisodeKind::End: out += "  end"; break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace gistline::schema
