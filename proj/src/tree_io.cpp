#include "gistline/error.hpp"
#include "gistline/text.hpp"
#include "gistline/transduction.hpp"

#include <charconv>
#include <functional>

namespace gistline::transduction {
namespace {

bool parse_count(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool is_token_word(std::string_view w) {
  const Tokens t = tokenize(w);
  return t.size() == 1 && t[0] == w;
}

PatternElement parse_element(std::string_view item) {
  if (item == "*") return Wildcard{};
  if (item.front() == '*') {
    std::size_t n = 0;
    if (!parse_count(item.substr(1), n) || n == 0) {
      throw ContentError("bad bounded wildcard '" + std::string(item) + "'");
    }
    return Wildcard{n};
  }
  if (item.front() == '.') {
    std::string name(item.substr(1));
    if (!is_feature_name(name)) throw ContentError("bad feature name '" + std::string(item) + "'");
    return Feature{std::move(name)};
  }
  if (!is_token_word(item)) throw ContentError("pattern word '" + std::string(item) + "' is not a token");
  return Literal{std::string(item)};
}

TemplatePart parse_part(std::string_view item) {
  std::size_t n = 0;
  if (parse_count(item, n)) {
    if (n == 0) throw ContentError("template refs are 1-based");
    return TemplateRef{n, false};
  }
  if (item.size() > 1 && item.back() == '!' && parse_count(item.substr(0, item.size() - 1), n)) {
    if (n == 0) throw ContentError("template refs are 1-based");
    return TemplateRef{n, true};
  }
  if (item.front() == '\\') item.remove_prefix(1);
  if (!is_token_word(item)) throw ContentError("template word '" + std::string(item) + "' is not a token");
  return TemplateLiteral{std::string(item)};
}

// "( a b c )" -> "a b c"
std::string_view parenthesized(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw ContentError("expected '( ... )' but got '" + std::string(s) + "'");
  }
  return text::trim(s.substr(1, s.size() - 2));
}

Directive parse_directive(std::string_view keyword, std::string_view rest) {
  Directive d;
  if (keyword == "gist" || keyword == "react") {
    d.kind = keyword == "gist" ? DirectiveKind::Gist : DirectiveKind::Reaction;
    d.tmpl = parse_template(parenthesized(rest));
    return d;
  }
  const auto words = text::split_ws(rest);
  if (keyword == "schema") {
    if (words.size() != 1) throw ContentError("expected 'schema <name>'");
    d.kind = DirectiveKind::Schema;
    d.target = words[0];
    return d;
  }
  // subtree <name> [on K]
  if (words.size() != 1 && !(words.size() == 3 && words[1] == "on")) {
    throw ContentError("expected 'subtree <name> [on K]'");
  }
  d.kind = DirectiveKind::Subtree;
  d.target = words[0];
  if (words.size() == 3) {
    std::size_t k = 0;
    if (!parse_count(words[2], k) || k == 0) throw ContentError("bad subtree scope '" + words[2] + "'");
    d.scope = k;
  }
  return d;
}

TreeNode& node_by_path(TransductionTree& tree, const std::vector<std::size_t>& path) {
  std::vector<TreeNode>* list = &tree.nodes;
  TreeNode* node = nullptr;
  for (std::size_t i : path) {
    node = &(*list)[i];
    list = &node->children;
  }
  return *node;
}

}  // namespace

Pattern parse_pattern(std::string_view body) {
  Pattern p;
  for (const auto& item : text::split_ws(body)) p.elements.push_back(parse_element(item));
  return p;
}

Template parse_template(std::string_view body) {
  Template t;
  for (const auto& item : text::split_ws(body)) t.parts.push_back(parse_part(item));
  return t;
}

std::string format_pattern(const Pattern& pattern) {
  std::string out;
  for (const auto& e : pattern.elements) {
    if (!out.empty()) out.push_back(' ');
    if (const auto* lit = std::get_if<Literal>(&e)) {
      out += lit->word;
    } else if (const auto* w = std::get_if<Wildcard>(&e)) {
      out += '*';
      if (w->max_len) out += std::to_string(*w->max_len);
    } else {
      out += '.' + std::get<Feature>(e).name;
    }
  }
  return out;
}

std::string format_template(const Template& tmpl) {
  std::string out;
  for (const auto& part : tmpl.parts) {
    if (!out.empty()) out.push_back(' ');
    if (const auto* lit = std::get_if<TemplateLiteral>(&part)) {
      std::size_t n = 0;
      const bool numeric = parse_count(lit->word, n);
      if (numeric) out.push_back('\\');
      out += lit->word;
    } else {
      const auto& ref = std::get<TemplateRef>(part);
      out += std::to_string(ref.index);
      if (ref.invert) out.push_back('!');
    }
  }
  return out;
}

std::vector<TransductionTree> parse_trees(std::string_view content, std::string_view source) {
  std::vector<TransductionTree> trees;
  std::vector<std::size_t> path;  // path to the most recent match node, one entry per level
  std::size_t line_no = 0;

  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    try {
      const std::string_view line = text::strip_comment(raw);
      if (text::trim(line).empty()) continue;
      const auto layout = text::indentation(line);
      const std::string_view body = text::trim(line);
      const auto [keyword, rest] = text::split_keyword(body);

      if (layout == 0) {
        if (keyword != "tree") throw ContentError("expected 'tree <name>' at top level");
        const auto words = text::split_ws(rest);
        if (words.size() != 1 || !is_feature_name(words[0])) throw ContentError("bad tree header");
        trees.push_back(TransductionTree{words[0], {}});
        path.clear();
        continue;
      }
      if (trees.empty()) throw ContentError("node outside of a tree");
      TransductionTree& tree = trees.back();
      const std::size_t level = layout;  // 1-based depth below the header

      if (keyword == "match") {
        if (level > path.size() + 1) throw ContentError("indentation skips a level");
        path.resize(level - 1);
        std::vector<TreeNode>* siblings = &tree.nodes;
        if (!path.empty()) {
          TreeNode& parent = node_by_path(tree, path);
          if (parent.directive) throw ContentError("a terminal node cannot have children");
          siblings = &parent.children;
        }
        siblings->push_back(TreeNode{parse_pattern(parenthesized(rest)), std::nullopt, {}});
        path.push_back(siblings->size() - 1);
        continue;
      }
      if (keyword == "gist" || keyword == "react" || keyword == "schema" || keyword == "subtree") {
        if (level < 2 || level > path.size() + 1) {
          throw ContentError("directive must sit one level below a match line");
        }
        path.resize(level - 1);
        TreeNode& owner = node_by_path(tree, path);
        if (owner.directive) throw ContentError("node already has a directive");
        if (!owner.children.empty()) throw ContentError("a node with children cannot have a directive");
        owner.directive = parse_directive(keyword, rest);
        continue;
      }
      throw ContentError("unknown keyword '" + std::string(keyword) + "'");
    } catch (const ContentError& e) {
      throw ContentError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trees;
}

std::string format_tree(const TransductionTree& tree) {
  std::string out = "tree " + tree.name + "\n";
  std::function<void(const std::vector<TreeNode>&, std::size_t)> emit =
      [&](const std::vector<TreeNode>& nodes, std::size_t level) {
        for (const auto& node : nodes) {
          const std::string indent(level * 2, ' ');
          out += indent + "match ( " + format_pattern(node.pattern) + " )\n";
          if (node.directive) {
            const Directive& d = *node.directive;
            out += indent + "  ";
            switch (d.kind) {
              case DirectiveKind::Gist: out += "gist ( " + format_template(d.tmpl) + " )"; break;
              case DirectiveKind::Reaction: out += "react ( " + format_template(d.tmpl) + " )"; break;
              case DirectiveKind::Schema: out += "schema " + d.target; break;
              case DirectiveKind::Subtree:
                out += "subtree " + d.target;
                if (d.scope) out += " on " + std::to_string(*d.scope);
                break;
            }
            out += '\n';
          }
          emit(node.children, level + 1);
        }
      };
  emit(tree.nodes, 1);
  return out;
}

void parse_lexicon(std::string_view content, FeatureLexicon& lexicon, std::string_view source) {
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    const std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    try {
      if (auto arrow = line.find("=>"); arrow != std::string_view::npos) {
        const auto lhs = text::split_ws(line.substr(0, arrow));
        const auto rhs = text::split_ws(line.substr(arrow + 2));
        if (lhs.size() != 1 || rhs.empty()) throw ContentError("expected 'feature => feature ...'");
        for (const auto& to : rhs) lexicon.add_implication(lhs[0], to);
      } else if (auto colon = line.find(':'); colon != std::string_view::npos) {
        const auto words = text::split_ws(line.substr(0, colon));
        const auto features = text::split_ws(line.substr(colon + 1));
        if (words.empty() || features.empty()) throw ContentError("expected 'word : feature ...'");
        for (const auto& w : words) {
          if (!is_token_word(w)) throw ContentError("lexicon word '" + w + "' is not a token");
          lexicon.add_word(w, features);
        }
      } else {
        throw ContentError("expected 'word : features' or 'feature => feature'");
      }
    } catch (const ContentError& e) {
      throw ContentError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string format_lexicon(const FeatureLexicon& lexicon) {
  std::string out;
  for (const auto& [word, features] : lexicon.word_features()) {
    out += word + " :";
    for (const auto& f : features) out += " " + f;
    out += '\n';
  }
  for (const auto& [from, tos] : lexicon.implications()) {
    for (const auto& to : tos) out += from + " => " + to + '\n';
  }
  return out;
}

}  // namespace gistline::transduction
