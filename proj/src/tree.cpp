#include "gistline/error.hpp"
#include "gistline/transduction.hpp"

#include <functional>

namespace gistline::transduction {
namespace {

constexpr std::size_t kMaxSubtreeDepth = 64;

std::string path_string(std::string_view tree, const std::vector<std::size_t>& path) {
  std::string out(tree);
  for (std::size_t i = 0; i < path.size(); ++i) {
    out += (i == 0 ? '#' : '.');
    out += std::to_string(path[i] + 1);
  }
  return out;
}

struct Evaluator {
  const TreeSet& trees;
  const FeatureLexicon& lexicon;
  const DeixisMap& deixis;

  std::optional<TreeResult> tree(std::string_view name, std::span<const Token> input,
                                 std::size_t depth) {
    if (depth > kMaxSubtreeDepth) {
      throw ContentError("subtree nesting deeper than " + std::to_string(kMaxSubtreeDepth) +
                         " at tree '" + std::string(name) + "'");
    }
    const TransductionTree* t = trees.find(name);
    if (t == nullptr) throw ContentError("unresolved tree reference '" + std::string(name) + "'");
    std::vector<std::size_t> path;
    return nodes(*t, t->nodes, input, path, depth);
  }

  std::optional<TreeResult> nodes(const TransductionTree& t, const std::vector<TreeNode>& list,
                                  std::span<const Token> input, std::vector<std::size_t>& path,
                                  std::size_t depth) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const TreeNode& node = list[i];
      auto captures = match(node.pattern, input, lexicon);
      if (!captures) continue;
      path.push_back(i);
      std::optional<TreeResult> result;
      if (node.directive) {
        result = terminal(t, *node.directive, input, *captures, path, depth);
      } else {
        result = nodes(t, node.children, input, path, depth);
      }
      if (result) return result;
      path.pop_back();
    }
    return std::nullopt;
  }

  std::optional<TreeResult> terminal(const TransductionTree& t, const Directive& d,
                                     std::span<const Token> input, const Captures& captures,
                                     const std::vector<std::size_t>& path, std::size_t depth) {
    TraceHop hop{t.name, path, Tokens(input.begin(), input.end()), captures};
    if (d.kind == DirectiveKind::Subtree) {
      std::span<const Token> sub = input;
      if (d.scope) {
        if (*d.scope == 0 || *d.scope > captures.spans.size()) {
          throw ContentError("subtree scope " + std::to_string(*d.scope) + " out of range at " +
                             path_string(t.name, path));
        }
        sub = captures.spans[*d.scope - 1];
      }
      auto result = tree(d.target, sub, depth + 1);
      if (result) result->trace.insert(result->trace.begin(), std::move(hop));
      return result;
    }
    TreeResult result;
    result.kind = d.kind;
    if (d.kind == DirectiveKind::Schema) {
      result.schema = d.target;
    } else {
      result.tokens = instantiate(d.tmpl, captures, deixis, path_string(t.name, path));
    }
    result.trace.push_back(std::move(hop));
    return result;
  }
};

}  // namespace

void TreeSet::add(TransductionTree tree) {
  if (trees_.contains(tree.name)) throw ContentError("duplicate tree name '" + tree.name + "'");
  std::string name = tree.name;
  trees_.emplace(std::move(name), std::move(tree));
}

const TransductionTree* TreeSet::find(std::string_view name) const {
  auto it = trees_.find(name);
  return it == trees_.end() ? nullptr : &it->second;
}

std::vector<std::string> TreeSet::validate(const FeatureLexicon& lexicon) const {
  std::vector<std::string> violations;
  std::map<std::string, std::set<std::string>> edges;

  for (const auto& [name, tree] : trees_) {
    std::vector<std::size_t> path;
    std::function<void(const std::vector<TreeNode>&)> walk = [&](const std::vector<TreeNode>& list) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        const TreeNode& node = list[i];
        path.push_back(i);
        const std::string where = path_string(name, path);
        for (const auto& e : node.pattern.elements) {
          if (const auto* f = std::get_if<Feature>(&e); f && !lexicon.knows_feature(f->name)) {
            violations.push_back(where + ": unknown feature '." + f->name + "'");
          }
        }
        if (node.directive && !node.children.empty()) {
          violations.push_back(where + ": node has both a directive and children");
        } else if (!node.directive && node.children.empty()) {
          violations.push_back(where + ": node has neither a directive nor children");
        }
        if (node.directive) {
          const Directive& d = *node.directive;
          const std::size_t arity = node.pattern.arity();
          if ((d.kind == DirectiveKind::Gist || d.kind == DirectiveKind::Reaction) &&
              d.tmpl.max_ref() > arity) {
            violations.push_back(where + ": template refers to element " +
                                 std::to_string(d.tmpl.max_ref()) + " of a " +
                                 std::to_string(arity) + "-element pattern");
          }
          if (d.kind == DirectiveKind::Subtree) {
            if (!contains(d.target)) {
              violations.push_back(where + ": subtree '" + d.target + "' does not exist");
            } else {
              edges[name].insert(d.target);
            }
            if (d.scope && (*d.scope == 0 || *d.scope > arity)) {
              violations.push_back(where + ": subtree scope " + std::to_string(*d.scope) +
                                   " outside a " + std::to_string(arity) + "-element pattern");
            }
          }
        }
        walk(node.children);
        path.pop_back();
      }
    };
    walk(tree.nodes);
  }

  // Subtree reference cycles.
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::function<void(const std::string&, std::vector<std::string>&)> visit =
      [&](const std::string& n, std::vector<std::string>& stack) {
        color[n] = 1;
        stack.push_back(n);
        for (const auto& next : edges[n]) {
          if (color[next] == 1) {
            std::string cycle;
            bool on = false;
            for (const auto& s : stack) {
              if (s == next) on = true;
              if (on) cycle += s + " -> ";
            }
            violations.push_back("subtree cycle: " + cycle + next);
          } else if (color[next] == 0) {
            visit(next, stack);
          }
        }
        stack.pop_back();
        color[n] = 2;
      };
  for (const auto& [name, tree] : trees_) {
    std::vector<std::string> stack;
    if (color[name] == 0) visit(name, stack);
  }
  return violations;
}

std::optional<TreeResult> evaluate(const TreeSet& trees, std::string_view tree_name,
                                   std::span<const Token> input, const FeatureLexicon& lexicon,
                                   const DeixisMap& deixis) {
  Evaluator ev{trees, lexicon, deixis};
  return ev.tree(tree_name, input, 0);
}

const TreeNode* node_at(const TransductionTree& tree, std::span<const std::size_t> path) {
  const std::vector<TreeNode>* list = &tree.nodes;
  const TreeNode* node = nullptr;
  for (std::size_t i : path) {
    if (i >= list->size()) return nullptr;
    node = &(*list)[i];
    list = &node->children;
  }
  return node;
}

}  // namespace gistline::transduction
