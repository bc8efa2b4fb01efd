#include "exdag/serialize.hpp"

#include "exdag/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace exdag {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
      ++j;
    }
    if (j > i) {
      out.push_back(line.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_integer(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  // strtod accepts forms from_chars<double> may not on older toolchains.
  std::string tmp(s);
  char *end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) {
    return std::nullopt;
  }
  return v;
}

std::optional<OpKind> parse_kind(std::string_view s) {
  for (OpKind k : {OpKind::leaf, OpKind::neg, OpKind::add, OpKind::sub,
                   OpKind::mul, OpKind::div, OpKind::root}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

struct PendingNode {
  std::size_t line = 0;
  OpKind kind = OpKind::leaf;
  double value = 0;
  int degree = 0;
  std::vector<std::uint64_t> children;
  std::uint32_t external_refs = 0;
};

} // namespace

std::string serialize(const ExpressionDag &dag) {
  std::ostringstream out;
  for (NodeId id : dag.reachable()) {
    const Node &n = dag.node(id);
    out << id.value << " = " << to_string(n.kind);
    if (n.is_leaf()) {
      out << ' ' << format_double(n.value);
    } else {
      if (n.kind == OpKind::root) {
        out << ' ' << n.degree;
      }
      for_each_child(n, [&](NodeId c) { out << ' ' << c.value; });
    }
    if (n.external_ref_count > 0) {
      out << " ext=" << n.external_ref_count;
    }
    out << '\n';
  }
  out << "root " << dag.root().value << '\n';
  return out.str();
}

ExpressionDag parse(std::string_view text) {
  std::unordered_map<std::uint64_t, PendingNode> defs;
  std::vector<std::uint64_t> order;
  std::optional<std::uint64_t> root;
  std::size_t root_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().starts_with('#')) {
      if (eol == text.size()) {
        break;
      }
      continue;
    }
    if (tokens[0] == "root" && tokens.size() == 2) {
      if (root) {
        throw ParseError(line_no, "duplicate root marker");
      }
      root = parse_integer<std::uint64_t>(tokens[1]);
      if (!root) {
        throw ParseError(line_no, "bad root id '" + std::string(tokens[1]) + "'");
      }
      root_line = line_no;
      continue;
    }
    if (tokens.size() < 3 || tokens[1] != "=") {
      throw ParseError(line_no, "expected '<id> = <op> ...'");
    }
    const auto id = parse_integer<std::uint64_t>(tokens[0]);
    if (!id) {
      throw ParseError(line_no, "bad node id '" + std::string(tokens[0]) + "'");
    }
    if (defs.contains(*id)) {
      throw ParseError(line_no, "duplicate node id " + std::to_string(*id));
    }
    const auto kind = parse_kind(tokens[2]);
    if (!kind) {
      throw ParseError(line_no, "unknown operation '" + std::string(tokens[2]) + "'");
    }

    PendingNode pending;
    pending.line = line_no;
    pending.kind = *kind;
    std::vector<std::string_view> args(tokens.begin() + 3, tokens.end());
    if (!args.empty() && args.back().starts_with("ext=")) {
      const auto ext = parse_integer<std::uint32_t>(args.back().substr(4));
      if (!ext) {
        throw ParseError(line_no, "bad external reference count");
      }
      pending.external_refs = *ext;
      args.pop_back();
    }

    if (*kind == OpKind::leaf) {
      if (args.size() != 1) {
        throw ParseError(line_no, "leaf expects one value");
      }
      const auto v = parse_double(args[0]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(line_no, "bad leaf value '" + std::string(args[0]) + "'");
      }
      pending.value = *v;
    } else {
      if (*kind == OpKind::root) {
        if (args.empty()) {
          throw ParseError(line_no, "root expects a degree");
        }
        const auto d = parse_integer<int>(args[0]);
        if (!d || *d < 2) {
          throw ParseError(line_no, "root degree must be an integer >= 2");
        }
        pending.degree = *d;
        args.erase(args.begin());
      }
      if (static_cast<int>(args.size()) != arity(*kind)) {
        throw ParseError(line_no, std::string(to_string(*kind)) + " expects " +
                                      std::to_string(arity(*kind)) + " child id(s)");
      }
      for (auto a : args) {
        const auto c = parse_integer<std::uint64_t>(a);
        if (!c) {
          throw ParseError(line_no, "bad child id '" + std::string(a) + "'");
        }
        pending.children.push_back(*c);
      }
    }
    order.push_back(*id);
    defs.emplace(*id, std::move(pending));
    if (eol == text.size()) {
      break;
    }
  }

  if (!root) {
    throw ParseError(line_no, "missing 'root <id>' line");
  }
  if (!defs.contains(*root)) {
    throw ParseError(root_line, "undefined id " + std::to_string(*root));
  }
  for (auto id : order) {
    const PendingNode &p = defs.at(id);
    for (auto c : p.children) {
      if (!defs.contains(c)) {
        throw ParseError(p.line, "undefined id " + std::to_string(c));
      }
    }
  }

  // Iterative DFS post-order; a grey child means a cycle.
  enum class Mark : std::uint8_t { white, grey, black };
  std::unordered_map<std::uint64_t, Mark> mark;
  std::unordered_map<std::uint64_t, NodeId> built;
  ExpressionDag dag;
  for (auto start : order) {
    if (mark[start] != Mark::white) {
      continue;
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::grey;
    while (!stack.empty()) {
      auto &[cur, next_child] = stack.back();
      const PendingNode &p = defs.at(cur);
      if (next_child < p.children.size()) {
        const auto c = p.children[next_child++];
        const Mark m = mark[c];
        if (m == Mark::grey) {
          throw ParseError(p.line, "cycle through id " + std::to_string(c));
        }
        if (m == Mark::white) {
          mark[c] = Mark::grey;
          stack.emplace_back(c, 0);
        }
        continue;
      }
      NodeId made;
      if (p.kind == OpKind::leaf) {
        made = dag.make_leaf(p.value);
      } else if (p.children.size() == 1) {
        made = dag.make_op(p.kind, built.at(p.children[0]), std::nullopt, p.degree);
      } else {
        made = dag.make_op(p.kind, built.at(p.children[0]), built.at(p.children[1]));
      }
      if (p.external_refs > 0) {
        dag.add_external_ref(made, p.external_refs);
      }
      built.emplace(cur, made);
      mark[cur] = Mark::black;
      stack.pop_back();
    }
  }
  dag.set_root(built.at(*root));
  return dag;
}

std::string export_dot(const ExpressionDag &dag) {
  std::ostringstream out;
  out << "digraph expression_dag {\n";
  const auto ids = dag.reachable();
  for (NodeId id : ids) {
    const Node &n = dag.node(id);
    out << "  n" << id.value << " [label=\"" << to_string(n.kind) << '@'
        << n.subtree_depth << "\"];\n";
  }
  for (NodeId id : ids) {
    for_each_child(dag.node(id), [&](NodeId c) {
      out << "  n" << id.value << " -> n" << c.value << ";\n";
    });
  }
  out << "}\n";
  return out.str();
}

} // namespace exdag
