#ifndef EXDAG_SERIALIZE_HPP
#define EXDAG_SERIALIZE_HPP

#include "exdag/dag.hpp"

#include <string>
#include <string_view>

namespace exdag {

/// Line-based text form, one reachable node per line:
///
///   <id> = leaf <binary64>
///   <id> = neg|add|sub|mul|div <child-id>...
///   <id> = root <degree> <child-id>
///   root <id>
///
/// A node line may end in `ext=<k>` to carry k external references. Blank
/// lines and lines starting with '#' are ignored by the parser.
std::string serialize(const ExpressionDag &dag);

/// Throws ParseError (with line number) on malformed lines, duplicate or
/// undefined ids, and cycles.
ExpressionDag parse(std::string_view text);

/// Graphviz description with `kind@depth` labels; shared nodes appear once.
std::string export_dot(const ExpressionDag &dag);

} // namespace exdag

#endif // EXDAG_SERIALIZE_HPP
