#pragma once

#include <optional>
#include <string>

#include "hyrule/decide.hpp"
#include "hyrule/operational.hpp"

namespace hyrule {

enum class TraceFormat { None, Text, Dot };
std::optional<TraceFormat> parse_trace_format(const std::string& name);

/// One header line, then one line per node indented by depth.
std::string trace_text(const DerivationTree& tree);
std::string trace_dot(const DerivationTree& tree);

/// Node constraints are printed as DNFs over the table atoms.
std::string trace_text(const MaximalTree& tree, const ModelTable& table);
std::string trace_dot(const MaximalTree& tree, const ModelTable& table);

/// Writes `content` to `path`; throws std::runtime_error naming the path.
void write_file(const std::string& path, const std::string& content);

}  // namespace hyrule
