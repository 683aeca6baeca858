#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "hyrule/operational.hpp"
#include "hyrule/program.hpp"
#include "hyrule/theory.hpp"
#include "hyrule/trace.hpp"

namespace hyrule {

enum class Mode { Declarative, Operational, Decide };
const char* to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct SessionConfig {
  std::string program_path;
  /// Theory file; when absent the program's inline theory or the file
  /// `<name>.th` next to the program for `#theory <name>` is used.
  std::optional<std::string> theory_path;
  Mode mode = Mode::Operational;
  std::size_t max_rank = 8;
  std::size_t node_budget = 10000;
  SelectionRule selection = SelectionRule::Leftmost;
  TraceFormat trace = TraceFormat::None;
  std::string trace_path;
  /// Cap on theory models printed by `wf`.
  std::size_t model_cap = 16;
};

/// Exit status 0 on success, 1 on refusal or resource limits, 2 on
/// unreadable or malformed input.
struct Report {
  int exit_code = 0;
  std::string text;
};

/// Unreadable or malformed input file; the message names the path.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedProgram {
  HybridProgram program;
  TheorySpec theory;
};

/// Reads the program and its theory; throws InputError.
LoadedProgram load(const std::string& program_path, const std::optional<std::string>& theory_path);

Report run_query(const SessionConfig& cfg, const std::string& goal_text);
/// Safeness and congruence report, one line per rule.
Report run_check(const SessionConfig& cfg);
/// Well-founded model of P/M0 for each distinct theory model M0.
Report run_wf(const SessionConfig& cfg);

}  // namespace hyrule
