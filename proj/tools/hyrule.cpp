// Command-line front end: hyrule query | check | wf
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "hyrule/session.hpp"

int main(int argc, char** argv) {
  using namespace hyrule;
  CLI::App app{"hyrule: normal logic programs with constraints checked by an external theory"};
  app.require_subcommand(1);

  SessionConfig cfg;
  std::string theory_path, mode = "operational", select = "leftmost", trace = "none", goal;

  auto* q = app.add_subcommand("query", "answer a goal");
  q->add_option("-p,--program", cfg.program_path, "program file")->required();
  q->add_option("-t,--theory", theory_path, "theory file");
  q->add_option("-m,--mode", mode, "declarative, operational or decide")
      ->check(CLI::IsMember({"declarative", "operational", "decide"}));
  q->add_option("--max-rank", cfg.max_rank, "maximal tree rank")->check(CLI::NonNegativeNumber);
  q->add_option("--budget", cfg.node_budget, "node budget per tree")->check(CLI::PositiveNumber);
  q->add_option("--select", select, "selection rule")
      ->check(CLI::IsMember({"leftmost", "rightmost", "negative-last"}));
  q->add_option("--trace", trace, "trace format")->check(CLI::IsMember({"none", "text", "dot"}));
  q->add_option("-o,--output", cfg.trace_path, "trace output path");
  q->add_option("goal", goal, "goal, e.g. \"{ X = c } w(X), ~m(X,Y)\"")->required();

  auto* c = app.add_subcommand("check", "safeness and congruence report");
  c->add_option("-p,--program", cfg.program_path, "program file")->required();

  auto* w = app.add_subcommand("wf", "well-founded model per theory model");
  w->add_option("-p,--program", cfg.program_path, "program file")->required();
  w->add_option("-t,--theory", theory_path, "theory file");
  w->add_option("--max-models", cfg.model_cap, "number of theory models shown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!theory_path.empty()) cfg.theory_path = theory_path;
  cfg.mode = *parse_mode(mode);
  cfg.selection = *parse_selection_rule(select);
  cfg.trace = *parse_trace_format(trace);
  if (cfg.trace != TraceFormat::None && cfg.trace_path.empty()) {
    std::cerr << "error: --trace needs -o PATH\n";
    return 2;
  }

  Report r;
  if (*q) r = run_query(cfg, goal);
  else if (*c) r = run_check(cfg);
  else r = run_wf(cfg);
  (r.exit_code == 0 ? std::cout : std::cerr) << r.text;
  return r.exit_code;
}
