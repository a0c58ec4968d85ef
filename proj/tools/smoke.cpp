#include <fstream>
#include <iostream>
#include <sstream>

#include "cse/executor.hpp"
#include "cse/parser.hpp"
#include "cse/templates.hpp"
#include "cse/validator.hpp"

using namespace cse;

int main(int argc, char** argv) {
  std::ifstream in(argv[1]);
  std::stringstream ss;
  ss << in.rdbuf();
  Program p = parse_program(ss.str());
  auto violations = validate_program(p);
  std::cout << "violations: " << violations.size() << "\n";
  for (auto& v : violations) std::cout << "  " << violation_name(v.kind) << " " << v.where << "\n";

  Program p2 = parse_program(render_program(p));
  std::cout << "round-trip ok: " << (render_program(p) == render_program(p2)) << "\n";

  auto cmd = resolve_solver_command(argc > 2 ? argv[2] : "");
  std::cout << "solver: ";
  for (auto& c : cmd) std::cout << c << " ";
  std::cout << "\n";
  auto solver = std::make_shared<SmtProcessSolver>(ExternalSolverConfig{cmd, 5000, ""});

  auto report = compute_all_templates(p, *solver);
  std::cout << "templates: " << report.templates.size() << ", failures: " << report.failures.size() << "\n";
  for (auto& t : report.templates) std::cout << render_template(p, t);
  for (auto& [part, fail] : report.failures)
    std::cout << "  FAIL " << render_part(p, part) << ": " << template_failure_name(fail.kind) << " (" << fail.detail << ")\n";

  ExecConfig cfg;
  cfg.mode = ExecMode::Compact;
  cfg.budget = 100;
  cfg.solver = solver;
  cfg.templates = std::make_shared<std::vector<Template>>(report.templates);
  ExecResult r = execute(p, cfg);
  std::cout << "compact: vertices=" << (r.tree ? r.tree->size() : -1)
            << " finals=" << r.final_states.size()
            << " exhausted=" << r.stats.budget_exhausted
            << " solver_calls=" << r.stats.solver_calls << "\n";
  for (auto& s : r.final_states) std::cout << "  E: " << render_state(s, p) << "\n";
  if (r.tree)
    for (int i = 0; i < r.tree->size(); ++i) {
      auto& v = r.tree->vertices[i];
      std::cout << "  v" << i << " @" << p.loc_name(v.state.loc) << " parent=" << v.parent
                << " label=" << render_expr(v.edge_label, p.symtab->names()) << "\n";
    }

  ExecConfig ccfg;
  ccfg.mode = ExecMode::Classic;
  ccfg.budget = 200;
  ccfg.solver = solver;
  ExecResult cr = execute(p, ccfg);
  std::cout << "classic: vertices=" << (cr.tree ? cr.tree->size() : -1)
            << " finals=" << cr.final_states.size()
            << " exhausted=" << cr.stats.budget_exhausted
            << " solver_calls=" << cr.stats.solver_calls
            << " frontier=" << (cr.stats.frontier_depth ? *cr.stats.frontier_depth : -1) << "\n";
  return 0;
}
