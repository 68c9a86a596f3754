// Command line front end for the LIMID solver library.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "limid/document.hpp"
#include "limid/dot.hpp"
#include "limid/oracle.hpp"
#include "limid/propagate.hpp"

using nlohmann::json;
using namespace limid;

namespace {

// Exit codes, also listed in the README.
enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kInvalid = 3,
  kNotSoluble = 4,
  kOracleMismatch = 5,
  kOracleCap = 6,
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::optional<std::string>& out_path, const std::string& text) {
  if (!out_path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + *out_path);
  out << text;
}

std::optional<EliminationOrder> parse_elim(const Limid& m, const std::string& csv) {
  if (csv.empty()) return std::nullopt;
  EliminationOrder order;
  std::istringstream ss(csv);
  std::string label;
  while (std::getline(ss, label, ',')) {
    auto id = m.find_label(label);
    if (!id) throw std::runtime_error("unknown node '" + label + "' in elimination order");
    order.order.push_back(*id);
  }
  return order;
}

json flows_json(const FlowLog& log) {
  json arr = json::array();
  for (const auto& f : log.flows)
    arr.push_back({{"seq", f.seq},
                   {"from", f.from},
                   {"to", f.to},
                   {"reason", flow_reason_name(f.reason)}});
  return arr;
}

json table_json(const Limid& m, const Table& t) {
  json vars = json::array();
  for (NodeId v : t.vars) vars.push_back(m.label(v));
  return {{"vars", vars}, {"values", t.values}};
}

json labels_json(const Limid& m, std::span<const NodeId> ids) {
  json arr = json::array();
  for (NodeId v : ids) arr.push_back(m.label(v));
  return arr;
}

json removed_json(const Limid& m, const ReductionTrace& trace) {
  json arr = json::array();
  for (const auto& r : trace.removed)
    arr.push_back({{"parent", m.label(r.parent)},
                   {"decision", m.label(r.decision)},
                   {"visit", r.visit}});
  return arr;
}

// Shared prefix of reduce/compile/solve: closure of an influence diagram,
// solution ordering, optional reduction.
struct Prepared {
  Limid model;
  SolutionOrdering ordering;
  ReductionTrace trace;
};

Prepared prepare(const Limid& input, bool reduce) {
  Prepared out;
  out.model = input.decision_order.empty() ? input : make_limid_version(input);
  auto ordering = find_solution_ordering(out.model);
  if (!ordering) throw NotSolubleError();
  out.ordering = *ordering;
  if (reduce) {
    auto [reduced, trace] = reduce_minimal(out.model, out.ordering);
    out.model = std::move(reduced);
    out.trace = std::move(trace);
  }
  return out;
}

int cmd_validate(const std::string& path) {
  Limid m = parse_document_unchecked(read_file(path));
  ValidationReport rep = validate(m);
  if (!rep.ok()) {
    std::cout << rep.to_string();
    return kInvalid;
  }
  std::cout << "ok: " << m.node_count() << " nodes, " << m.decisions().size()
            << " decisions\n";
  return kOk;
}

int cmd_reduce(const std::string& path, bool as_json,
               const std::optional<std::string>& out_path) {
  Limid input = parse_document(read_file(path));
  Prepared prep = prepare(input, true);
  if (as_json) {
    json doc = {{"ordering", labels_json(prep.model, prep.ordering.order)},
                {"removed_arcs", removed_json(prep.model, prep.trace)},
                {"model", emit_document(prep.model)}};
    write_output(out_path, doc.dump(2) + "\n");
    return kOk;
  }
  std::ostringstream os;
  for (const auto& r : prep.trace.removed)
    os << "removed " << prep.model.label(r.parent) << " -> "
       << prep.model.label(r.decision) << " (visit " << r.visit << ")\n";
  os << emit_document(prep.model);
  write_output(out_path, os.str());
  return kOk;
}

int cmd_compile(const std::string& path, const std::string& elim_csv, bool no_reduce,
                bool as_json, const std::optional<std::string>& out_path) {
  Limid input = parse_document(read_file(path));
  Prepared prep = prepare(input, !no_reduce);
  const Limid& m = prep.model;
  JunctionTree jt = compile(m, parse_elim(m, elim_csv));

  if (as_json) {
    json cliques = json::array();
    for (const auto& c : jt.cliques) cliques.push_back(labels_json(m, c));
    json edges = json::array();
    for (const auto& e : jt.edges)
      edges.push_back(
          {{"a", e.a}, {"b", e.b}, {"separator", labels_json(m, e.separator)}});
    json doc = {{"elimination", labels_json(m, jt.elim.order)},
                {"cliques", cliques},
                {"edges", edges},
                {"max_clique_size", jt.max_clique_size},
                {"max_clique_weight", jt.max_clique_weight}};
    write_output(out_path, doc.dump(2) + "\n");
    return kOk;
  }

  std::ostringstream os;
  os << "elimination:";
  for (NodeId v : jt.elim.order) os << " " << m.label(v);
  os << "\n";
  for (int c = 0; c < jt.clique_count(); ++c) {
    os << "clique C" << c << ":";
    for (NodeId v : jt.cliques[c]) os << " " << m.label(v);
    os << "\n";
  }
  for (const auto& e : jt.edges) {
    os << "edge C" << e.a << " -- C" << e.b << " separator:";
    for (NodeId v : e.separator) os << " " << m.label(v);
    os << "\n";
  }
  os << "max clique size " << jt.max_clique_size << ", weight "
     << format_number(jt.max_clique_weight) << "\n";
  write_output(out_path, os.str());
  return kOk;
}

int cmd_solve(const std::string& path, const std::string& elim_csv, bool no_reduce,
              bool no_skip, bool trace_flows, bool oracle_check, bool as_json,
              const std::optional<std::string>& out_path) {
  Limid input = parse_document(read_file(path));

  SolveOptions opts;
  opts.reduce = !no_reduce;
  opts.allow_skips = !no_skip;
  if (!elim_csv.empty()) {
    Prepared prep = prepare(input, opts.reduce);
    opts.hint = parse_elim(prep.model, elim_csv);
  }
  SolveReport report = single_policy_updating(input, opts);

  int rc = kOk;
  std::string oracle_line;
  if (oracle_check) {
    try {
      OracleResult oracle = oracle_global_max(report.solved_model);
      if (std::abs(oracle.best_eu - report.expected_utility) <= 1e-9) {
        oracle_line = "oracle agrees: " + format_number(oracle.best_eu);
      } else {
        oracle_line = "oracle disagrees: solver " +
                      format_number(report.expected_utility) + " vs oracle " +
                      format_number(oracle.best_eu);
        rc = kOracleMismatch;
      }
    } catch (const OracleCapError& e) {
      oracle_line = std::string("oracle skipped: ") + e.what();
    }
  }

  const Limid& m = report.solved_model;
  if (as_json) {
    json policies = json::object();
    for (const auto& p : report.strategy.policies)
      policies[m.label(p.decision)] = table_json(m, p.table);
    json roots = json::array();
    for (auto [d, c] : report.roots)
      roots.push_back({{"decision", m.label(d)}, {"clique", c}});
    json doc = {{"expected_utility", report.expected_utility},
                {"ordering", labels_json(m, report.ordering.order)},
                {"removed_arcs", removed_json(m, report.reduction)},
                {"roots", roots},
                {"policies", policies},
                {"flows", flows_json(report.flows)}};
    if (!oracle_line.empty()) doc["oracle"] = oracle_line;
    write_output(out_path, doc.dump(2) + "\n");
    return rc;
  }

  std::ostringstream os;
  os << "expected utility " << format_number(report.expected_utility) << "\n";
  os << "ordering:";
  for (NodeId d : report.ordering.order) os << " " << m.label(d);
  os << "\n";
  for (const auto& r : report.reduction.removed)
    os << "removed " << m.label(r.parent) << " -> " << m.label(r.decision)
       << " (visit " << r.visit << ")\n";
  for (auto [d, c] : report.roots)
    os << "root for " << m.label(d) << ": C" << c << "\n";
  os << emit_strategy(report.strategy, m);
  if (trace_flows) {
    os << "flows (" << report.flows.sent_count() << " sent):\n"
       << report.flows.to_text();
  }
  if (!oracle_line.empty()) os << oracle_line << "\n";
  write_output(out_path, os.str());
  return rc;
}

int cmd_oracle(const std::string& path, const std::string& strategy_path,
               std::uint64_t max_cells, std::uint64_t max_work, bool as_json,
               const std::optional<std::string>& out_path) {
  Limid input = parse_document(read_file(path));
  Limid model = input.decision_order.empty() ? input : make_limid_version(input);
  OracleLimits limits;
  if (max_cells) limits.max_cells = max_cells;
  if (max_work) limits.max_work = max_work;

  if (!strategy_path.empty()) {
    Strategy s = parse_strategy(read_file(strategy_path), model);
    double eu = oracle_eu(model, s, limits);
    if (as_json)
      write_output(out_path, json{{"expected_utility", eu}}.dump(2) + "\n");
    else
      write_output(out_path, "expected utility " + format_number(eu) + "\n");
    return kOk;
  }

  OracleResult res = oracle_global_max(model, limits);
  if (as_json) {
    json policies = json::object();
    for (const auto& p : res.best_strategy.policies)
      policies[model.label(p.decision)] = table_json(model, p.table);
    json doc = {{"best_expected_utility", res.best_eu},
                {"evaluations", res.evaluations},
                {"policies", policies}};
    write_output(out_path, doc.dump(2) + "\n");
    return kOk;
  }
  std::ostringstream os;
  os << "best expected utility " << format_number(res.best_eu) << " ("
     << res.evaluations << " strategies)\n";
  os << emit_strategy(res.best_strategy, model);
  write_output(out_path, os.str());
  return kOk;
}

int cmd_dot(const std::string& path, const std::string& stage, bool no_reduce,
            const std::string& elim_csv, const std::optional<std::string>& out_path) {
  Limid input = parse_document(read_file(path));
  if (stage == "model") {
    write_output(out_path, dot_model(input));
    return kOk;
  }
  Prepared prep = prepare(input, !no_reduce);
  const Limid& m = prep.model;
  if (stage == "moral") {
    write_output(out_path, dot_moral(moralize(m), m));
    return kOk;
  }
  auto tri = triangulate(moralize(m), m, parse_elim(m, elim_csv));
  if (stage == "triangulated") {
    write_output(out_path, dot_triangulated(tri, m));
    return kOk;
  }
  if (stage == "tree") {
    write_output(out_path, dot_tree(build_tree(tri, m), m));
    return kOk;
  }
  throw std::runtime_error("unknown stage '" + stage + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver for limited-memory influence diagrams"};
  app.require_subcommand(1);

  std::string path, strategy_path, elim_csv, stage = "model";
  std::string out_str;
  bool as_json = false, no_reduce = false, no_skip = false;
  bool trace_flows = false, oracle_check = false;
  std::uint64_t max_cells = 0, max_work = 0;

  auto add_common = [&](CLI::App* cmd, bool with_out = true) {
    cmd->add_option("file", path, "model document")->required();
    if (with_out) cmd->add_option("--out", out_str, "write output to a file");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a model document");
  add_common(validate_cmd, false);

  auto* reduce_cmd = app.add_subcommand("reduce", "emit the minimal reduction");
  add_common(reduce_cmd);
  reduce_cmd->add_flag("--json", as_json, "machine-readable output");

  auto* compile_cmd = app.add_subcommand("compile", "build the junction tree");
  add_common(compile_cmd);
  compile_cmd->add_option("--elimination-order", elim_csv,
                          "comma separated node labels");
  compile_cmd->add_flag("--no-reduce", no_reduce, "compile the unreduced model");
  compile_cmd->add_flag("--json", as_json, "machine-readable output");

  auto* solve_cmd = app.add_subcommand("solve", "compute an optimal strategy");
  add_common(solve_cmd);
  solve_cmd->add_option("--elimination-order", elim_csv,
                        "comma separated node labels");
  solve_cmd->add_flag("--no-reduce", no_reduce, "skip the reduction step");
  solve_cmd->add_flag("--no-skip", no_skip, "send every message, even omittable ones");
  solve_cmd->add_flag("--trace-flows", trace_flows, "print the message log");
  solve_cmd->add_flag("--oracle-check", oracle_check,
                      "verify the result against brute force");
  solve_cmd->add_flag("--json", as_json, "machine-readable output");

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference answers");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--strategy", strategy_path,
                         "score this strategy document instead of maximizing");
  oracle_cmd->add_option("--max-cells", max_cells, "configuration cap");
  oracle_cmd->add_option("--max-work", max_work, "strategy enumeration cap");
  oracle_cmd->add_flag("--json", as_json, "machine-readable output");

  auto* dot_cmd = app.add_subcommand("dot", "emit graphviz renderings");
  add_common(dot_cmd);
  dot_cmd->add_option("--stage", stage, "model, moral, triangulated or tree");
  dot_cmd->add_flag("--no-reduce", no_reduce, "render the unreduced model");
  dot_cmd->add_option("--elimination-order", elim_csv, "comma separated node labels");

  CLI11_PARSE(app, argc, argv);
  std::optional<std::string> out_path;
  if (!out_str.empty()) out_path = out_str;

  try {
    if (validate_cmd->parsed()) return cmd_validate(path);
    if (reduce_cmd->parsed()) return cmd_reduce(path, as_json, out_path);
    if (compile_cmd->parsed())
      return cmd_compile(path, elim_csv, no_reduce, as_json, out_path);
    if (solve_cmd->parsed())
      return cmd_solve(path, elim_csv, no_reduce, no_skip, trace_flows, oracle_check,
                       as_json, out_path);
    if (oracle_cmd->parsed())
      return cmd_oracle(path, strategy_path, max_cells, max_work, as_json, out_path);
    if (dot_cmd->parsed()) return cmd_dot(path, stage, no_reduce, elim_csv, out_path);
  } catch (const ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kParse;
  } catch (const ValidationError& e) {
    std::cerr << e.what();
    return kInvalid;
  } catch (const NotSolubleError& e) {
    std::cerr << e.what() << "\n";
    return kNotSoluble;
  } catch (const OracleCapError& e) {
    std::cerr << e.what() << "\n";
    return kOracleCap;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
