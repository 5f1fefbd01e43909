#include "llslp/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "llslp/diagnostics.hpp"
#include "llslp/imbalance.hpp"

namespace llslp {

namespace {

using nlohmann::json;

Vec parse_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("field \"" + field + "\" must be an array of numbers");
  Vec out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError("field \"" + field + "\" must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

InstanceFile instance_from_json(const json& doc) {
  InstanceFile inst;
  if (doc.contains("name")) inst.name = doc["name"].get<std::string>();
  for (const char* field : {"A", "b", "c"})
    if (!doc.contains(field)) throw ParseError(std::string("missing field \"") + field + "\"");

  const json& rows = doc["A"];
  if (!rows.is_array() || rows.empty()) throw ParseError("field \"A\" must be a nonempty array of rows");
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(rows[0].size());
  inst.lp.A = Matrix(m, n);
  for (int i = 0; i < m; ++i) {
    const Vec row = parse_vector(rows[i], "A");
    if (static_cast<int>(row.size()) != n) throw DimensionMismatch("ragged rows in \"A\"");
    for (int j = 0; j < n; ++j) inst.lp.A(i, j) = row[j];
  }
  inst.lp.b = parse_vector(doc["b"], "b");
  inst.lp.c = parse_vector(doc["c"], "c");
  validate_instance(inst.lp);

  if (doc.contains("warmStart")) {
    const json& ws = doc["warmStart"];
    for (const char* field : {"x", "y", "s"})
      if (!ws.contains(field))
        throw ParseError(std::string("missing field \"warmStart.") + field + "\"");
    Iterate w;
    w.x = parse_vector(ws["x"], "warmStart.x");
    w.y = parse_vector(ws["y"], "warmStart.y");
    w.s = parse_vector(ws["s"], "warmStart.s");
    if (static_cast<int>(w.x.size()) != n || static_cast<int>(w.s.size()) != n ||
        static_cast<int>(w.y.size()) != m)
      throw DimensionMismatch("warm start dimensions do not match the instance");
    inst.warmStart = std::move(w);
  }
  return inst;
}

struct CommonFlags {
  double beta = 0.125;
  double gammaOverride = 0.0;
  int maxIters = -1;
  double termTol = 1e-11;
  double pivotTol = kPivotTolDefault;
  double bigM = 0.0;
  bool diagnostics = false;
  std::string output = "json";
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--beta", flags.beta, "neighborhood opening (default 0.125)");
  cmd->add_option("--gamma-override", flags.gammaOverride,
                  "override the layering threshold gamma");
  cmd->add_option("--max-iters", flags.maxIters, "iteration cap (default 10 n^2 log10(1/tol))");
  cmd->add_option("--term-tol", flags.termTol, "termination tolerance (default 1e-11)");
  cmd->add_option("--pivot-tol", flags.pivotTol, "relative pivot tolerance (default 1e-11)");
  cmd->add_option("--big-m", flags.bigM, "fixed big-M value, disables the search");
  cmd->add_flag("--diagnostics", flags.diagnostics, "record per-iteration layerings/potentials");
  cmd->add_option("--output", flags.output, "output format: json or text")
      ->check(CLI::IsMember({"json", "text"}));
}

SolveOptions solver_options(const CommonFlags& flags) {
  SolveOptions opts;
  opts.beta = flags.beta;
  opts.gammaOverride = flags.gammaOverride;
  opts.termTol = flags.termTol;
  opts.maxIterations = flags.maxIters;
  opts.recordDetail = flags.diagnostics;
  return opts;
}

json parameters_json(const CommonFlags& flags, int n) {
  json params;
  params["beta"] = flags.beta;
  params["gamma"] =
      flags.gammaOverride > 0.0 ? flags.gammaOverride : default_gamma(n, flags.beta);
  params["termTol"] = flags.termTol;
  params["pivotTol"] = flags.pivotTol;
  return params;
}

json certificate_json(const Certificate& cert) {
  json out;
  out["kind"] = cert.kind == CertificateKind::PrimalInfeasible ? "primalInfeasible"
                                                               : "dualInfeasible";
  out["witness"] = vector_to_json(cert.witness);
  out["gain"] = cert.gain;
  return out;
}

void attach_diagnostics(json& doc, const SolveTrace& trace, int n, double gamma) {
  json events = json::array();
  for (const SolveEvent& e : detect_events(trace)) events.push_back(e.describe());
  doc["events"] = events;
  const PotentialState state = potentials_from_trace(trace, n, gamma);
  if (state.updates() > 0) {
    json pot;
    pot["total"] = state.totalPotential();
    json pairs = json::array();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double psi = state.psi(i, j);
        if (psi > 1.0) {
          json entry;
          entry["i"] = i;
          entry["j"] = j;
          entry["psi"] = psi;
          pairs.push_back(entry);
        }
      }
    pot["pairsAboveOne"] = pairs;
    doc["potentials"] = pot;
  }
  json layerings = json::array();
  for (const IterationRecord& rec : trace.iterations) {
    if (!rec.usedLls) continue;
    json entry;
    entry["iteration"] = rec.index;
    json layers = json::array();
    for (const auto& layer : rec.partition.layers) layers.push_back(layer);
    entry["layers"] = layers;
    json updates = json::array();
    for (const KappaUpdateRecord& u : rec.kappaUpdates) {
      json uj;
      uj["i"] = u.i;
      uj["j"] = u.j;
      uj["t"] = u.t;
      uj["after"] = u.after;
      updates.push_back(uj);
    }
    entry["estimateUpdates"] = updates;
    layerings.push_back(entry);
  }
  doc["layerings"] = layerings;
}

void print_document(const json& doc, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << doc.dump(2) << "\n";
    return;
  }
  // Text rendering: stable field order, full precision.
  std::function<void(const json&, const std::string&, int)> walk = [&](const json& node,
                                                                       const std::string& key,
                                                                       int depth) {
    const std::string pad(static_cast<size_t>(std::max(depth, 0)) * 2, ' ');
    if (node.is_object()) {
      if (!key.empty()) out << pad << key << ":\n";
      for (auto it = node.begin(); it != node.end(); ++it) walk(it.value(), it.key(), depth + 1);
    } else if (node.is_array()) {
      out << pad << key << ": " << node.dump() << "\n";
    } else if (node.is_number_float()) {
      out << pad << key << ": " << format_double(node.get<double>()) << "\n";
    } else {
      out << pad << key << ": " << node.dump() << "\n";
    }
  };
  walk(doc, "", -1);
}

int finish(const json& doc, const CommonFlags& flags, std::ostream& out, int code) {
  print_document(doc, flags.output, out);
  return code;
}

int cmd_solve(const std::string& path, const CommonFlags& flags, bool diagnose, std::ostream& out) {
  const InstanceFile inst = parse_instance(path);
  const int n = inst.lp.cols();
  CommonFlags effective = flags;
  if (diagnose) effective.diagnostics = true;
  SolveOptions opts = solver_options(effective);

  json doc;
  doc["name"] = inst.name;
  doc["parameters"] = parameters_json(effective, n);
  const auto started = std::chrono::steady_clock::now();

  json timing;
  int code = 0;
  if (inst.warmStart) {
    const SolveResult res = lp_solve(inst.lp, *inst.warmStart, opts);
    doc["status"] = res.status == SolveStatus::Optimal ? "optimal" : "iterationLimit";
    doc["objective"] = res.objective;
    doc["x"] = vector_to_json(res.iterate.x);
    doc["y"] = vector_to_json(res.iterate.y);
    doc["s"] = vector_to_json(res.iterate.s);
    doc["iterations"] = res.iterations;
    doc["muTrajectory"] = vector_to_json(res.trace.muTrajectory);
    if (effective.diagnostics)
      attach_diagnostics(doc, res.trace, n, doc["parameters"]["gamma"].get<double>());
    code = res.status == SolveStatus::Optimal ? 0 : 2;
  } else {
    MSearchOptions search;
    search.solver = opts;
    search.bigMOverride = effective.bigM;
    const PipelineResult res = solve_with_m_search(inst.lp, search);
    json attempts = json::array();
    for (const AttemptRecord& a : res.attempts) {
      json aj;
      aj["guess"] = a.guess;
      aj["bigM"] = a.bigM;
      aj["outcome"] = a.outcome;
      attempts.push_back(aj);
    }
    doc["parameters"]["bigMHistory"] = attempts;
    switch (res.status) {
      case PipelineStatus::Optimal: {
        doc["status"] = "optimal";
        doc["objective"] = res.objective;
        doc["x"] = vector_to_json(res.iterate.x);
        doc["y"] = vector_to_json(res.iterate.y);
        doc["s"] = vector_to_json(res.iterate.s);
        doc["iterations"] = res.iterations;
        doc["muTrajectory"] = vector_to_json(res.trace.muTrajectory);
        if (effective.diagnostics)
          attach_diagnostics(doc, res.trace, 3 * n,
                             effective.gammaOverride > 0.0 ? effective.gammaOverride
                                                           : default_gamma(3 * n, effective.beta));
        code = 0;
        break;
      }
      case PipelineStatus::PrimalInfeasible:
      case PipelineStatus::DualInfeasible:
        doc["status"] = res.status == PipelineStatus::PrimalInfeasible ? "primalInfeasible"
                                                                       : "dualInfeasible";
        doc["certificate"] = certificate_json(*res.certificate);
        code = 1;
        break;
      case PipelineStatus::IterationLimit:
        doc["status"] = "iterationLimit";
        code = 2;
        break;
    }
  }
  timing["seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  doc["timing"] = timing;
  return finish(doc, flags, out, code);
}

int cmd_rescale(const std::string& path, const CommonFlags& flags,
                const std::string& writeRescaled, std::ostream& out) {
  const InstanceFile inst = parse_instance(path);
  const CircuitAnalysis analysis = find_circuits(inst.lp.A);
  const RescalingResult res =
      analyze_rescaling(CircuitRatioDigraph::fromEstimates(analysis.kappa));
  json doc;
  doc["name"] = inst.name;
  doc["d"] = vector_to_json(res.d);
  doc["tHat"] = res.tHat;
  doc["xi"] = res.xi;
  for (const std::string& w : res.warnings) doc["warnings"].push_back(w);
  if (!writeRescaled.empty()) {
    InstanceFile scaled = inst;
    Vec invD(res.d.size());
    for (size_t i = 0; i < res.d.size(); ++i) invD[i] = 1.0 / res.d[i];
    scaled.lp.A = inst.lp.A.scaledColumns(invD);
    scaled.lp.c = hadamard(inst.lp.c, invD);
    scaled.warmStart.reset();
    scaled.name = inst.name.empty() ? "rescaled" : inst.name + "-rescaled";
    std::ofstream file(writeRescaled);
    if (!file) throw Error("cannot write " + writeRescaled);
    file << serialize_instance(scaled);
    doc["wrote"] = writeRescaled;
  }
  return finish(doc, flags, out, 0);
}

int cmd_chibar(const std::string& path, const CommonFlags& flags, std::ostream& out) {
  const InstanceFile inst = parse_instance(path);
  const CircuitAnalysis analysis = find_circuits(inst.lp.A);
  const RescalingResult res =
      analyze_rescaling(CircuitRatioDigraph::fromEstimates(analysis.kappa));
  json doc;
  doc["name"] = inst.name;
  doc["xi"] = res.xi;
  try {
    doc["chibarExact"] = chibar_bruteforce(inst.lp.A);
  } catch (const TooLarge&) {
    doc["chibarExact"] = nullptr;
  }
  return finish(doc, flags, out, 0);
}

int cmd_circuits(const std::string& path, const CommonFlags& flags, std::ostream& out) {
  const InstanceFile inst = parse_instance(path);
  const CircuitAnalysis analysis = find_circuits(inst.lp.A);
  json doc;
  doc["name"] = inst.name;
  json comps = json::array();
  for (const auto& comp : analysis.components.components) comps.push_back(comp);
  doc["components"] = comps;
  json circuits = json::array();
  for (const Circuit& c : analysis.circuits) {
    json cj;
    cj["support"] = c.support;
    cj["g"] = vector_to_json(c.g);
    circuits.push_back(cj);
  }
  doc["circuits"] = circuits;
  json kappa = json::array();
  const int n = inst.lp.cols();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || !analysis.kappa.defined(i, j)) continue;
      json entry;
      entry["i"] = i;
      entry["j"] = j;
      entry["value"] = analysis.kappa.value(i, j);
      kappa.push_back(entry);
    }
  doc["kappaHat"] = kappa;
  return finish(doc, flags, out, 0);
}

}  // namespace

InstanceFile parse_instance_text(const std::string& jsonText) {
  json doc;
  try {
    doc = json::parse(jsonText);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  return instance_from_json(doc);
}

InstanceFile parse_instance(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << file.rdbuf();
  return parse_instance_text(buf.str());
}

std::string serialize_instance(const InstanceFile& instance) {
  json doc;
  if (!instance.name.empty()) doc["name"] = instance.name;
  json rows = json::array();
  for (int i = 0; i < instance.lp.rows(); ++i) rows.push_back(vector_to_json(instance.lp.A.row(i)));
  doc["A"] = rows;
  doc["b"] = vector_to_json(instance.lp.b);
  doc["c"] = vector_to_json(instance.lp.c);
  if (instance.warmStart) {
    json ws;
    ws["x"] = vector_to_json(instance.warmStart->x);
    ws["y"] = vector_to_json(instance.warmStart->y);
    ws["s"] = vector_to_json(instance.warmStart->s);
    doc["warmStart"] = ws;
  }
  return doc.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"scaling-invariant layered least squares LP solver"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string path;
  std::string writeRescaled;

  CLI::App* solve = app.add_subcommand("solve", "solve an instance to optimality");
  solve->add_option("instance", path, "instance file")->required();
  add_common_flags(solve, flags);

  CLI::App* diagnose = app.add_subcommand("diagnose", "solve with potential diagnostics");
  diagnose->add_option("instance", path, "instance file")->required();
  add_common_flags(diagnose, flags);

  CLI::App* rescale = app.add_subcommand("rescale", "compute the near-optimal rescaling");
  rescale->add_option("instance", path, "instance file")->required();
  rescale->add_option("--write-rescaled", writeRescaled, "write the rescaled instance here");
  add_common_flags(rescale, flags);

  CLI::App* chibar = app.add_subcommand("chibar", "condition number estimate");
  chibar->add_option("instance", path, "instance file")->required();
  add_common_flags(chibar, flags);

  CLI::App* circuits = app.add_subcommand("circuits", "components, circuits and estimates");
  circuits->add_option("instance", path, "instance file")->required();
  add_common_flags(circuits, flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (flags.pivotTol != kPivotTolDefault) set_pivot_tolerance(flags.pivotTol);
    if (solve->parsed()) return cmd_solve(path, flags, false, out);
    if (diagnose->parsed()) return cmd_solve(path, flags, true, out);
    if (rescale->parsed()) return cmd_rescale(path, flags, writeRescaled, out);
    if (chibar->parsed()) return cmd_chibar(path, flags, out);
    if (circuits->parsed()) return cmd_circuits(path, flags, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand\n";
  return 2;
}

}  // namespace llslp
