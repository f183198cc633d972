// Copyright 2026 The qlang Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "qlang/circuit.hpp"
#include "qlang/isolang.hpp"
#include "qlang/oracle.hpp"
#include "qlang/pathsum.hpp"
#include "qlang/qlc.hpp"
#include "qlang/qnum.hpp"
#include "qlang/random.hpp"
#include "qlang/usynth.hpp"

namespace qlang::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

struct Config {
  std::uint64_t seed = 0;
  int shots = 1024;
  int max_qubits = 14;
  double tol = 1e-9;
  bool json = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// A failure tied to an input file; reported with exit status 1.
class Rejected : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Parse errors carry "line:col: msg"; prefix the file.
template <typename F>
auto with_file(const std::string& path, F f) -> decltype(f()) {
  try {
    return f();
  } catch (const SyntaxError& e) {
    throw Rejected(path + ":" + e.what());
  }
}

Json header(const std::string& command, const Config& cfg) {
  Json j;
  j["schema"] = "qlang/" + command + "/1";
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  return j;
}

Json count_report(const circuit::Circuit& c, int ancillas) {
  const circuit::GateCount g = circuit::gate_count(c);
  Json gates = Json::object();
  for (const auto& [name, n] : g.per_gate) gates[name] = n;
  Json r;
  r["gates"] = gates;
  r["gate_total"] = g.gates;
  r["cnots"] = g.cnots;
  r["qubits"] = g.qubits;
  r["ancillas"] = ancillas;
  r["inits"] = g.inits;
  r["measurements"] = g.measures;
  r["discards"] = g.discards;
  return r;
}

void print_report(std::ostream& out, const Json& r) {
  out << "qubits " << r["qubits"].get<int>() << ", ancillas " << r["ancillas"].get<int>() << ", measurements "
      << r["measurements"].get<int>() << ", inits " << r["inits"].get<int>() << "\n";
  for (const auto& [name, n] : r["gates"].items()) out << "  " << name << ": " << n.get<int>() << "\n";
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---- qlc ----

int qlc_check(const Config& cfg, const std::string& file, std::ostream& out) {
  const std::string src = read_file(file);
  const qlc::Term t = with_file(file, [&] { return qlc::parse(src); });
  std::string type;
  try {
    type = qlc::to_string(qlc::typecheck(t, {}));
  } catch (const qlc::TypeError& e) {
    throw Rejected(file + ": " + e.what());
  }
  if (cfg.json) {
    Json j = header("qlc-check", cfg);
    j["file"] = file;
    j["ok"] = true;
    j["type"] = type;
    out << j.dump(2) << "\n";
  } else {
    out << type << "\n";
  }
  return kOk;
}

int qlc_run(const Config& cfg, const std::string& file, bool trace, std::uint64_t fuel, std::ostream& out) {
  const std::string src = read_file(file);
  const qlc::Term t = with_file(file, [&] { return qlc::parse(src); });
  try {
    qlc::typecheck(t, {});
  } catch (const qlc::TypeError& e) {
    throw Rejected(file + ": " + e.what());
  }
  const RandomSource root(cfg.seed);
  std::map<std::string, int> counts;
  std::vector<qlc::TraceEntry> first_trace;
  for (int s = 0; s < cfg.shots; ++s) {
    RandomSource rng = root.split(static_cast<std::uint64_t>(s));
    qlc::EvalResult r;
    try {
      r = qlc::eval(qlc::make_program(t), rng, fuel);
    } catch (const qlc::EvalError& e) {
      throw Rejected(file + ": " + e.what());
    }
    if (s == 0) first_trace = r.trace;
    ++counts[qlc::to_string(r.program.m)];
  }
  if (cfg.json) {
    Json j = header("qlc-run", cfg);
    j["file"] = file;
    j["shots"] = cfg.shots;
    Json c = Json::object();
    for (const auto& [v, n] : counts) c[v] = n;
    j["counts"] = c;
    if (trace) {
      Json tr = Json::array();
      for (const auto& e : first_trace) tr.push_back({{"rule", e.rule}, {"p", e.probability}, {"size", e.size}});
      j["trace"] = tr;
    }
    out << j.dump(2) << "\n";
  } else {
    if (trace) {
      for (const auto& e : first_trace) out << qlc::format_trace(e) << "\n";
    }
    for (const auto& [v, n] : counts) out << v << " " << n << "\n";
    out << "shots " << cfg.shots << "\n";
  }
  return kOk;
}

// ---- oracle ----

int inputs_from_type(const std::string& type) {
  int n = 0;
  std::string_view t = type;
  while (t.rfind("bool -> ", 0) == 0) {
    t.remove_prefix(8);
    ++n;
  }
  return n;
}

int oracle_synth(const Config& cfg, const std::string& file, int n, bool landauer, std::ostream& out,
                 std::ostream& err) {
  const std::string src = read_file(file);
  const oracle::BTerm t = with_file(file, [&] { return oracle::parse_bterm(src); });
  std::string type;
  try {
    type = oracle::typecheck(t);
  } catch (const Error& e) {
    throw Rejected(file + ": " + e.what());
  }
  if (n < 0) n = inputs_from_type(type);
  std::vector<std::string> names;
  const oracle::BTerm applied = oracle::apply_inputs(t, n, &names);
  oracle::Landauer l;
  try {
    l = oracle::synth_landauer(applied, names);
  } catch (const oracle::OracleError& e) {
    throw Rejected(file + ": " + e.what());
  }
  const circuit::Circuit c = landauer ? l.circuit : oracle::bennett_wrap(l);
  const int ancillas = static_cast<int>(landauer ? l.garbage.size() : c.inputs().size() - n - l.outputs.size());
  const Json report = count_report(c, ancillas);
  if (cfg.json) {
    Json j = header("oracle-synth", cfg);
    j["file"] = file;
    j["inputs"] = n;
    j["outputs"] = l.outputs.size();
    j["circuit"] = circuit::to_json(c);
    j["report"] = report;
    out << j.dump(2) << "\n";
  } else {
    out << circuit::to_json(c).dump(2) << "\n";
    err << "inputs " << n << ", outputs " << l.outputs.size() << "\n";
    print_report(err, report);
  }
  return kOk;
}

circuit::Circuit load_circuit(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Rejected(path + ": " + e.what());
  }
  // Accept a bare circuit or a report object carrying one.
  if (j.is_object() && j.contains("circuit")) j = j["circuit"];
  try {
    return circuit::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Rejected(path + ": " + e.what());
  } catch (const circuit::CircuitError& e) {
    throw Rejected(path + ": " + e.what());
  }
}

std::string bits_string(const std::vector<int>& b) {
  std::string s;
  for (int x : b) s += x ? '1' : '0';
  return s;
}

int oracle_verify(const Config& cfg, const std::string& circ_file, const std::string& file, int n,
                  std::ostream& out) {
  const circuit::Circuit c = load_circuit(circ_file);
  const std::string src = read_file(file);
  const oracle::BTerm t = with_file(file, [&] { return oracle::parse_bterm(src); });
  std::string type;
  try {
    type = oracle::typecheck(t);
  } catch (const Error& e) {
    throw Rejected(file + ": " + e.what());
  }
  if (n < 0) n = inputs_from_type(type);
  std::vector<std::string> names;
  const oracle::BTerm applied = oracle::apply_inputs(t, n, &names);
  oracle::VerifyResult r;
  try {
    r = oracle::verify_oracle(c, applied, names);
  } catch (const oracle::OracleError& e) {
    throw Rejected(e.what());
  }
  if (cfg.json) {
    Json j = header("oracle-verify", cfg);
    j["circuit"] = circ_file;
    j["file"] = file;
    j["inputs"] = n;
    j["ok"] = r.ok;
    if (r.counterexample) {
      j["counterexample"] = {{"x", bits_string(r.counterexample->x)},
                             {"y", bits_string(r.counterexample->y)},
                             {"got", bits_string(r.counterexample->got)},
                             {"expected", bits_string(r.counterexample->expected)}};
    }
    out << j.dump(2) << "\n";
  } else if (r.ok) {
    out << "OK\n";
  } else {
    const auto& ce = *r.counterexample;
    out << "MISMATCH x=" << bits_string(ce.x) << " y=" << bits_string(ce.y) << " got=" << bits_string(ce.got)
        << " expected=" << bits_string(ce.expected) << "\n";
  }
  return r.ok ? kOk : kNegative;
}

// ---- usynth ----

qnum::Matrix load_matrix(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return qnum::parse_matrix(text);
  } catch (const Error& e) {
    throw Rejected(path + ": " + e.what());
  }
}

int log2_dim(const qnum::Matrix& u, const std::string& path) {
  int n = 0;
  while ((Eigen::Index{1} << n) < u.rows()) ++n;
  if (u.rows() != u.cols() || (Eigen::Index{1} << n) != u.rows() || n == 0) {
    throw Rejected(path + ": dimension must be a power of two >= 2");
  }
  return n;
}

int usynth_householder(const Config& cfg, const std::string& file, std::ostream& out, std::ostream& err) {
  const qnum::Matrix u = load_matrix(file);
  const int n = log2_dim(u, file);
  if (!u.isUnitary(1e-8)) throw Rejected(file + ": matrix is not unitary");
  usynth::SynthResult r;
  try {
    r = usynth::synth_householder(u, std::min(cfg.max_qubits, 6));
  } catch (const usynth::SynthError& e) {
    throw Rejected(file + ": " + e.what());
  }
  const double dist = qnum::phase_distance(circuit::to_unitary(r.circuit), u);
  const Json report = count_report(r.circuit, 0);
  if (cfg.json) {
    Json j = header("usynth-householder", cfg);
    j["file"] = file;
    j["qubits"] = n;
    j["cnots"] = r.counts.cnots;
    j["rotations"] = r.counts.rotations;
    j["error"] = dist;
    j["circuit"] = circuit::to_json(r.circuit);
    j["report"] = report;
    out << j.dump(2) << "\n";
  } else {
    out << circuit::to_json(r.circuit).dump(2) << "\n";
    err << "cnots " << r.counts.cnots << ", rotations " << r.counts.rotations << ", error " << fmt(dist) << "\n";
    print_report(err, report);
  }
  if (dist > 1e-6) throw InternalError("synthesized circuit is off by " + fmt(dist));
  return kOk;
}

int usynth_ion(const Config& cfg, const std::string& file, int layers, int restarts, int budget,
               std::ostream& out) {
  const qnum::Matrix u = load_matrix(file);
  const int n = log2_dim(u, file);
  if (n > 6) throw Rejected(file + ": at most 6 qubits");
  RandomSource rng(cfg.seed);
  usynth::BfgsOptions opts;
  opts.restarts = restarts;
  opts.max_iterations = budget;
  const usynth::BfgsResult r = usynth::bfgs_synth(u, layers, rng, opts);
  if (cfg.json) {
    Json j = header("usynth-ion", cfg);
    j["file"] = file;
    j["qubits"] = n;
    j["layers"] = layers;
    j["theta"] = r.theta;
    j["error"] = r.error;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    out << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < r.theta.size(); ++i) out << (i ? " " : "") << std::setprecision(17) << r.theta[i];
    out << "\nerror " << fmt(r.error) << "\niterations " << r.iterations << "\n";
    if (!r.converged) out << "not converged\n";
  }
  return r.converged ? kOk : kNegative;
}

int usynth_bound(const Config& cfg, int n, std::ostream& out) {
  if (n < 1 || n > 62) throw UsageError("--n must be in 1..62");
  const std::uint64_t b = usynth::ms_layer_lower_bound(n);
  if (cfg.json) {
    Json j = header("usynth-bound", cfg);
    j["n"] = n;
    j["bound"] = b;
    out << j.dump(2) << "\n";
  } else {
    out << b << "\n";
  }
  return kOk;
}

// ---- pathsum ----

int pathsum_verify(const Config& cfg, const std::string& fa, const std::string& fb, std::ostream& out) {
  const circuit::Circuit a = load_circuit(fa);
  const circuit::Circuit b = load_circuit(fb);
  std::string verdict;
  std::string witness;
  std::string reason;
  try {
    const pathsum::Verdict v = pathsum::equiv(a, b, cfg.tol);
    if (v.equivalent) {
      verdict = "EQUIV";
    } else {
      verdict = "DISTINCT";
      const std::size_t n = a.inputs().size();
      for (std::size_t k = 0; k < n; ++k) witness += ((*v.witness >> (n - 1 - k)) & 1) ? '1' : '0';
    }
  } catch (const pathsum::PathSumError& e) {
    verdict = "UNSUPPORTED";
    reason = e.what();
  }
  if (cfg.json) {
    Json j = header("pathsum-verify", cfg);
    j["a"] = fa;
    j["b"] = fb;
    j["verdict"] = verdict;
    if (!witness.empty()) j["witness"] = witness;
    if (!reason.empty()) j["reason"] = reason;
    out << j.dump(2) << "\n";
  } else {
    out << verdict;
    if (!witness.empty()) out << " |" << witness << ">";
    if (!reason.empty()) out << ": " << reason;
    out << "\n";
  }
  return verdict == "EQUIV" ? kOk : kNegative;
}

// ---- iso ----

iso::Module load_module(const std::string& file) {
  const std::string src = read_file(file);
  return with_file(file, [&] { return iso::parse_module(src); });
}

std::string pick_iso(const iso::Module& m, const std::string& requested, const std::string& file) {
  if (!requested.empty()) return requested;
  const auto closed = m.closed_names();
  if (closed.empty()) throw Rejected(file + ": no iso without parameters");
  return closed.back();
}

int iso_check(const Config& cfg, const std::string& file, const std::string& which, int depth, std::ostream& out) {
  iso::Module m = load_module(file);
  std::vector<std::string> targets;
  if (!which.empty()) {
    targets.push_back(which);
  } else {
    targets = m.closed_names();
  }
  Json results = Json::array();
  bool ok = true;
  for (const auto& name : targets) {
    Json r;
    r["iso"] = name;
    std::string line;
    try {
      iso::IsoPtr f = m.get(name);
      const std::string type = iso::check_iso(*f, depth);
      r["ok"] = true;
      r["type"] = type;
      r["quantum"] = f->quantum;
      const auto warnings = iso::structural_guard(*f);
      r["warnings"] = warnings;
      line = name + " : " + type;
      for (const auto& w : warnings) line += "\n  warning: " + w;
    } catch (const iso::IsoError& e) {
      ok = false;
      r["ok"] = false;
      r["error"] = e.what();
      line = name + ": rejected: " + e.what();
    }
    results.push_back(r);
    if (!cfg.json) out << line << "\n";
  }
  if (cfg.json) {
    Json j = header("iso-check", cfg);
    j["file"] = file;
    j["ok"] = ok;
    j["isos"] = results;
    out << j.dump(2) << "\n";
  }
  return ok ? kOk : kNegative;
}

int iso_run(const Config& cfg, const std::string& file, const std::string& which, const std::string& value,
            std::uint64_t fuel, std::ostream& out) {
  iso::Module m = load_module(file);
  const std::string name = pick_iso(m, which, file);
  iso::AmpValue in;
  try {
    in = m.value(value);
  } catch (const SyntaxError& e) {
    throw UsageError(std::string("--value: ") + e.what());
  }
  iso::AmpValue r;
  try {
    iso::IsoPtr f = m.get(name);
    r = iso::apply_quantum(*f, in, fuel);
  } catch (const iso::IsoError& e) {
    throw Rejected(name + ": " + e.what());
  }
  if (cfg.json) {
    Json j = header("iso-run", cfg);
    j["file"] = file;
    j["iso"] = name;
    j["input"] = iso::to_string(in);
    Json terms = Json::array();
    for (const auto& [c, v] : r.terms) terms.push_back({{"re", c.real()}, {"im", c.imag()}, {"value", iso::to_string(v)}});
    j["output"] = terms;
    j["norm"] = r.norm();
    out << j.dump(2) << "\n";
  } else {
    out << iso::to_string(r) << "\n";
  }
  return kOk;
}

int iso_matrix(const Config& cfg, const std::string& file, const std::string& which, int depth, std::ostream& out) {
  iso::Module m = load_module(file);
  const std::string name = pick_iso(m, which, file);
  qnum::Matrix u;
  try {
    u = iso::to_matrix(*m.get(name), depth);
  } catch (const iso::IsoError& e) {
    throw Rejected(name + ": " + e.what());
  }
  if (u.rows() > 4096) throw Rejected(name + ": matrix too large");
  std::ostringstream text;
  qnum::write_matrix(text, u);
  if (cfg.json) {
    Json j = header("iso-matrix", cfg);
    j["file"] = file;
    j["iso"] = name;
    j["depth"] = depth;
    j["rows"] = u.rows();
    j["cols"] = u.cols();
    j["unitary"] = u.rows() == u.cols() && u.isUnitary(cfg.tol);
    j["matrix"] = text.str();
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum programming toolkit", "qlang"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--shots", cfg.shots, "number of runs")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-qubits", cfg.max_qubits, "largest simulated register")
      ->capture_default_str()
      ->check(CLI::Range(1, 30));
  app.add_option("--tol", cfg.tol, "numerical tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--json", cfg.json, "machine-readable output");

  std::string file, file2, value, which;
  bool trace = false, landauer = false;
  std::uint64_t fuel = 1000000;
  int inputs = -1, layers = 2, n = 0, depth = 4, restarts = 5, budget = 2000;
  std::function<int()> action;

  auto sub = [&](CLI::App* parent, const char* name, const char* desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  CLI::App* qlc = sub(&app, "qlc", "quantum lambda calculus");
  qlc->require_subcommand(1);
  CLI::App* c = sub(qlc, "check", "type a program");
  c->add_option("file", file)->required();
  c->callback([&] { action = [&] { return qlc_check(cfg, file, out); }; });
  c = sub(qlc, "run", "run a program --shots times");
  c->add_option("file", file)->required();
  c->add_flag("--trace", trace, "print the reduction trace of the first shot");
  c->add_option("--fuel", fuel, "step limit per shot")->capture_default_str();
  c->callback([&] { action = [&] { return qlc_run(cfg, file, trace, fuel, out); }; });

  CLI::App* orc = sub(&app, "oracle", "classical oracle synthesis");
  orc->require_subcommand(1);
  c = sub(orc, "synth", "compile a boolean program to an oracle circuit");
  c->add_option("file", file)->required();
  c->add_option("--inputs", inputs, "number of input bits (default: from the type)");
  c->add_flag("--landauer", landauer, "emit the garbage-producing circuit");
  c->callback([&] { action = [&] { return oracle_synth(cfg, file, inputs, landauer, out, err); }; });
  c = sub(orc, "verify", "check a circuit against a boolean program on all inputs");
  c->add_option("circuit", file2)->required();
  c->add_option("file", file)->required();
  c->add_option("--inputs", inputs, "number of input bits (default: from the type)");
  c->callback([&] { action = [&] { return oracle_verify(cfg, file2, file, inputs, out); }; });

  CLI::App* us = sub(&app, "usynth", "unitary synthesis");
  us->require_subcommand(1);
  c = sub(us, "householder", "Householder decomposition into a circuit");
  c->add_option("matrix", file)->required();
  c->callback([&] { action = [&] { return usynth_householder(cfg, file, out, err); }; });
  c = sub(us, "ion", "fit a trapped-ion ansatz with BFGS");
  c->add_option("matrix", file)->required();
  c->add_option("--layers", layers, "MS layers")->capture_default_str()->check(CLI::Range(0, 64));
  c->add_option("--restarts", restarts, "random restarts")->capture_default_str()->check(CLI::Range(1, 100));
  c->add_option("--budget", budget, "iterations per restart")->capture_default_str()->check(CLI::PositiveNumber);
  c->callback([&] { action = [&] { return usynth_ion(cfg, file, layers, restarts, budget, out); }; });
  c = sub(us, "bound", "MS-layer lower bound");
  c->add_option("--n", n, "qubits")->required();
  c->callback([&] { action = [&] { return usynth_bound(cfg, n, out); }; });

  CLI::App* ps = sub(&app, "pathsum", "path-sum equivalence");
  ps->require_subcommand(1);
  c = sub(ps, "verify", "decide equivalence of two circuits");
  c->add_option("a", file)->required();
  c->add_option("b", file2)->required();
  c->callback([&] { action = [&] { return pathsum_verify(cfg, file, file2, out); }; });

  CLI::App* is = sub(&app, "iso", "reversible iso language");
  is->require_subcommand(1);
  c = sub(is, "check", "check isos");
  c->add_option("file", file)->required();
  c->add_option("--iso", which, "iso expression, e.g. map(not) (default: all without parameters)");
  c->add_option("--depth", depth, "unrolling depth")->capture_default_str()->check(CLI::Range(0, 16));
  c->callback([&] { action = [&] { return iso_check(cfg, file, which, depth, out); }; });
  c = sub(is, "run", "apply an iso to a value");
  c->add_option("file", file)->required();
  c->add_option("--value", value, "value or linear combination")->required();
  c->add_option("--iso", which, "iso expression (default: last without parameters)");
  c->add_option("--fuel", fuel, "application limit")->capture_default_str();
  c->callback([&] { action = [&] { return iso_run(cfg, file, which, value, fuel, out); }; });
  c = sub(is, "matrix", "matrix of an iso in the canonical basis");
  c->add_option("file", file)->required();
  c->add_option("--iso", which, "iso expression (default: last without parameters)");
  c->add_option("--depth", depth, "unrolling depth")->capture_default_str()->check(CLI::Range(0, 16));
  c->callback([&] { action = [&] { return iso_matrix(cfg, file, which, depth, out); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "qlang: " << e.what() << "\n";
    return kUsage;
  }

  const int saved = qnum::max_qubits();
  qnum::set_max_qubits(cfg.max_qubits);
  struct Restore {
    int n;
    ~Restore() { qnum::set_max_qubits(n); }
  } restore{saved};
  try {
    return action();
  } catch (const UsageError& e) {
    err << "qlang: " << e.what() << "\n";
    return kUsage;
  } catch (const InternalError& e) {
    err << "qlang: " << e.what() << "\n";
    return kInternal;
  } catch (const Rejected& e) {
    err << "qlang: " << e.what() << "\n";
    return kNegative;
  } catch (const Error& e) {
    err << "qlang: " << e.what() << "\n";
    return kNegative;
  } catch (const std::exception& e) {
    err << "qlang: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace qlang::cli
