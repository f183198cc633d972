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

#include "qlang/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <unordered_map>

namespace qlang::oracle {

using circuit::Circuit;
using circuit::WireId;

struct Env;
using EnvPtr = std::shared_ptr<const Env>;

// A boolean known at compile time, or one carried by a dynamic value id.
struct Bit {
  bool is_static = true;
  bool value = false;
  int dyn = -1;

  friend bool operator==(const Bit&, const Bit&) = default;
};

struct VBool {
  bool value;
};
struct VDyn {
  int id;
};
struct VClosure {
  std::string param;
  BTerm body;
  EnvPtr env;
};
struct VPrim {
  Prim op;
  std::vector<ValuePtr> args;
};
struct VPair {
  ValuePtr first, second;
};
struct VRec {
  std::string fn, param;
  BTerm body;
  EnvPtr env;
};

struct Value {
  std::variant<VBool, VDyn, VClosure, VPrim, VPair, VRec> v;
};

struct Env {
  std::string name;
  ValuePtr value;
  EnvPtr next;
};

namespace {

ValuePtr mk(decltype(Value::v) v) { return std::make_shared<Value>(Value{std::move(v)}); }
ValuePtr mk_bit(const Bit& b) { return b.is_static ? mk(VBool{b.value}) : mk(VDyn{b.dyn}); }

EnvPtr extend(EnvPtr env, std::string name, ValuePtr v) {
  return std::make_shared<Env>(Env{std::move(name), std::move(v), std::move(env)});
}

std::string where(const BTerm& t) {
  return t->line > 0 ? std::to_string(t->line) + ":" + std::to_string(t->column) + ": " : "";
}

// Receives the operations on dynamic booleans that survive partial evaluation.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual int not_(int a) = 0;
  virtual int and_(int a, int b) = 0;
  /// c ? a : b with c dynamic and a, b not both static.
  virtual int mux(int c, Bit a, Bit b) = 0;
};

class Evaluator {
 public:
  Evaluator(Backend* backend, std::uint64_t fuel) : backend_(backend), fuel_(fuel) {}

  ValuePtr eval(const BTerm& t, const EnvPtr& env) {
    return std::visit(
        [&](const auto& n) -> ValuePtr {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Var>) {
            for (const Env* e = env.get(); e; e = e->next.get())
              if (e->name == n.name) return e->value;
            throw OracleError(where(t) + "unbound variable '" + n.name + "'");
          } else if constexpr (std::is_same_v<N, Lam>) {
            return mk(VClosure{n.param, n.body, env});
          } else if constexpr (std::is_same_v<N, App>) {
            const ValuePtr f = eval(n.fn, env);
            return apply(f, eval(n.arg, env), t);
          } else if constexpr (std::is_same_v<N, BoolLit>) {
            return mk(VBool{n.value});
          } else if constexpr (std::is_same_v<N, PrimOp>) {
            return mk(VPrim{n.op, {}});
          } else if constexpr (std::is_same_v<N, PairT>) {
            const ValuePtr a = eval(n.first, env);
            return mk(VPair{a, eval(n.second, env)});
          } else if constexpr (std::is_same_v<N, LetPair>) {
            const ValuePtr p = eval(n.bound, env);
            const auto* pr = std::get_if<VPair>(&p->v);
            if (!pr) throw OracleError(where(t) + "let-pair on a non-pair");
            return eval(n.body, extend(extend(env, n.x, pr->first), n.y, pr->second));
          } else if constexpr (std::is_same_v<N, If>) {
            const Bit c = to_bit(eval(n.cond, env), n.cond);
            if (c.is_static) return eval(c.value ? n.then_branch : n.else_branch, env);
            const ValuePtr a = eval(n.then_branch, env);
            const ValuePtr b = eval(n.else_branch, env);
            return mux_value(c.dyn, a, b, t);
          } else if constexpr (std::is_same_v<N, Let>) {
            return eval(n.body, extend(env, n.name, eval(n.bound, env)));
          } else {
            const ValuePtr f = mk(VRec{n.fn, n.param, n.fn_body, env});
            return eval(n.body, extend(env, n.fn, f));
          }
        },
        t->node);
  }

  static Bit to_bit(const ValuePtr& v, const BTerm& at) {
    if (const auto* b = std::get_if<VBool>(&v->v)) return Bit{true, b->value, -1};
    if (const auto* d = std::get_if<VDyn>(&v->v)) return Bit{false, false, d->id};
    throw OracleError(where(at) + "expected a boolean");
  }

  Bit not_bit(Bit a) {
    if (a.is_static) return Bit{true, !a.value, -1};
    return Bit{false, false, backend()->not_(a.dyn)};
  }

  Bit and_bit(Bit a, Bit b) {
    if ((a.is_static && !a.value) || (b.is_static && !b.value)) return Bit{true, false, -1};
    if (a.is_static) return b;
    if (b.is_static) return a;
    if (a.dyn == b.dyn) return a;
    return Bit{false, false, backend()->and_(a.dyn, b.dyn)};
  }

  Bit mux_bit(int c, Bit a, Bit b) {
    // Inside the then-branch c is 1, inside the else-branch it is 0.
    if (!a.is_static && a.dyn == c) a = Bit{true, true, -1};
    if (!b.is_static && b.dyn == c) b = Bit{true, false, -1};
    if (a == b) return a;
    if (a.is_static && b.is_static) {
      return a.value ? Bit{false, false, c} : not_bit(Bit{false, false, c});
    }
    return Bit{false, false, backend()->mux(c, a, b)};
  }

 private:
  Backend* backend() {
    if (!backend_) throw InternalError("dynamic boolean during closed evaluation");
    return backend_;
  }

  void burn(const BTerm& at) {
    if (fuel_ == 0) {
      throw OracleError(where(at) + "evaluation fuel exhausted (recursion that does not unfold at compile time?)");
    }
    --fuel_;
  }

  ValuePtr apply(const ValuePtr& f, const ValuePtr& a, const BTerm& at) {
    burn(at);
    if (const auto* c = std::get_if<VClosure>(&f->v)) return eval(c->body, extend(c->env, c->param, a));
    if (const auto* r = std::get_if<VRec>(&f->v)) {
      return eval(r->body, extend(extend(r->env, r->fn, f), r->param, a));
    }
    if (const auto* p = std::get_if<VPrim>(&f->v)) {
      if (p->op == Prim::kNot) return mk_bit(not_bit(to_bit(a, at)));
      if (p->args.empty()) return mk(VPrim{Prim::kAnd, {a}});
      return mk_bit(and_bit(to_bit(p->args[0], at), to_bit(a, at)));
    }
    throw OracleError(where(at) + "application of a non-function");
  }

  ValuePtr mux_value(int c, const ValuePtr& a, const ValuePtr& b, const BTerm& at) {
    const auto* pa = std::get_if<VPair>(&a->v);
    const auto* pb = std::get_if<VPair>(&b->v);
    if (pa && pb) {
      const ValuePtr x = mux_value(c, pa->first, pb->first, at);
      return mk(VPair{x, mux_value(c, pa->second, pb->second, at)});
    }
    const bool ba = std::holds_alternative<VBool>(a->v) || std::holds_alternative<VDyn>(a->v);
    const bool bb = std::holds_alternative<VBool>(b->v) || std::holds_alternative<VDyn>(b->v);
    if (!ba || !bb) {
      throw OracleError(where(at) + "if on a circuit-carried bit must return booleans or pairs of booleans");
    }
    return mk_bit(mux_bit(c, to_bit(a, at), to_bit(b, at)));
  }

  Backend* backend_;
  std::uint64_t fuel_;
};

void flatten(const ValuePtr& v, std::vector<Bit>& out) {
  if (const auto* p = std::get_if<VPair>(&v->v)) {
    flatten(p->first, out);
    flatten(p->second, out);
  } else if (const auto* b = std::get_if<VBool>(&v->v)) {
    out.push_back(Bit{true, b->value, -1});
  } else if (const auto* d = std::get_if<VDyn>(&v->v)) {
    out.push_back(Bit{false, false, d->id});
  } else {
    throw OracleError("result is not a boolean or a tuple of booleans");
  }
}

class CircuitBackend : public Backend {
 public:
  explicit CircuitBackend(int n_inputs) : c(Circuit::identity(n_inputs)) {}

  int not_(int a) override {
    const std::size_t start = c.ops().size();
    const WireId r = c.init(0);
    c.gate("CNOT", {a, r});
    c.gate("NOT", {r});
    blocks.push_back({"not", start, c.ops().size()});
    return r;
  }

  int and_(int a, int b) override {
    const std::size_t start = c.ops().size();
    const WireId r = c.init(0);
    c.gate("TOFFOLI", {a, b, r});
    blocks.push_back({"and", start, c.ops().size()});
    return r;
  }

  int mux(int cw, Bit a, Bit b) override {
    // r = (c and a) xor (not c and b)
    const std::size_t start = c.ops().size();
    const WireId r = c.init(0);
    if (a.is_static) {
      if (a.value) c.gate("CNOT", {cw, r});
    } else {
      c.gate("TOFFOLI", {cw, a.dyn, r});
    }
    if (b.is_static) {
      if (b.value) {
        c.gate("CNOT", {cw, r});
        c.gate("NOT", {r});
      }
    } else {
      c.gate("NOT", {cw});
      c.gate("TOFFOLI", {cw, b.dyn, r});
      c.gate("NOT", {cw});
    }
    blocks.push_back({"if", start, c.ops().size()});
    return r;
  }

  WireId constant(bool v) {
    const std::size_t start = c.ops().size();
    const WireId r = c.init(0);
    if (v) c.gate("NOT", {r});
    blocks.push_back({"const", start, c.ops().size()});
    return r;
  }

  Circuit c;
  std::vector<Block> blocks;
};

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max()
                                                            : a + b;
}

// Tracks the size of the residual term each dynamic value stands for.
class SizeBackend : public Backend {
 public:
  explicit SizeBackend(int n_inputs) : size(static_cast<std::size_t>(n_inputs), 0) {}

  int not_(int a) override { return push(sat_add(1, size[a])); }
  int and_(int a, int b) override { return push(sat_add(1, sat_add(size[a], size[b]))); }
  int mux(int c, Bit a, Bit b) override {
    return push(sat_add(1, sat_add(size[c], sat_add(bit_size(a), bit_size(b)))));
  }
  std::uint64_t bit_size(const Bit& b) const { return b.is_static ? 1 : size[b.dyn]; }

  std::vector<std::uint64_t> size;

 private:
  int push(std::uint64_t s) {
    size.push_back(s);
    return static_cast<int>(size.size() - 1);
  }
};

EnvPtr input_env(const std::vector<std::string>& inputs) {
  EnvPtr env;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    env = extend(env, inputs[i], mk(VDyn{static_cast<int>(i)}));
  }
  return env;
}

}  // namespace

ValuePtr eval_bool(const BTerm& t, const std::map<std::string, bool>& inputs, std::uint64_t fuel) {
  EnvPtr env;
  for (const auto& [name, b] : inputs) env = extend(env, name, mk(VBool{b}));
  Evaluator ev(nullptr, fuel);
  return ev.eval(t, env);
}

std::vector<bool> value_bits(const ValuePtr& v) {
  std::vector<Bit> bits;
  flatten(v, bits);
  std::vector<bool> out;
  for (const auto& b : bits) {
    if (!b.is_static) throw InternalError("dynamic bit in a closed value");
    out.push_back(b.value);
  }
  return out;
}

std::string to_string(const ValuePtr& v) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VBool>) {
          return n.value ? "tt" : "ff";
        } else if constexpr (std::is_same_v<N, VDyn>) {
          return "<wire " + std::to_string(n.id) + ">";
        } else if constexpr (std::is_same_v<N, VPair>) {
          return "(" + to_string(n.first) + ", " + to_string(n.second) + ")";
        } else {
          return "<fun>";
        }
      },
      v->v);
}

Landauer synth_landauer(const BTerm& t, const std::vector<std::string>& inputs, std::uint64_t fuel) {
  typecheck(t, inputs);
  CircuitBackend be(static_cast<int>(inputs.size()));
  Evaluator ev(&be, fuel);
  std::vector<Bit> bits;
  flatten(ev.eval(t, input_env(inputs)), bits);

  Landauer l;
  for (std::size_t i = 0; i < inputs.size(); ++i) l.inputs.push_back(static_cast<WireId>(i));
  for (const Bit& b : bits) l.outputs.push_back(b.is_static ? be.constant(b.value) : b.dyn);
  const std::set<WireId> outs(l.outputs.begin(), l.outputs.end());
  for (const auto& op : be.c.ops()) {
    if (const auto* i = std::get_if<circuit::InitOp>(&op)) {
      if (!outs.count(i->wire)) l.garbage.push_back(i->wire);
    }
  }
  l.circuit = std::move(be.c);
  l.blocks = std::move(be.blocks);
  return l;
}

std::uint64_t operator_count(const BTerm& t, const std::vector<std::string>& inputs, std::uint64_t fuel) {
  typecheck(t, inputs);
  SizeBackend be(static_cast<int>(inputs.size()));
  Evaluator ev(&be, fuel);
  std::vector<Bit> bits;
  flatten(ev.eval(t, input_env(inputs)), bits);
  std::uint64_t total = 0;
  for (const Bit& b : bits) total = sat_add(total, be.bit_size(b));
  return total;
}

Circuit bennett_wrap(const Landauer& l) {
  std::vector<circuit::Wire> ins;
  for (WireId x : l.inputs) ins.push_back({x, circuit::WireKind::kQbit});
  std::vector<circuit::CircOp> core_ops;
  for (const auto& op : l.circuit.ops()) {
    if (const auto* i = std::get_if<circuit::InitOp>(&op)) {
      ins.push_back({i->wire, circuit::WireKind::kQbit});
      if (i->value) core_ops.emplace_back(circuit::GateOp{"NOT", {}, {}, {i->wire}, false});
    } else if (std::holds_alternative<circuit::GateOp>(op)) {
      core_ops.push_back(op);
    } else {
      throw OracleError("Landauer circuit contains a measurement or discard");
    }
  }
  const Circuit core(ins, core_ops, ins);
  Circuit inv;
  try {
    inv = circuit::inverse(core);
  } catch (const circuit::CircuitError& e) {
    throw InternalError(std::string("cannot invert Landauer core: ") + e.what());
  }
  WireId next = core.next_wire();
  std::vector<circuit::Wire> all = ins;
  std::vector<circuit::CircOp> ops = core_ops;
  for (WireId o : l.outputs) {
    const WireId y = next++;
    all.push_back({y, circuit::WireKind::kQbit});
    ops.emplace_back(circuit::GateOp{"CNOT", {}, {}, {o, y}, false});
  }
  ops.insert(ops.end(), inv.ops().begin(), inv.ops().end());
  return Circuit(all, std::move(ops), all);
}

std::optional<std::vector<int>> simulate_classical(const Circuit& c, std::vector<int> bits) {
  std::vector<WireId> order;
  for (const auto& w : c.inputs()) {
    if (w.kind != circuit::WireKind::kQbit) return std::nullopt;
    order.push_back(w.id);
  }
  if (bits.size() != order.size()) throw OracleError("simulate_classical: wrong number of input bits");
  std::unordered_map<WireId, int> value;
  for (std::size_t i = 0; i < order.size(); ++i) value[order[i]] = bits[i];
  for (const auto& op : c.ops()) {
    if (const auto* g = std::get_if<circuit::GateOp>(&op)) {
      bool fire = true;
      for (const auto& ctl : g->controls) {
        const int want = ctl.polarity == qnum::Polarity::kPositive ? 1 : 0;
        fire = fire && value.at(ctl.wire) == want;
      }
      const std::string& n = g->name;
      auto& t = g->targets;
      if (n == "X" || n == "NOT") {
        if (fire) value.at(t[0]) ^= 1;
      } else if (n == "CNOT") {
        if (fire && value.at(t[0])) value.at(t[1]) ^= 1;
      } else if (n == "TOFFOLI") {
        if (fire && value.at(t[0]) && value.at(t[1])) value.at(t[2]) ^= 1;
      } else if (n == "SWAP") {
        if (fire) std::swap(value.at(t[0]), value.at(t[1]));
      } else if (n != "I") {
        return std::nullopt;
      }
    } else if (const auto* i = std::get_if<circuit::InitOp>(&op)) {
      value[i->wire] = i->value;
    } else if (const auto* d = std::get_if<circuit::DiscardOp>(&op)) {
      value.erase(d->wire);
    } else {
      return std::nullopt;
    }
  }
  std::vector<int> out;
  for (const auto& w : c.outputs()) out.push_back(value.at(w.id));
  return out;
}

VerifyResult verify_oracle(const Circuit& c, const BTerm& f, const std::vector<std::string>& inputs) {
  constexpr std::size_t kMaxInputs = 12;
  const std::size_t n = inputs.size();
  if (n > kMaxInputs) throw OracleError("verify_oracle is limited to 12 input bits");
  typecheck(f, inputs);
  auto truth = [&](std::uint64_t x) {
    std::map<std::string, bool> env;
    for (std::size_t i = 0; i < n; ++i) env[inputs[i]] = (x >> (n - 1 - i)) & 1U;
    return value_bits(eval_bool(f, env));
  };
  const std::size_t m = truth(0).size();
  const std::size_t width = c.inputs().size();
  if (width < n + m || c.outputs().size() != width) {
    throw OracleError("circuit has " + std::to_string(width) + " wires; expected at least " +
                      std::to_string(n + m) + " (inputs plus targets) with matching outputs");
  }
  const std::size_t k = width - n - m;
  const bool classical = simulate_classical(c, std::vector<int>(width, 0)).has_value();

  VerifyResult res;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const std::vector<bool> fx = truth(x);
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << m); ++y) {
      std::vector<int> in(width, 0);
      for (std::size_t i = 0; i < n; ++i) in[i] = static_cast<int>((x >> (n - 1 - i)) & 1U);
      for (std::size_t j = 0; j < m; ++j) in[n + k + j] = static_cast<int>((y >> (m - 1 - j)) & 1U);
      std::vector<int> want = in;
      for (std::size_t j = 0; j < m; ++j) want[n + k + j] ^= fx[j] ? 1 : 0;

      std::vector<int> got;
      if (classical) {
        got = *simulate_classical(c, in);
      } else {
        std::uint64_t idx = 0;
        for (int b : in) idx = (idx << 1) | static_cast<std::uint64_t>(b);
        RandomSource rng(0);
        const auto r = circuit::run(c, qnum::StateVector::basis(static_cast<int>(width), idx), rng);
        Eigen::Index best = 0;
        const double p = r.state.amps().cwiseAbs2().maxCoeff(&best);
        if (p > 1 - 1e-9) {
          for (std::size_t i = 0; i < width; ++i) {
            got.push_back(static_cast<int>((static_cast<std::uint64_t>(best) >> (width - 1 - i)) & 1U));
          }
        }
      }
      if (got != want) {
        Counterexample ce;
        ce.x.assign(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(n));
        ce.y.assign(in.begin() + static_cast<std::ptrdiff_t>(n + k), in.end());
        ce.got = got;
        ce.expected = want;
        res.ok = false;
        res.counterexample = std::move(ce);
        return res;
      }
    }
  }
  return res;
}

}  // namespace qlang::oracle
