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

#include "qlang/circuit.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace qlang::circuit {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string op_label(const CircOp& op, std::size_t index) {
  const std::string where = " (op " + std::to_string(index) + ")";
  return std::visit(
      Overloaded{
          [&](const GateOp& g) { return "gate " + g.display_name() + where; },
          [&](const InitOp& i) { return "init of wire " + std::to_string(i.wire) + where; },
          [&](const MeasureOp& m) { return "measure of wire " + std::to_string(m.qwire) + where; },
          [&](const DiscardOp& d) { return "discard of wire " + std::to_string(d.wire) + where; },
      },
      op);
}

const char* kind_name(WireKind k) { return k == WireKind::kQbit ? "qbit" : "bit"; }

bool self_inverse(const std::string& name) {
  static const std::set<std::string> names = {"I",    "H",    "X",       "NOT",
                                              "Z",    "CNOT", "SWAP",    "TOFFOLI"};
  return names.count(name) > 0;
}

// Rewrites every wire id through `rename`, allocating fresh ids from `next`
// for ids not yet mapped.
class Renamer {
 public:
  explicit Renamer(WireId next) : next_(next) {}

  void bind(WireId from, WireId to) { map_[from] = to; }

  WireId operator()(WireId w) {
    auto it = map_.find(w);
    if (it != map_.end()) return it->second;
    map_[w] = next_;
    return next_++;
  }

  CircOp rename(const CircOp& op) {
    return std::visit(Overloaded{
                          [&](const GateOp& g) -> CircOp {
                            GateOp out = g;
                            for (auto& c : out.controls) c.wire = (*this)(c.wire);
                            for (auto& t : out.targets) t = (*this)(t);
                            return out;
                          },
                          [&](const InitOp& i) -> CircOp { return InitOp{(*this)(i.wire), i.value}; },
                          [&](const MeasureOp& m) -> CircOp {
                            return MeasureOp{(*this)(m.qwire), (*this)(m.bwire)};
                          },
                          [&](const DiscardOp& d) -> CircOp { return DiscardOp{(*this)(d.wire)}; },
                      },
                      op);
  }

  Wire rename(const Wire& w) { return {(*this)(w.id), w.kind}; }

 private:
  std::unordered_map<WireId, WireId> map_;
  WireId next_;
};

}  // namespace

qnum::Matrix gate_op_matrix(const GateOp& g) {
  const qnum::Matrix m =
      qnum::gate_matrix(g.name, g.params, static_cast<int>(g.targets.size()));
  return g.dagger ? qnum::Matrix(m.adjoint()) : m;
}

Circuit::Circuit(std::vector<Wire> inputs, std::vector<CircOp> ops,
                 std::vector<Wire> outputs)
    : inputs_(std::move(inputs)), ops_(std::move(ops)), outputs_(std::move(outputs)) {
  validate();
}

Circuit Circuit::identity(int n_qubits) {
  std::vector<Wire> wires;
  for (int i = 0; i < n_qubits; ++i) wires.push_back({i, WireKind::kQbit});
  return Circuit(wires, {}, wires);
}

Circuit& Circuit::gate(std::string name, std::vector<WireId> targets,
                       std::vector<double> params, std::vector<Control> controls) {
  return append(GateOp{std::move(name), std::move(params), std::move(controls),
                       std::move(targets), false});
}

WireId Circuit::init(int value) {
  const WireId w = next_wire();
  append(InitOp{w, value});
  return w;
}

WireId Circuit::measure(WireId q) {
  const WireId b = next_wire();
  append(MeasureOp{q, b});
  return b;
}

void Circuit::discard(WireId w) { append(DiscardOp{w}); }

Circuit& Circuit::append(CircOp op) {
  auto live = [&](WireId w) -> Wire* {
    for (auto& o : outputs_)
      if (o.id == w) return &o;
    return nullptr;
  };
  const std::string label = op_label(op, ops_.size());
  std::visit(Overloaded{
                 [&](const GateOp& g) {
                   std::set<WireId> seen;
                   auto use = [&](WireId w, bool allow_bit) {
                     const Wire* lw = live(w);
                     if (!lw) throw CircuitError(label + ": wire " + std::to_string(w) + " is not live");
                     if (lw->kind == WireKind::kBit && !allow_bit) {
                       throw CircuitError(label + ": wire " + std::to_string(w) + " is a bit wire");
                     }
                     if (!seen.insert(w).second) {
                       throw CircuitError(label + ": wire " + std::to_string(w) + " used twice");
                     }
                   };
                   for (const auto& c : g.controls) use(c.wire, true);
                   for (WireId t : g.targets) use(t, false);
                   const int arity = qnum::gate_arity(g.name);
                   if (arity < 0) throw CircuitError(label + ": unknown gate");
                   if ((arity > 0 && static_cast<int>(g.targets.size()) != arity) ||
                       (arity == 0 && g.targets.empty())) {
                     throw CircuitError(label + ": wrong number of targets");
                   }
                   if (static_cast<int>(g.params.size()) != qnum::gate_param_count(g.name)) {
                     throw CircuitError(label + ": wrong number of parameters");
                   }
                 },
                 [&](const InitOp& i) {
                   if (live(i.wire)) throw CircuitError(label + ": wire already live");
                   if (i.value != 0 && i.value != 1) throw CircuitError(label + ": value must be 0 or 1");
                   outputs_.push_back({i.wire, WireKind::kQbit});
                 },
                 [&](const MeasureOp& m) {
                   Wire* q = live(m.qwire);
                   if (!q || q->kind != WireKind::kQbit) {
                     throw CircuitError(label + ": measured wire is not a live qubit");
                   }
                   if (live(m.bwire)) throw CircuitError(label + ": result wire already live");
                   *q = {m.bwire, WireKind::kBit};
                 },
                 [&](const DiscardOp& d) {
                   auto it = std::find_if(outputs_.begin(), outputs_.end(),
                                          [&](const Wire& w) { return w.id == d.wire; });
                   if (it == outputs_.end()) throw CircuitError(label + ": wire is not live");
                   outputs_.erase(it);
                 },
             },
             op);
  ops_.push_back(std::move(op));
  return *this;
}

bool Circuit::is_pure() const {
  return std::all_of(ops_.begin(), ops_.end(),
                     [](const CircOp& op) { return std::holds_alternative<GateOp>(op); });
}

WireId Circuit::next_wire() const {
  WireId m = -1;
  for (const auto& w : inputs_) m = std::max(m, w.id);
  for (const auto& w : outputs_) m = std::max(m, w.id);
  for (const auto& op : ops_) {
    std::visit(Overloaded{
                   [&](const GateOp& g) {
                     for (const auto& c : g.controls) m = std::max(m, c.wire);
                     for (WireId t : g.targets) m = std::max(m, t);
                   },
                   [&](const InitOp& i) { m = std::max(m, i.wire); },
                   [&](const MeasureOp& ms) { m = std::max({m, ms.qwire, ms.bwire}); },
                   [&](const DiscardOp& d) { m = std::max(m, d.wire); },
               },
               op);
  }
  return m + 1;
}

void Circuit::validate() const {
  Circuit replay;
  std::set<WireId> ids;
  for (const auto& w : inputs_) {
    if (!ids.insert(w.id).second) throw CircuitError("duplicate input wire " + std::to_string(w.id));
  }
  replay.inputs_ = inputs_;
  replay.outputs_ = inputs_;
  for (const auto& op : ops_) replay.append(op);
  auto sorted = [](std::vector<Wire> v) {
    std::sort(v.begin(), v.end(), [](const Wire& a, const Wire& b) { return a.id < b.id; });
    return v;
  };
  if (sorted(replay.outputs_) != sorted(outputs_)) {
    throw CircuitError("declared outputs differ from the wires live at the end");
  }
}

Circuit seq(const Circuit& c1, const Circuit& c2) {
  if (c1.outputs().size() != c2.inputs().size()) {
    throw CircuitError("seq: arity mismatch (" + std::to_string(c1.outputs().size()) + " vs " +
                       std::to_string(c2.inputs().size()) + ")");
  }
  Renamer ren(c1.next_wire());
  for (std::size_t i = 0; i < c2.inputs().size(); ++i) {
    if (c1.outputs()[i].kind != c2.inputs()[i].kind) {
      throw CircuitError(std::string("seq: wire kind mismatch at position ") + std::to_string(i) +
                         " (" + kind_name(c1.outputs()[i].kind) + " vs " +
                         kind_name(c2.inputs()[i].kind) + ")");
    }
    ren.bind(c2.inputs()[i].id, c1.outputs()[i].id);
  }
  std::vector<CircOp> ops = c1.ops();
  for (const auto& op : c2.ops()) ops.push_back(ren.rename(op));
  std::vector<Wire> outs;
  for (const auto& w : c2.outputs()) outs.push_back(ren.rename(w));
  return Circuit(c1.inputs(), std::move(ops), std::move(outs));
}

Circuit par(const Circuit& c1, const Circuit& c2) {
  Renamer ren(c1.next_wire());
  std::vector<Wire> ins = c1.inputs(), outs = c1.outputs();
  std::vector<CircOp> ops = c1.ops();
  for (const auto& w : c2.inputs()) ins.push_back(ren.rename(w));
  for (const auto& op : c2.ops()) ops.push_back(ren.rename(op));
  for (const auto& w : c2.outputs()) outs.push_back(ren.rename(w));
  return Circuit(std::move(ins), std::move(ops), std::move(outs));
}

Circuit inverse(const Circuit& c) {
  std::vector<CircOp> ops;
  for (std::size_t i = c.ops().size(); i-- > 0;) {
    const auto* g = std::get_if<GateOp>(&c.ops()[i]);
    if (!g) throw CircuitError("cannot invert " + op_label(c.ops()[i], i));
    GateOp inv = *g;
    if (g->name == "S" || g->name == "T") {
      inv.dagger = !g->dagger;
    } else if (g->name == "RX" || g->name == "RY" || g->name == "RZ" || g->name == "MS") {
      for (double& p : inv.params) p = -p;
    } else if (!self_inverse(g->name)) {
      throw CircuitError("cannot invert " + op_label(c.ops()[i], i));
    }
    ops.push_back(std::move(inv));
  }
  return Circuit(c.outputs(), std::move(ops), c.inputs());
}

Circuit control(const Circuit& c, Polarity polarity) {
  const WireId w = c.next_wire();
  std::vector<CircOp> ops;
  for (std::size_t i = 0; i < c.ops().size(); ++i) {
    const auto* g = std::get_if<GateOp>(&c.ops()[i]);
    if (!g) throw CircuitError("cannot control " + op_label(c.ops()[i], i));
    GateOp out = *g;
    out.controls.insert(out.controls.begin(), Control{w, polarity});
    ops.push_back(std::move(out));
  }
  std::vector<Wire> ins{{w, WireKind::kQbit}}, outs{{w, WireKind::kQbit}};
  ins.insert(ins.end(), c.inputs().begin(), c.inputs().end());
  outs.insert(outs.end(), c.outputs().begin(), c.outputs().end());
  return Circuit(std::move(ins), std::move(ops), std::move(outs));
}

GateCount gate_count(const Circuit& c) {
  GateCount n;
  for (const auto& w : c.inputs()) {
    if (w.kind == WireKind::kQbit) ++n.qubits;
  }
  for (const auto& op : c.ops()) {
    std::visit(Overloaded{
                   [&](const GateOp& g) {
                     ++n.gates;
                     ++n.per_gate[g.display_name()];
                     const bool x_like = g.name == "X" || g.name == "NOT";
                     if ((g.name == "CNOT" && g.controls.empty()) ||
                         (x_like && g.controls.size() == 1)) {
                       ++n.cnots;
                     }
                   },
                   [&](const InitOp&) {
                     ++n.inits;
                     ++n.qubits;
                   },
                   [&](const MeasureOp&) { ++n.measures; },
                   [&](const DiscardOp&) { ++n.discards; },
               },
               op);
  }
  return n;
}

qnum::Matrix to_unitary(const Circuit& c) {
  if (!c.is_pure()) throw CircuitError("to_unitary needs a pure circuit");
  const int n = static_cast<int>(c.inputs().size());
  qnum::check_width(n);
  std::unordered_map<WireId, int> pos;
  for (int i = 0; i < n; ++i) {
    if (c.inputs()[i].kind != WireKind::kQbit) throw CircuitError("to_unitary: bit input");
    pos[c.inputs()[i].id] = i;
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  qnum::Matrix u = qnum::Matrix::Identity(dim, dim);
  std::vector<int> wires;
  std::vector<Polarity> pols;
  for (const auto& op : c.ops()) {
    const auto& g = std::get<GateOp>(op);
    wires.clear();
    pols.clear();
    for (const auto& ctl : g.controls) {
      wires.push_back(pos.at(ctl.wire));
      pols.push_back(ctl.polarity);
    }
    for (WireId t : g.targets) wires.push_back(pos.at(t));
    const qnum::Matrix m = qnum::with_controls(gate_op_matrix(g), pols);
    for (Eigen::Index col = 0; col < dim; ++col) {
      qnum::Vector v = u.col(col);
      qnum::apply_inplace(v, n, m, wires);
      u.col(col) = v;
    }
  }
  std::vector<int> order;
  bool identity_order = true;
  for (int k = 0; k < n; ++k) {
    order.push_back(pos.at(c.outputs()[k].id));
    identity_order = identity_order && order.back() == k;
  }
  if (identity_order) return u;
  qnum::Matrix out(dim, dim);
  for (Eigen::Index row = 0; row < dim; ++row) {
    std::uint64_t src = 0;
    for (int k = 0; k < n; ++k) {
      if ((static_cast<std::uint64_t>(row) >> (n - 1 - k)) & 1U) {
        src |= std::uint64_t{1} << (n - 1 - order[k]);
      }
    }
    out.row(row) = u.row(static_cast<Eigen::Index>(src));
  }
  return out;
}

RunResult run(const Circuit& c, const qnum::StateVector& input, RandomSource& rng,
              const std::vector<int>& bit_inputs) {
  std::vector<WireId> order;  // qubit position -> wire id
  std::unordered_map<WireId, int> bits;
  std::size_t next_bit = 0;
  for (const auto& w : c.inputs()) {
    if (w.kind == WireKind::kQbit) {
      order.push_back(w.id);
    } else {
      bits[w.id] = next_bit < bit_inputs.size() ? bit_inputs[next_bit] : 0;
      ++next_bit;
    }
  }
  if (static_cast<int>(order.size()) != input.n_qubits()) {
    throw CircuitError("run: input state has " + std::to_string(input.n_qubits()) +
                       " qubits, circuit expects " + std::to_string(order.size()));
  }
  auto position = [&](WireId w) {
    auto it = std::find(order.begin(), order.end(), w);
    if (it == order.end()) throw CircuitError("run: wire " + std::to_string(w) + " is not a live qubit");
    return static_cast<int>(it - order.begin());
  };
  qnum::StateVector state = input;
  RunResult result;
  for (std::size_t i = 0; i < c.ops().size(); ++i) {
    std::visit(Overloaded{
                   [&](const GateOp& g) {
                     std::vector<int> wires;
                     std::vector<Polarity> pols;
                     for (const auto& ctl : g.controls) {
                       auto b = bits.find(ctl.wire);
                       if (b != bits.end()) {
                         const int want = ctl.polarity == Polarity::kPositive ? 1 : 0;
                         if (b->second != want) return;
                         continue;
                       }
                       wires.push_back(position(ctl.wire));
                       pols.push_back(ctl.polarity);
                     }
                     for (WireId t : g.targets) wires.push_back(position(t));
                     state = qnum::apply(state, qnum::with_controls(gate_op_matrix(g), pols), wires);
                   },
                   [&](const InitOp& in) {
                     state = qnum::append_qubit(state, in.value);
                     order.push_back(in.wire);
                   },
                   [&](const MeasureOp& m) {
                     const int p = position(m.qwire);
                     const qnum::Measurement r = qnum::measure(state, p, rng);
                     state = qnum::discard(r.state, p);
                     order.erase(order.begin() + p);
                     bits[m.bwire] = r.bit;
                     result.record.push_back(r.bit);
                   },
                   [&](const DiscardOp& d) {
                     if (bits.erase(d.wire)) return;
                     const int p = position(d.wire);
                     try {
                       state = qnum::discard(state, p);
                     } catch (const qnum::NumError&) {
                       throw CircuitError("unsafe discard of wire " + std::to_string(d.wire) +
                                          " (op " + std::to_string(i) +
                                          "): not in a classical state");
                     }
                     order.erase(order.begin() + p);
                   },
               },
               c.ops()[i]);
  }
  std::vector<int> out_order;
  for (const auto& w : c.outputs()) {
    if (w.kind == WireKind::kQbit) {
      out_order.push_back(position(w.id));
    } else {
      result.bits.push_back(bits.at(w.id));
    }
  }
  result.state = qnum::permute_wires(state, out_order);
  return result;
}

namespace {

nlohmann::ordered_json wires_json(const std::vector<Wire>& ws) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& w : ws) {
    nlohmann::ordered_json o;
    o["id"] = w.id;
    o["kind"] = kind_name(w.kind);
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<Wire> wires_from(const nlohmann::json& arr) {
  std::vector<Wire> out;
  for (const auto& o : arr) {
    const std::string kind = o.at("kind").get<std::string>();
    if (kind != "qbit" && kind != "bit") throw CircuitError("unknown wire kind '" + kind + "'");
    out.push_back({o.at("id").get<int>(), kind == "qbit" ? WireKind::kQbit : WireKind::kBit});
  }
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const Circuit& c) {
  nlohmann::ordered_json j;
  j["inputs"] = wires_json(c.inputs());
  auto ops = nlohmann::ordered_json::array();
  for (const auto& op : c.ops()) {
    nlohmann::ordered_json o;
    std::visit(Overloaded{
                   [&](const GateOp& g) {
                     o["op"] = "gate";
                     o["name"] = g.display_name();
                     o["params"] = g.params;
                     auto ctl = nlohmann::ordered_json::array();
                     for (const auto& c2 : g.controls) {
                       ctl.push_back({c2.wire, c2.polarity == Polarity::kPositive ? "pos" : "neg"});
                     }
                     o["controls"] = std::move(ctl);
                     o["targets"] = g.targets;
                   },
                   [&](const InitOp& i) {
                     o["op"] = "init";
                     o["wire"] = i.wire;
                     o["value"] = i.value;
                   },
                   [&](const MeasureOp& m) {
                     o["op"] = "measure";
                     o["qwire"] = m.qwire;
                     o["bwire"] = m.bwire;
                   },
                   [&](const DiscardOp& d) {
                     o["op"] = "discard";
                     o["wire"] = d.wire;
                   },
               },
               op);
    ops.push_back(std::move(o));
  }
  j["ops"] = std::move(ops);
  j["outputs"] = wires_json(c.outputs());
  return j;
}

Circuit from_json(const nlohmann::json& j) {
  try {
    std::vector<CircOp> ops;
    for (const auto& o : j.at("ops")) {
      const std::string kind = o.at("op").get<std::string>();
      if (kind == "gate") {
        GateOp g;
        g.name = o.at("name").get<std::string>();
        if (qnum::gate_arity(g.name) < 0 && g.name.size() > 2 &&
            g.name.compare(g.name.size() - 2, 2, "dg") == 0) {
          g.name.resize(g.name.size() - 2);
          g.dagger = true;
        }
        g.params = o.value("params", std::vector<double>{});
        for (const auto& c : o.value("controls", nlohmann::json::array())) {
          const std::string pol = c.at(1).get<std::string>();
          if (pol != "pos" && pol != "neg") throw CircuitError("control polarity must be pos or neg");
          g.controls.push_back({c.at(0).get<int>(), pol == "pos" ? Polarity::kPositive
                                                                 : Polarity::kNegative});
        }
        g.targets = o.at("targets").get<std::vector<int>>();
        ops.emplace_back(std::move(g));
      } else if (kind == "init") {
        ops.emplace_back(InitOp{o.at("wire").get<int>(), o.at("value").get<int>()});
      } else if (kind == "measure") {
        ops.emplace_back(MeasureOp{o.at("qwire").get<int>(), o.at("bwire").get<int>()});
      } else if (kind == "discard") {
        ops.emplace_back(DiscardOp{o.at("wire").get<int>()});
      } else {
        throw CircuitError("unknown op kind '" + kind + "'");
      }
    }
    return Circuit(wires_from(j.at("inputs")), std::move(ops), wires_from(j.at("outputs")));
  } catch (const nlohmann::json::exception& e) {
    throw CircuitError(std::string("malformed circuit JSON: ") + e.what());
  }
}

}  // namespace qlang::circuit
