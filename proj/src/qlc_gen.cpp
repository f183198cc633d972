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

#include "qlang/qlc.hpp"

namespace qlang::qlc {

namespace {

enum class Ty { kBit, kQbit, kQQ, kBB, kUnit };

struct LVar {
  std::string name;
  bool qubit;
};
using Ctx = std::vector<LVar>;

class Gen {
 public:
  explicit Gen(RandomSource& rng) : rng_(rng) {}

  Term gen(Ty t, Ctx s, int d) {
    if (d <= 0) return base(t, std::move(s));
    switch (t) {
      case Ty::kBit:
        return bit(std::move(s), d);
      case Ty::kQbit:
        return qbit(std::move(s), d);
      case Ty::kQQ:
        return qq(std::move(s), d);
      case Ty::kBB:
        return bb(std::move(s), d);
      case Ty::kUnit:
        if (pick(2) == 0) return consume(std::move(s), unit());
        {
          auto [a, b] = split(std::move(s));
          return let_unit(gen(Ty::kUnit, a, d - 1), gen(Ty::kUnit, b, d - 1));
        }
    }
    return unit();
  }

 private:
  int pick(int n) { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(n))); }

  std::string fresh(const char* base) { return base + std::to_string(++counter_); }

  std::pair<Ctx, Ctx> split(Ctx s) {
    Ctx a, b;
    for (auto& v : s) (pick(2) ? a : b).push_back(std::move(v));
    return {a, b};
  }

  static Term let_unit(Term m, Term n) {
    auto t = std::make_shared<Node>();
    t->v = LetUnit{std::move(m), std::move(n)};
    return t;
  }
  static Term if_(Term c, Term a, Term b) {
    auto t = std::make_shared<Node>();
    t->v = If{std::move(c), std::move(a), std::move(b)};
    return t;
  }
  static Term let_pair(std::string x, std::string y, Term m, Term n) {
    auto t = std::make_shared<Node>();
    t->v = LetPair{std::move(x), std::move(y), std::move(m), std::move(n)};
    return t;
  }
  static Term letrec(std::string f, std::string x, Term fb, Term body) {
    auto t = std::make_shared<Node>();
    t->v = LetRec{std::move(f), std::move(x), std::move(fb), std::move(body)};
    return t;
  }
  static Term gate(const char* g, Term arg) { return app(constant(g), std::move(arg)); }

  // Uses up every variable of s, then continues with body.
  Term consume(Ctx s, Term body) {
    for (const auto& v : s) {
      Term c = v.qubit ? app(constant("meas"), var(v.name)) : var(v.name);
      body = let_unit(if_(c, unit(), unit()), body);
    }
    return body;
  }

  Term base(Ty t, Ctx s) {
    switch (t) {
      case Ty::kBit:
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (!s[i].qubit) {
            Term x = var(s[i].name);
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
            return consume(s, x);
          }
        }
        return consume(s, lit(pick(2) == 1));
      case Ty::kQbit:
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s[i].qubit) {
            Term x = var(s[i].name);
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
            return consume(s, x);
          }
        }
        return consume(s, app(constant("qinit"), lit(pick(2) == 1)));
      case Ty::kQQ:
      case Ty::kBB: {
        const Ty half = t == Ty::kQQ ? Ty::kQbit : Ty::kBit;
        auto [a, b] = split(std::move(s));
        Term x = base(half, a);
        return pair(x, base(half, b));
      }
      case Ty::kUnit:
        return consume(std::move(s), unit());
    }
    return unit();
  }

  // (fun y -> N) M with y bound to a fresh bit or qubit.
  Term let_bind(Ty t, Ctx s, int d) {
    auto [a, b] = split(std::move(s));
    const bool q = pick(2) == 1;
    const std::string y = fresh("y");
    Term m = gen(q ? Ty::kQbit : Ty::kBit, a, d - 1);
    b.push_back({y, q});
    return app(lam(y, gen(t, b, d - 1)), m);
  }

  Term bit(Ctx s, int d) {
    switch (pick(5)) {
      case 0:
        return app(constant("meas"), gen(Ty::kQbit, std::move(s), d - 1));
      case 1: {
        auto [a, b] = split(std::move(s));
        Term c = gen(Ty::kBit, a, d - 1);
        Term x = gen(Ty::kBit, b, d - 1);
        return if_(c, x, gen(Ty::kBit, b, d - 1));
      }
      case 2:
        return let_bind(Ty::kBit, std::move(s), d);
      case 3: {
        // Recursion that unfolds once before stopping.
        const std::string f = fresh("f");
        const std::string n = fresh("n");
        Term body = if_(var(n), gen(Ty::kBit, {}, d - 1), app(var(f), lit(true)));
        return consume(std::move(s), letrec(f, n, body, app(var(f), lit(false))));
      }
      default: {
        auto [a, b] = split(std::move(s));
        const std::string x = fresh("a");
        const std::string y = fresh("b");
        Term m = gen(Ty::kBB, a, d - 1);
        b.push_back({x, false});
        b.push_back({y, false});
        return let_pair(x, y, m, gen(Ty::kBit, b, d - 1));
      }
    }
  }

  Term qbit(Ctx s, int d) {
    static const char* kUnary[] = {"H", "X", "Z", "S", "T"};
    switch (pick(5)) {
      case 0:
        return gate(kUnary[pick(5)], gen(Ty::kQbit, std::move(s), d - 1));
      case 1:
        return app(constant("qinit"), gen(Ty::kBit, std::move(s), d - 1));
      case 2:
        return let_bind(Ty::kQbit, std::move(s), d);
      case 3: {
        const std::string q = fresh("q");
        Term fn = lam(q, gate(kUnary[pick(5)], gate(kUnary[pick(5)], var(q))));
        const std::string g = fresh("g");
        Term circ = app(constant("unbox"), app(constant("box"), fn));
        return app(lam(g, app(var(g), gen(Ty::kQbit, std::move(s), d - 1))), circ);
      }
      default: {
        auto [a, b] = split(std::move(s));
        const std::string x = fresh("a");
        const std::string y = fresh("b");
        Term m = gen(Ty::kQQ, a, d - 1);
        b.push_back({y, true});
        return let_pair(x, y, m, consume({{x, true}}, gen(Ty::kQbit, b, d - 1)));
      }
    }
  }

  Term qq(Ctx s, int d) {
    switch (pick(5)) {
      case 0: {
        auto [a, b] = split(std::move(s));
        Term x = gen(Ty::kQbit, a, d - 1);
        return pair(x, gen(Ty::kQbit, b, d - 1));
      }
      case 1:
        return gate(pick(2) ? "CNOT" : "SWAP", gen(Ty::kQQ, std::move(s), d - 1));
      case 2:
        return let_bind(Ty::kQQ, std::move(s), d);
      case 3: {
        // A duplicable thunk, as in !(1 -o qbit).
        const std::string g = fresh("g");
        const std::string u = fresh("u");
        Term thunk = lam(u, let_unit(var(u), gen(Ty::kQbit, {}, d - 1)));
        Term body = pair(app(var(g), unit()), app(var(g), unit()));
        return consume(std::move(s), app(lam(g, body), thunk));
      }
      default: {
        const std::string w = fresh("w");
        const std::string x = fresh("a");
        const std::string y = fresh("b");
        Term fn = lam(w, let_pair(x, y, var(w), gate("CNOT", pair(gate("H", var(x)), var(y)))));
        const std::string g = fresh("g");
        Term circ = app(constant("unbox"), app(constant("box"), fn));
        return app(lam(g, app(var(g), gen(Ty::kQQ, std::move(s), d - 1))), circ);
      }
    }
  }

  Term bb(Ctx s, int d) {
    if (pick(2) == 0) {
      auto [a, b] = split(std::move(s));
      Term x = gen(Ty::kBit, a, d - 1);
      return pair(x, gen(Ty::kBit, b, d - 1));
    }
    auto [a, b] = split(std::move(s));
    const std::string x = fresh("a");
    const std::string y = fresh("b");
    Term m = gen(Ty::kQQ, a, d - 1);
    return let_pair(x, y, m,
                    consume(b, pair(app(constant("meas"), var(x)), app(constant("meas"), var(y)))));
  }

  RandomSource& rng_;
  int counter_ = 0;
};

}  // namespace

Term generate(RandomSource& rng, const GenOptions& opt) {
  Ctx s;
  for (int i = 0; i < opt.free_qubits; ++i) s.push_back({"x" + std::to_string(i), true});
  static const Ty kTypes[] = {Ty::kBit, Ty::kQbit, Ty::kQQ, Ty::kBB, Ty::kUnit};
  Gen g(rng);
  return g.gen(kTypes[rng.below(5)], std::move(s), opt.depth);
}

}  // namespace qlang::qlc
