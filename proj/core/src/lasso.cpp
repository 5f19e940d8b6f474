#include "req2ltl/lasso.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "req2ltl/errors.hpp"

namespace req2ltl::ltl {

namespace {

// Subformulas of one or more formulas, hash-consed and stored children
// before parents, so a single forward pass evaluates everything.
class Closure {
 public:
  struct Entry {
    Op op;
    int a = -1;  // child / left operand, or atom index for Op::Atom
    int b = -1;  // right operand
  };

  int add(const Formula& f) {
    Key key;
    if (f.is_atom()) {
      key = {Op::Atom, atom_index(f.text()), -1};
    } else if (is_unary(f.op())) {
      key = {f.op(), add(f.child()), -1};
    } else {
      const int l = add(f.left());
      key = {f.op(), l, add(f.right())};
    }
    auto [it, fresh] = index_.emplace(key, static_cast<int>(entries_.size()));
    if (fresh) entries_.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    return it->second;
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& atoms() const noexcept { return atoms_; }

 private:
  using Key = std::tuple<Op, int, int>;

  int atom_index(const std::string& text) {
    auto [it, fresh] = atom_ids_.emplace(text, static_cast<int>(atoms_.size()));
    if (fresh) atoms_.push_back(text);
    return it->second;
  }

  std::map<Key, int> index_;
  std::vector<Entry> entries_;
  std::map<std::string, int> atom_ids_;
  std::vector<std::string> atoms_;
};

using Mask = std::uint32_t;  // valuation of up to 32 atoms, bit i = atom i

// Truth table [entry][position] over a lasso whose positions are given as
// atom masks, with loop start `loop`.
std::vector<std::vector<char>> evaluate_closure(const Closure& cl, const std::vector<Mask>& word,
                                                std::size_t loop) {
  const std::size_t n = word.size();
  auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : loop; };
  const auto& entries = cl.entries();
  std::vector<std::vector<char>> val(entries.size(), std::vector<char>(n, 0));

  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& en = entries[e];
    auto& v = val[e];
    switch (en.op) {
      case Op::Atom:
        for (std::size_t i = 0; i < n; ++i) v[i] = (word[i] >> en.a) & 1U;
        break;
      case Op::Not:
        for (std::size_t i = 0; i < n; ++i) v[i] = !val[en.a][i];
        break;
      case Op::And:
        for (std::size_t i = 0; i < n; ++i) v[i] = val[en.a][i] && val[en.b][i];
        break;
      case Op::Or:
        for (std::size_t i = 0; i < n; ++i) v[i] = val[en.a][i] || val[en.b][i];
        break;
      case Op::Implies:
        for (std::size_t i = 0; i < n; ++i) v[i] = !val[en.a][i] || val[en.b][i];
        break;
      case Op::Next:
        for (std::size_t i = 0; i < n; ++i) v[i] = val[en.a][succ(i)];
        break;
      case Op::Eventually:
      case Op::Globally:
      case Op::Until: {
        // Least fixpoint for F/U (seeded false), greatest for G (seeded
        // true); backward sweeps until stable, at most two over the loop.
        const bool seed = en.op == Op::Globally;
        std::fill(v.begin(), v.end(), seed);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t k = n; k-- > 0;) {
            char nv;
            if (en.op == Op::Eventually) nv = val[en.a][k] || v[succ(k)];
            else if (en.op == Op::Globally) nv = val[en.a][k] && v[succ(k)];
            else nv = val[en.b][k] || (val[en.a][k] && v[succ(k)]);
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
    }
  }
  return val;
}

// Type = truth of every closure entry at one position, packed into words.
using Type = std::vector<std::uint64_t>;

struct TypeHash {
  std::size_t operator()(const Type& t) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto w : t) h = (h ^ w) * 1099511628211ULL;
    return h;
  }
};

bool get_bit(const Type& t, std::size_t i) { return (t[i / 64] >> (i % 64)) & 1U; }
void set_bit(Type& t, std::size_t i, bool b) {
  if (b) t[i / 64] |= (std::uint64_t{1} << (i % 64));
}

// Type at a position with valuation `sigma` whose successor has type `next`.
Type step(const Closure& cl, Mask sigma, const Type& next) {
  const auto& entries = cl.entries();
  Type cur(next.size(), 0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& en = entries[e];
    bool b = false;
    switch (en.op) {
      case Op::Atom: b = (sigma >> en.a) & 1U; break;
      case Op::Not: b = !get_bit(cur, en.a); break;
      case Op::And: b = get_bit(cur, en.a) && get_bit(cur, en.b); break;
      case Op::Or: b = get_bit(cur, en.a) || get_bit(cur, en.b); break;
      case Op::Implies: b = !get_bit(cur, en.a) || get_bit(cur, en.b); break;
      case Op::Next: b = get_bit(next, en.a); break;
      case Op::Eventually: b = get_bit(cur, en.a) || get_bit(next, e); break;
      case Op::Globally: b = get_bit(cur, en.a) && get_bit(next, e); break;
      case Op::Until: b = get_bit(cur, en.b) || (get_bit(cur, en.a) && get_bit(next, e)); break;
    }
    set_bit(cur, e, b);
  }
  return cur;
}

Valuation to_valuation(const std::vector<std::string>& atoms, Mask m) {
  Valuation v;
  for (std::size_t i = 0; i < atoms.size(); ++i) v[atoms[i]] = (m >> i) & 1U;
  return v;
}

}  // namespace

bool eval_lasso(const Formula& f, const LassoTrace& trace, std::size_t pos) {
  if (trace.period.empty()) throw std::invalid_argument("lasso period must be non-empty");
  if (pos >= trace.length()) throw std::invalid_argument("position outside the lasso");

  Closure cl;
  const int root = cl.add(f);
  if (cl.atoms().size() > 32) throw std::invalid_argument("eval_lasso supports at most 32 atoms");

  std::vector<Mask> word;
  word.reserve(trace.length());
  auto encode = [&](const Valuation& v) {
    Mask m = 0;
    for (std::size_t i = 0; i < cl.atoms().size(); ++i) {
      auto it = v.find(cl.atoms()[i]);
      if (it == v.end()) throw UnknownAtom(cl.atoms()[i]);
      if (it->second) m |= Mask{1} << i;
    }
    return m;
  };
  for (const auto& v : trace.prefix) word.push_back(encode(v));
  for (const auto& v : trace.period) word.push_back(encode(v));

  return evaluate_closure(cl, word, trace.prefix.size())[root][pos] != 0;
}

EquivResult find_distinguishing_lasso(const Formula& f, const Formula& g, const BoundedEquivOptions& opts) {
  if (opts.max_period == 0) throw std::invalid_argument("max_period must be at least 1");
  Closure cl;
  const int fi = cl.add(f);
  const int gi = cl.add(g);
  const std::size_t k = cl.atoms().size();
  if (k > opts.max_aps) throw TooManyAPs(k, opts.max_aps);
  if (k > 16) throw TooManyAPs(k, 16);

  const Mask valuations = Mask{1} << k;
  const std::size_t words = (cl.entries().size() + 63) / 64;

  // Layer 0: types at the loop start of every period-only lasso.
  struct Origin {
    int parent;                // index into the previous layer, -1 for layer 0
    Mask sigma;                // valuation consumed at this position
    std::vector<Mask> period;  // layer 0 only
  };
  std::vector<Type> layer;
  std::vector<Origin> origins;
  std::vector<std::vector<Origin>> history;
  std::unordered_map<Type, int, TypeHash> seen;

  for (std::size_t len = 1; len <= opts.max_period; ++len) {
    std::vector<Mask> period(len, 0);
    for (;;) {
      const auto table = evaluate_closure(cl, period, 0);
      Type t(words, 0);
      for (std::size_t e = 0; e < cl.entries().size(); ++e) set_bit(t, e, table[e][0] != 0);
      if (seen.emplace(t, static_cast<int>(layer.size())).second) {
        layer.push_back(std::move(t));
        origins.push_back({-1, 0, period});
      }
      std::size_t i = 0;
      while (i < len && ++period[i] == valuations) period[i++] = 0;
      if (i == len) break;
    }
  }

  auto witness_for = [&](std::size_t depth, int idx) {
    LassoTrace w;
    for (std::size_t d = depth; d > 0; --d) {
      const auto& o = history[d][idx];
      w.prefix.push_back(to_valuation(cl.atoms(), o.sigma));
      idx = o.parent;
    }
    const auto& base = history[0][idx];
    for (Mask m : base.period) w.period.push_back(to_valuation(cl.atoms(), m));
    return w;
  };

  for (std::size_t depth = 0;; ++depth) {
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (get_bit(layer[i], fi) != get_bit(layer[i], gi)) {
        history.push_back(origins);
        return {false, witness_for(depth, static_cast<int>(i))};
      }
    }
    if (depth == opts.max_prefix) break;
    history.push_back(origins);
    std::vector<Type> next_layer;
    std::vector<Origin> next_origins;
    seen.clear();
    for (std::size_t i = 0; i < layer.size(); ++i) {
      for (Mask sigma = 0; sigma < valuations; ++sigma) {
        Type t = step(cl, sigma, layer[i]);
        if (seen.emplace(t, static_cast<int>(next_layer.size())).second) {
          next_layer.push_back(std::move(t));
          next_origins.push_back({static_cast<int>(i), sigma, {}});
        }
      }
    }
    layer = std::move(next_layer);
    origins = std::move(next_origins);
  }
  return {true, {}};
}

bool bounded_equiv(const Formula& f, const Formula& g, const BoundedEquivOptions& opts) {
  return find_distinguishing_lasso(f, g, opts).equivalent;
}

}  // namespace req2ltl::ltl
