#include "meu/bdd.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace meu {

BddManager::BddManager(const std::vector<std::string>& preferred_order) {
  for (const auto& l : preferred_order) {
    if (by_label_.count(l)) input_error("variable '" + l + "' listed twice in order");
    by_label_[l] = static_cast<VarId>(labels_.size());
    labels_.push_back(l);
    claimed_.push_back(false);
  }
}

VarId BddManager::new_var(const std::string& label) {
  auto it = by_label_.find(label);
  if (it != by_label_.end()) {
    if (claimed_[it->second]) input_error("duplicate variable label '" + label + "'");
    claimed_[it->second] = true;
    return it->second;
  }
  VarId v = static_cast<VarId>(labels_.size());
  labels_.push_back(label);
  claimed_.push_back(true);
  by_label_[label] = v;
  return v;
}

std::optional<VarId> BddManager::find_var(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

const std::string& BddManager::label(VarId v) const {
  if (v >= labels_.size()) input_error("unknown variable " + std::to_string(v));
  return labels_[v];
}

void BddManager::check(Bdd a) const {
  if (a.manager() != this) throw Error(ErrorKind::usage, "BDD handle from a different manager");
}

uint32_t BddManager::make(uint32_t var, uint32_t lo, uint32_t hi) {
  if (lo == hi) return lo;
  size_t mask = unique_.size() - 1;
  size_t slot = KeyHash{}(Key{var, lo, hi}) & mask;
  for (; unique_[slot] != 0; slot = (slot + 1) & mask) {
    const Node& n = nodes_[unique_[slot]];
    if (n.var == var && n.lo == lo && n.hi == hi) return unique_[slot];
  }
  uint32_t id = static_cast<uint32_t>(nodes_.size());
  nodes_.push_back({var, lo, hi});
  unique_[slot] = id;
  if (2 * nodes_.size() > unique_.size()) {
    std::vector<uint32_t> bigger(unique_.size() * 2, 0);
    mask = bigger.size() - 1;
    for (uint32_t old : unique_) {
      if (old == 0) continue;
      const Node& n = nodes_[old];
      size_t s = KeyHash{}(Key{n.var, n.lo, n.hi}) & mask;
      while (bigger[s] != 0) s = (s + 1) & mask;
      bigger[s] = old;
    }
    unique_.swap(bigger);
  }
  return id;
}

Bdd BddManager::mk_var(VarId v) {
  if (v >= labels_.size()) input_error("unknown variable " + std::to_string(v));
  return Bdd(this, make(v, 0, 1));
}

Bdd BddManager::mk_lit(Literal l) {
  Bdd x = mk_var(l.var);
  return l.positive ? x : negate(x);
}

bool BddManager::cache_get(const Key& k, uint32_t& r) const {
  const CacheEntry& e = cache_[KeyHash{}(k) & (cache_.size() - 1)];
  if (!(e.k == k)) return false;
  r = e.r;
  return true;
}

void BddManager::cache_put(const Key& k, uint32_t r) {
  if (nodes_.size() > cache_.size() && cache_.size() < (size_t{1} << 22)) {
    // Entries are only hints, so dropping them on resize is safe.
    cache_.assign(cache_.size() * 2, CacheEntry{});
  }
  cache_[KeyHash{}(k) & (cache_.size() - 1)] = {k, r};
}

static bool terminal_case(BddOp op, uint32_t a, uint32_t b, uint32_t& out) {
  switch (op) {
    case BddOp::and_:
      if (a == 0 || b == 0) return out = 0, true;
      if (a == 1) return out = b, true;
      if (b == 1 || a == b) return out = a, true;
      break;
    case BddOp::or_:
      if (a == 1 || b == 1) return out = 1, true;
      if (a == 0) return out = b, true;
      if (b == 0 || a == b) return out = a, true;
      break;
    case BddOp::xor_:
      if (a == b) return out = 0, true;
      if (a == 0) return out = b, true;
      if (b == 0) return out = a, true;
      if (a < 2 && b < 2) return out = a ^ b, true;
      break;
    case BddOp::iff:
      if (a == b) return out = 1, true;
      if (a == 1) return out = b, true;
      if (b == 1) return out = a, true;
      if (a < 2 && b < 2) return out = (a == b), true;
      break;
    default:
      break;
  }
  return false;
}

uint32_t BddManager::apply_rec(BddOp op, uint32_t a, uint32_t b) {
  uint32_t out;
  if (terminal_case(op, a, b, out)) return out;
  if (a > b) std::swap(a, b);  // every binary operator here is commutative
  ++stats_.apply_calls;
  Key k{static_cast<uint32_t>(op), a, b};
  if (cache_get(k, out)) {
    ++stats_.apply_cache_hits;
    return out;
  }
  Node na = nodes_[a], nb = nodes_[b];
  uint32_t v = std::min(na.var, nb.var);
  uint32_t alo = na.var == v ? na.lo : a, ahi = na.var == v ? na.hi : a;
  uint32_t blo = nb.var == v ? nb.lo : b, bhi = nb.var == v ? nb.hi : b;
  uint32_t lo = apply_rec(op, alo, blo);
  uint32_t hi = apply_rec(op, ahi, bhi);
  uint32_t r = make(v, lo, hi);
  cache_put(k, r);
  return r;
}

uint32_t BddManager::not_rec(uint32_t a) {
  if (a < 2) return 1 - a;
  Key k{static_cast<uint32_t>(BddOp::not_), a, 0};
  uint32_t hit;
  if (cache_get(k, hit)) return hit;
  Node n = nodes_[a];
  uint32_t r = make(n.var, not_rec(n.lo), not_rec(n.hi));
  cache_put(k, r);
  return r;
}

uint32_t BddManager::cond_rec(uint32_t a, VarId v, bool val) {
  if (a < 2) return a;
  Node n = nodes_[a];
  if (n.var > v) return a;
  if (n.var == v) return val ? n.hi : n.lo;
  Key k{static_cast<uint32_t>(val ? BddOp::cond_t : BddOp::cond_f), a, v};
  uint32_t hit;
  if (cache_get(k, hit)) return hit;
  uint32_t r = make(n.var, cond_rec(n.lo, v, val), cond_rec(n.hi, v, val));
  cache_put(k, r);
  return r;
}

Bdd BddManager::apply(BddOp op, Bdd a, Bdd b) {
  check(a);
  check(b);
  if (op == BddOp::not_ || op == BddOp::cond_t || op == BddOp::cond_f)
    throw Error(ErrorKind::usage, "apply: not a binary operator");
  return Bdd(this, apply_rec(op, a.id(), b.id()));
}

Bdd BddManager::negate(Bdd a) {
  check(a);
  return Bdd(this, not_rec(a.id()));
}

Bdd BddManager::ite(Bdd g, Bdd t, Bdd e) {
  return or_(and_(g, t), and_(negate(g), e));
}

Bdd BddManager::condition(Bdd a, Literal l) {
  check(a);
  return Bdd(this, cond_rec(a.id(), l.var, l.positive));
}

Bdd BddManager::condition(Bdd a, const std::vector<Literal>& lits) {
  for (auto l : lits) a = condition(a, l);
  return a;
}

Bdd BddManager::exactly_one(const std::vector<VarId>& vars) {
  if (vars.empty()) input_error("exactly_one over an empty variable list");
  std::vector<VarId> vs = vars;
  std::sort(vs.begin(), vs.end());
  if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
    input_error("exactly_one over repeated variables");
  for (VarId v : vs)
    if (v >= labels_.size()) input_error("unknown variable " + std::to_string(v));
  // none: no variable from here on is true; one: exactly one is.
  uint32_t none = 1, one = 0;
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
    uint32_t new_one = make(*it, one, none);
    none = make(*it, none, 0);
    one = new_one;
  }
  return Bdd(this, one);
}

Bdd BddManager::conjoin(const std::vector<Bdd>& parts) {
  if (parts.empty()) return mk_true();
  std::vector<Bdd> layer = parts;
  while (layer.size() > 1) {
    std::vector<Bdd> next;
    for (size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(and_(layer[i], layer[i + 1]));
    if (layer.size() % 2) next.push_back(layer.back());
    layer.swap(next);
  }
  return layer[0];
}

size_t BddManager::size(Bdd root) const {
  check(root);
  std::unordered_set<uint32_t> seen;
  std::vector<uint32_t> stack{root.id()};
  while (!stack.empty()) {
    uint32_t a = stack.back();
    stack.pop_back();
    if (a < 2 || !seen.insert(a).second) continue;
    stack.push_back(nodes_[a].lo);
    stack.push_back(nodes_[a].hi);
  }
  return seen.size();
}

std::vector<VarId> BddManager::support(Bdd root) const {
  check(root);
  std::unordered_set<uint32_t> seen;
  std::vector<bool> in(labels_.size(), false);
  std::vector<uint32_t> stack{root.id()};
  while (!stack.empty()) {
    uint32_t a = stack.back();
    stack.pop_back();
    if (a < 2 || !seen.insert(a).second) continue;
    in[nodes_[a].var] = true;
    stack.push_back(nodes_[a].lo);
    stack.push_back(nodes_[a].hi);
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < in.size(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

bool BddManager::eval(Bdd root, const std::function<bool(VarId)>& assignment) const {
  check(root);
  uint32_t a = root.id();
  while (a >= 2) a = assignment(nodes_[a].var) ? nodes_[a].hi : nodes_[a].lo;
  return a == 1;
}

void BddManager::enumerate_models(
    Bdd root, const std::vector<VarId>& universe,
    const std::function<void(const std::vector<Literal>&)>& visit) const {
  check(root);
  std::vector<VarId> u = universe;
  std::sort(u.begin(), u.end());
  for (VarId v : support(root))
    if (!std::binary_search(u.begin(), u.end(), v))
      input_error("universe does not cover variable '" + labels_[v] + "'");
  std::vector<Literal> cur;
  std::function<void(size_t, uint32_t)> rec = [&](size_t i, uint32_t a) {
    if (a == 0) return;
    if (i == u.size()) {
      visit(cur);
      return;
    }
    bool tests = a >= 2 && nodes_[a].var == u[i];
    for (bool val : {true, false}) {
      cur.push_back({u[i], val});
      rec(i + 1, tests ? (val ? nodes_[a].hi : nodes_[a].lo) : a);
      cur.pop_back();
    }
  };
  rec(0, root.id());
}

static std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string BddManager::to_dot(const std::vector<std::pair<std::string, Bdd>>& roots) const {
  std::ostringstream os;
  os << "digraph bdd {\n";
  os << "  t0 [shape=box, label=\"0\"];\n  t1 [shape=box, label=\"1\"];\n";
  std::unordered_set<uint32_t> seen;
  std::vector<uint32_t> stack;
  auto name = [](uint32_t a) { return a < 2 ? "t" + std::to_string(a) : "n" + std::to_string(a); };
  for (size_t i = 0; i < roots.size(); ++i) {
    check(roots[i].second);
    os << "  r" << i << " [shape=plaintext, label=\"" << dot_escape(roots[i].first) << "\"];\n";
    os << "  r" << i << " -> " << name(roots[i].second.id()) << ";\n";
    stack.push_back(roots[i].second.id());
  }
  while (!stack.empty()) {
    uint32_t a = stack.back();
    stack.pop_back();
    if (a < 2 || !seen.insert(a).second) continue;
    const Node& n = nodes_[a];
    os << "  " << name(a) << " [shape=ellipse, label=\"" << dot_escape(labels_[n.var]) << "\"];\n";
    os << "  " << name(a) << " -> " << name(n.hi) << " [style=solid];\n";
    os << "  " << name(a) << " -> " << name(n.lo) << " [style=dashed];\n";
    stack.push_back(n.lo);
    stack.push_back(n.hi);
  }
  os << "}\n";
  return os.str();
}

template <class S>
typename S::value BddManager::amc(Bdd root, const WeightMap<S>& w) {
  using V = typename S::value;
  check(root);
  ++stats_.amc_calls;
  auto& root_memo = [this]() -> auto& {
    if constexpr (std::is_same_v<V, double>)
      return amc_real_memo_;
    else
      return amc_ev_memo_;
  }();
  auto key = std::make_pair(root.id(), w.id());
  if (auto it = root_memo.find(key); it != root_memo.end()) {
    ++stats_.amc_root_hits;
    return it->second;
  }

  std::vector<VarId> universe = w.domain();
  std::vector<V> gap_factor(universe.size());
  for (size_t i = 0; i < universe.size(); ++i)
    gap_factor[i] = S::add(w.pos(universe[i]), w.neg(universe[i]));
  RangeProduct<S> gaps(gap_factor);
  // Multiplies in the factor of every universe variable strictly between
  // levels `above` and `below`.
  auto gap = [&](int64_t above, int64_t below, V v) {
    auto first = std::upper_bound(universe.begin(), universe.end(), above,
                                  [](int64_t x, VarId u) { return x < static_cast<int64_t>(u); });
    auto last = std::lower_bound(first, universe.end(), below,
                                 [](VarId u, int64_t x) { return static_cast<int64_t>(u) < x; });
    return gaps.apply(first - universe.begin(), last - universe.begin(), v);
  };
  auto level = [&](uint32_t a) -> int64_t {
    return a < 2 ? static_cast<int64_t>(labels_.size()) + 1 : nodes_[a].var;
  };

  std::unordered_map<uint32_t, V> memo;
  std::function<V(uint32_t)> rec = [&](uint32_t a) -> V {
    if (a == 0) return S::zero();
    if (a == 1) return S::one();
    if (auto it = memo.find(a); it != memo.end()) {
      ++stats_.amc_memo_hits;
      return it->second;
    }
    ++stats_.amc_node_visits;
    const Node n = nodes_[a];
    if (!w.has(n.var)) input_error("variable '" + labels_[n.var] + "' has no weight");
    V hi = gap(n.var, level(n.hi), rec(n.hi));
    V lo = gap(n.var, level(n.lo), rec(n.lo));
    V r = S::add(S::mul(w.pos(n.var), hi), S::mul(w.neg(n.var), lo));
    memo.emplace(a, r);
    return r;
  };
  V result = gap(-1, level(root.id()), rec(root.id()));
  root_memo.emplace(key, result);
  return result;
}

template double BddManager::amc<RealSemiring>(Bdd, const WeightMap<RealSemiring>&);
template ExpectationValue BddManager::amc<ExpectationSemiring>(Bdd, const WeightMap<ExpectationSemiring>&);

}  // namespace meu
