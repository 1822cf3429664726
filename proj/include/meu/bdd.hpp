#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "meu/error.hpp"
#include "meu/semiring.hpp"

namespace meu {

// A variable's id is also its level in the (single, global) variable order.
using VarId = uint32_t;

struct Literal {
  VarId var = 0;
  bool positive = true;
};

class BddManager;

class Bdd {
 public:
  Bdd() = default;

  uint32_t id() const { return id_; }
  const BddManager* manager() const { return mgr_; }
  bool is_false() const { return id_ == 0; }
  bool is_true() const { return id_ == 1; }
  bool is_terminal() const { return id_ < 2; }
  bool valid() const { return mgr_ != nullptr; }

  friend bool operator==(const Bdd& a, const Bdd& b) { return a.mgr_ == b.mgr_ && a.id_ == b.id_; }
  friend bool operator!=(const Bdd& a, const Bdd& b) { return !(a == b); }

 private:
  friend class BddManager;
  Bdd(const BddManager* m, uint32_t id) : mgr_(m), id_(id) {}
  const BddManager* mgr_ = nullptr;
  uint32_t id_ = 0;
};

enum class BddOp : uint8_t { and_, or_, xor_, iff, not_, cond_t, cond_f };

struct BddStats {
  uint64_t apply_calls = 0;
  uint64_t apply_cache_hits = 0;
  uint64_t amc_calls = 0;
  uint64_t amc_node_visits = 0;
  uint64_t amc_memo_hits = 0;
  uint64_t amc_root_hits = 0;
};

template <class S>
class WeightMap;

class BddManager {
 public:
  static constexpr uint32_t terminal_var = UINT32_MAX;

  BddManager() = default;
  // Reserves levels for the given labels, in order; later registrations of
  // these labels claim the reserved level.
  explicit BddManager(const std::vector<std::string>& preferred_order);
  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;

  VarId new_var(const std::string& label);
  std::optional<VarId> find_var(const std::string& label) const;
  const std::string& label(VarId v) const;
  size_t var_count() const { return labels_.size(); }

  Bdd mk_true() const { return Bdd(this, 1); }
  Bdd mk_false() const { return Bdd(this, 0); }
  Bdd mk_var(VarId v);
  Bdd mk_lit(Literal l);

  Bdd apply(BddOp op, Bdd a, Bdd b);
  Bdd and_(Bdd a, Bdd b) { return apply(BddOp::and_, a, b); }
  Bdd or_(Bdd a, Bdd b) { return apply(BddOp::or_, a, b); }
  Bdd xor_(Bdd a, Bdd b) { return apply(BddOp::xor_, a, b); }
  Bdd iff(Bdd a, Bdd b) { return apply(BddOp::iff, a, b); }
  Bdd negate(Bdd a);
  Bdd ite(Bdd g, Bdd t, Bdd e);
  Bdd condition(Bdd a, Literal l);
  Bdd condition(Bdd a, const std::vector<Literal>& lits);
  Bdd exactly_one(const std::vector<VarId>& vars);
  Bdd conjoin(const std::vector<Bdd>& parts);

  // Node structure, for passes implemented outside the manager.
  VarId var_of(Bdd a) const { return nodes_[a.id()].var; }
  Bdd low(Bdd a) const { return Bdd(this, nodes_[a.id()].lo); }
  Bdd high(Bdd a) const { return Bdd(this, nodes_[a.id()].hi); }
  size_t node_count() const { return nodes_.size(); }
  size_t size(Bdd root) const;
  std::vector<VarId> support(Bdd root) const;
  bool eval(Bdd root, const std::function<bool(VarId)>& assignment) const;

  // Calls `visit` once per satisfying assignment over `universe`.
  void enumerate_models(Bdd root, const std::vector<VarId>& universe,
                        const std::function<void(const std::vector<Literal>&)>& visit) const;
  std::string to_dot(const std::vector<std::pair<std::string, Bdd>>& roots) const;

  template <class S>
  typename S::value amc(Bdd root, const WeightMap<S>& w);

  BddStats& stats() { return stats_; }
  const BddStats& stats() const { return stats_; }

 private:
  struct Node {
    uint32_t var, lo, hi;
  };
  struct Key {
    uint32_t a, b, c;
    bool operator==(const Key& o) const { return a == o.a && b == o.b && c == o.c; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      uint64_t h = k.a * 0x9E3779B97F4A7C15ull;
      h ^= (k.b + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2));
      h ^= (k.c * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2));
      return static_cast<size_t>(h ^ (h >> 29));
    }
  };

  uint32_t make(uint32_t var, uint32_t lo, uint32_t hi);
  uint32_t apply_rec(BddOp op, uint32_t a, uint32_t b);
  uint32_t not_rec(uint32_t a);
  uint32_t cond_rec(uint32_t a, VarId v, bool val);
  void check(Bdd a) const;

  std::vector<Node> nodes_{{terminal_var, 0, 0}, {terminal_var, 1, 1}};
  // Open-addressing unique table of node ids; 0 marks an empty slot since
  // terminals are never hashed.
  std::vector<uint32_t> unique_ = std::vector<uint32_t>(size_t{1} << 12, 0);
  // Lossy direct-mapped operation cache; grows with the node table.
  struct CacheEntry {
    Key k{UINT32_MAX, 0, 0};
    uint32_t r = 0;
  };
  bool cache_get(const Key& k, uint32_t& r) const;
  void cache_put(const Key& k, uint32_t r);
  std::vector<CacheEntry> cache_ = std::vector<CacheEntry>(size_t{1} << 14);
  std::vector<std::string> labels_;
  std::vector<bool> claimed_;
  std::unordered_map<std::string, VarId> by_label_;
  std::map<std::pair<uint32_t, uint64_t>, double> amc_real_memo_;
  std::map<std::pair<uint32_t, uint64_t>, ExpectationValue> amc_ev_memo_;
  BddStats stats_;
};

// Literal weights; the variable universe is the set of weighted variables.
template <class S>
class WeightMap {
 public:
  using value = typename S::value;

  void set(VarId v, value pos, value neg) {
    if (v >= pos_.size()) {
      pos_.resize(v + 1, S::zero());
      neg_.resize(v + 1, S::zero());
      has_.resize(v + 1, false);
    }
    if (has_[v]) input_error("variable " + std::to_string(v) + " weighted twice");
    pos_[v] = pos;
    neg_[v] = neg;
    has_[v] = true;
    ++count_;
    id_ = next_id();
  }
  bool has(VarId v) const { return v < has_.size() && has_[v]; }
  value pos(VarId v) const { return pos_[v]; }
  value neg(VarId v) const { return neg_[v]; }
  value lit(Literal l) const { return l.positive ? pos_[l.var] : neg_[l.var]; }
  size_t size() const { return count_; }
  uint64_t id() const { return id_; }
  size_t extent() const { return has_.size(); }

  std::vector<VarId> domain() const {
    std::vector<VarId> out;
    for (VarId v = 0; v < has_.size(); ++v)
      if (has_[v]) out.push_back(v);
    return out;
  }

  // Non-aliased union: shared variables must carry identical weights.
  void merge(const WeightMap& o) {
    for (VarId v = 0; v < o.has_.size(); ++v) {
      if (!o.has_[v]) continue;
      if (has(v)) {
        if (!(pos_[v] == o.pos_[v]) || !(neg_[v] == o.neg_[v]))
          input_error("conflicting weights for variable " + std::to_string(v));
        continue;
      }
      set(v, o.pos_[v], o.neg_[v]);
    }
  }

 private:
  static uint64_t next_id() {
    static std::atomic<uint64_t> counter{0};
    return ++counter;
  }
  std::vector<value> pos_, neg_;
  std::vector<bool> has_;
  size_t count_ = 0;
  uint64_t id_ = next_id();
};

// Products of a fixed factor sequence over index ranges, O(log n) per query.
// Used to multiply in the weights of variables a BDD edge skips over.
template <class S>
class RangeProduct {
 public:
  using V = typename S::value;
  RangeProduct() = default;
  explicit RangeProduct(const std::vector<V>& factors) {
    table_.push_back(factors);
    for (size_t w = 1; 2 * w <= factors.size(); w *= 2) {
      const auto& prev = table_.back();
      std::vector<V> next(prev.size() - w);
      for (size_t i = 0; i < next.size(); ++i) next[i] = S::mul(prev[i], prev[i + w]);
      table_.push_back(std::move(next));
    }
  }
  // v times the product of factors[i, j).
  V apply(size_t i, size_t j, V v) const {
    for (size_t k = table_.size(); k-- > 0 && i < j;) {
      size_t w = size_t{1} << k;
      if (j - i >= w) {
        v = S::mul(table_[k][i], v);
        i += w;
      }
    }
    return v;
  }

 private:
  std::vector<std::vector<V>> table_;
};

}  // namespace meu
