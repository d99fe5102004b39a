#pragma once

#include "ergolab/common.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <variant>
#include <vector>

namespace ergolab {

/// A finite group as a validated Cayley table over dense element indices
/// 0..N-1. Immutable after construction; share via GroupPtr.
struct FiniteGroup {
  int order = 0;
  std::vector<int> table;  // row-major: table[a*order + b] = a*b
  int identity = 0;
  std::vector<int> inverses;
  std::string label;
  // Nonempty iff the group was built as a (product of) cyclic factor(s),
  // most significant factor first. Enables the dual/character machinery.
  std::vector<int> cyclic_factors;
  bool abelian = false;

  int op(int a, int b) const { return table[static_cast<size_t>(a) * order + b]; }
  int inv(int a) const { return inverses[a]; }
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

struct GroupSpec;

struct CyclicSpec { int n = 1; };
struct DihedralSpec { int n = 1; };   // order 2n
struct SymmetricSpec { int n = 1 ; }; // n <= 5
struct ProductSpec { std::vector<GroupSpec> factors; };
struct ExplicitSpec {
  std::vector<std::vector<int>> table;
  std::string label = "G";
};

struct GroupSpec {
  std::variant<CyclicSpec, DihedralSpec, SymmetricSpec, ProductSpec, ExplicitSpec> node;
};

namespace detail {

inline void check_element(const FiniteGroup& g, int x) {
  if (x < 0 || x >= g.order) throw IndexOutOfRange("element index " + std::to_string(x) + " out of range for " + g.label);
}

// Latin-square, identity, inverse and associativity checks. Associativity is
// exhaustive for N <= 64 and spot-checked on 200000 sampled triples above.
inline void validate_group(const FiniteGroup& g) {
  const int n = g.order;
  if (n <= 0) throw TableInvalid("group order must be positive");
  if (g.table.size() != static_cast<size_t>(n) * n) throw TableInvalid("Cayley table has wrong size");
  for (int v : g.table)
    if (v < 0 || v >= n) throw TableInvalid("Cayley table entry out of range");

  std::vector<char> seen(n);
  for (int a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int b = 0; b < n; ++b) {
      int v = g.op(a, b);
      if (seen[v]) throw TableInvalid("row " + std::to_string(a) + " is not a permutation");
      seen[v] = 1;
    }
  }
  for (int b = 0; b < n; ++b) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int a = 0; a < n; ++a) {
      int v = g.op(a, b);
      if (seen[v]) throw TableInvalid("column " + std::to_string(b) + " is not a permutation");
      seen[v] = 1;
    }
  }

  const int e = g.identity;
  if (e < 0 || e >= n) throw TableInvalid("identity index out of range");
  for (int x = 0; x < n; ++x)
    if (g.op(e, x) != x || g.op(x, e) != x) throw TableInvalid("identity axiom fails at element " + std::to_string(x));
  if (g.inverses.size() != static_cast<size_t>(n)) throw TableInvalid("inverse table has wrong size");
  for (int x = 0; x < n; ++x) {
    int y = g.inverses[x];
    if (y < 0 || y >= n) throw TableInvalid("inverse index out of range");
    if (g.op(x, y) != e || g.op(y, x) != e) throw TableInvalid("inverse axiom fails at element " + std::to_string(x));
  }

  if (n <= 64) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (g.op(g.op(a, b), c) != g.op(a, g.op(b, c)))
            throw TableInvalid("associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")");
  } else {
    std::mt19937_64 rng(0x5eedu);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < 200000; ++t) {
      int a = pick(rng), b = pick(rng), c = pick(rng);
      if (g.op(g.op(a, b), c) != g.op(a, g.op(b, c)))
        throw TableInvalid("associativity fails at sampled triple");
    }
  }
}

// Fills identity/inverses/abelian from the raw table and validates.
inline GroupPtr finalize_group(FiniteGroup&& g) {
  const int n = g.order;
  int e = -1;
  for (int cand = 0; cand < n && e < 0; ++cand) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      if (g.op(cand, x) != x || g.op(x, cand) != x) ok = false;
    if (ok) e = cand;
  }
  if (e < 0) throw TableInvalid("table has no two-sided identity");
  g.identity = e;

  g.inverses.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y)
      if (g.op(x, y) == e && g.op(y, x) == e) { g.inverses[x] = y; break; }
    if (g.inverses[x] < 0) throw TableInvalid("element " + std::to_string(x) + " has no two-sided inverse");
  }

  g.abelian = true;
  for (int a = 0; a < n && g.abelian; ++a)
    for (int b = a + 1; b < n; ++b)
      if (g.op(a, b) != g.op(b, a)) { g.abelian = false; break; }

  validate_group(g);
  return std::make_shared<const FiniteGroup>(std::move(g));
}

}  // namespace detail

/// One-line permutations of {0..n-1} in lexicographic order; fixes the element
/// indexing of symmetric groups.
inline std::vector<std::vector<int>> symmetric_elements(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline GroupPtr cyclic_group(int n) {
  if (n < 1) throw TableInvalid("cyclic group needs n >= 1");
  FiniteGroup g;
  g.order = n;
  g.label = "Z" + std::to_string(n);
  g.cyclic_factors = {n};
  g.table.resize(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g.table[static_cast<size_t>(a) * n + b] = (a + b) % n;
  return detail::finalize_group(std::move(g));
}

/// Dihedral group of order 2n acting on the n-gon: index i < n is the rotation
/// x -> x+i, index n+i is the reflection x -> i-x; composition applies the
/// right factor first.
inline GroupPtr dihedral_group(int n) {
  if (n < 1) throw TableInvalid("dihedral group needs n >= 1");
  const int N = 2 * n;
  FiniteGroup g;
  g.order = N;
  g.label = "D" + std::to_string(n);
  g.table.resize(static_cast<size_t>(N) * N);
  auto mod = [n](int x) { return ((x % n) + n) % n; };
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      int v;
      if (a < n && b < n) v = mod(a + b);                 // r_a r_b = r_{a+b}
      else if (a < n) v = n + mod(a + (b - n));           // r_a s_b = s_{a+b}
      else if (b < n) v = n + mod((a - n) - b);           // s_a r_b = s_{a-b}
      else v = mod((a - n) - (b - n));                    // s_a s_b = r_{a-b}
      g.table[static_cast<size_t>(a) * N + b] = v;
    }
  return detail::finalize_group(std::move(g));
}

/// Symmetric group on n letters, n <= 5; elements are one-line permutations in
/// lexicographic order and (sigma*tau)(x) = sigma(tau(x)).
inline GroupPtr symmetric_group(int n) {
  if (n < 1) throw TableInvalid("symmetric group needs n >= 1");
  if (n > 5) throw SizeLimit("symmetric group capped at n <= 5");
  auto elems = symmetric_elements(n);
  const int N = static_cast<int>(elems.size());
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < N; ++i) index[elems[i]] = i;
  FiniteGroup g;
  g.order = N;
  g.label = "S" + std::to_string(n);
  g.table.resize(static_cast<size_t>(N) * N);
  std::vector<int> comp(n);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      for (int x = 0; x < n; ++x) comp[x] = elems[a][elems[b][x]];
      g.table[static_cast<size_t>(a) * N + b] = index[comp];
    }
  return detail::finalize_group(std::move(g));
}

/// Direct product with lexicographic pair indexing: (a,b) -> a*|B| + b.
inline GroupPtr product_group(const GroupPtr& A, const GroupPtr& B, int order_cap = kGroupOrderCap) {
  const int na = A->order, nb = B->order;
  if (static_cast<long long>(na) * nb > order_cap)
    throw SizeLimit("product group order exceeds cap " + std::to_string(order_cap));
  const int N = na * nb;
  FiniteGroup g;
  g.order = N;
  g.label = A->label + "x" + B->label;
  if (!A->cyclic_factors.empty() && !B->cyclic_factors.empty()) {
    g.cyclic_factors = A->cyclic_factors;
    g.cyclic_factors.insert(g.cyclic_factors.end(), B->cyclic_factors.begin(), B->cyclic_factors.end());
  }
  g.table.resize(static_cast<size_t>(N) * N);
  for (int a1 = 0; a1 < na; ++a1)
    for (int b1 = 0; b1 < nb; ++b1)
      for (int a2 = 0; a2 < na; ++a2)
        for (int b2 = 0; b2 < nb; ++b2) {
          int lhs = a1 * nb + b1, rhs = a2 * nb + b2;
          g.table[static_cast<size_t>(lhs) * N + rhs] = A->op(a1, a2) * nb + B->op(b1, b2);
        }
  return detail::finalize_group(std::move(g));
}

inline GroupPtr explicit_group(const std::vector<std::vector<int>>& table, const std::string& label = "G",
                               int order_cap = kGroupOrderCap) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw TableInvalid("explicit table is empty");
  if (n > order_cap) throw SizeLimit("explicit table order exceeds cap " + std::to_string(order_cap));
  FiniteGroup g;
  g.order = n;
  g.label = label;
  g.table.reserve(static_cast<size_t>(n) * n);
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw TableInvalid("explicit table is not square");
    g.table.insert(g.table.end(), row.begin(), row.end());
  }
  return detail::finalize_group(std::move(g));
}

inline GroupPtr build_group(const GroupSpec& spec, int order_cap = kGroupOrderCap) {
  return std::visit(
      [order_cap](const auto& node) -> GroupPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, CyclicSpec>) {
          if (node.n > order_cap) throw SizeLimit("cyclic order exceeds cap");
          return cyclic_group(node.n);
        } else if constexpr (std::is_same_v<T, DihedralSpec>) {
          if (2 * node.n > order_cap) throw SizeLimit("dihedral order exceeds cap");
          return dihedral_group(node.n);
        } else if constexpr (std::is_same_v<T, SymmetricSpec>) {
          return symmetric_group(node.n);
        } else if constexpr (std::is_same_v<T, ProductSpec>) {
          if (node.factors.empty()) throw TableInvalid("product spec needs at least one factor");
          GroupPtr acc = build_group(node.factors.front(), order_cap);
          for (size_t i = 1; i < node.factors.size(); ++i)
            acc = product_group(acc, build_group(node.factors[i], order_cap), order_cap);
          return acc;
        } else {
          return explicit_group(node.table, node.label, order_cap);
        }
      },
      spec.node);
}

/// A subgroup as a sorted element set of its parent.
struct Subgroup {
  GroupPtr parent;
  std::vector<int> elements;  // sorted

  bool contains(int g) const { return std::binary_search(elements.begin(), elements.end(), g); }
  bool whole_group() const { return parent && static_cast<int>(elements.size()) == parent->order; }
  int size() const { return static_cast<int>(elements.size()); }
};

/// Witness that a set lies in the proper left coset representative*subgroup.
struct CosetWitness {
  int representative = 0;
  Subgroup subgroup;
};

/// The subgroup d*Z of Z; d = 0 denotes the trivial subgroup {0}.
struct ZSubgroup {
  long long d = 0;
  bool compact() const { return d == 0; }
};

namespace detail {

inline void assert_subgroup(const Subgroup& h) {
  const FiniteGroup& g = *h.parent;
  if (!h.contains(g.identity)) throw OracleDisagreement("subgroup misses identity");
  for (int a : h.elements) {
    if (!h.contains(g.inv(a))) throw OracleDisagreement("subgroup not closed under inverse");
    for (int b : h.elements)
      if (!h.contains(g.op(a, b))) throw OracleDisagreement("subgroup not closed under product");
  }
  if (g.order % static_cast<int>(h.elements.size()) != 0)
    throw OracleDisagreement("subgroup size violates Lagrange");
}

}  // namespace detail

/// Least subgroup containing S: breadth-first closure from the identity under
/// right multiplication by generators (inverses arise from finite order).
inline Subgroup generated_subgroup(const GroupPtr& g, const std::vector<int>& generators) {
  const FiniteGroup& G = *g;
  for (int s : generators) detail::check_element(G, s);
  std::vector<char> in(G.order, 0);
  std::vector<int> queue;
  in[G.identity] = 1;
  queue.push_back(G.identity);
  for (size_t head = 0; head < queue.size(); ++head) {
    int x = queue[head];
    for (int s : generators) {
      int y = G.op(x, s);
      if (!in[y]) {
        in[y] = 1;
        queue.push_back(y);
      }
    }
  }
  Subgroup h;
  h.parent = g;
  for (int x = 0; x < G.order; ++x)
    if (in[x]) h.elements.push_back(x);
  detail::assert_subgroup(h);
  return h;
}

/// [S^{-1} S]: the subgroup generated by all differences s^{-1} t, s,t in S.
/// Independent of the base point by construction.
inline Subgroup difference_subgroup(const GroupPtr& g, const std::vector<int>& s) {
  if (s.empty()) throw EmptySupport("difference_subgroup: empty set");
  const FiniteGroup& G = *g;
  std::set<int> diffs;
  for (int a : s) {
    detail::check_element(G, a);
    for (int b : s) diffs.insert(G.op(G.inv(a), b));
  }
  return generated_subgroup(g, std::vector<int>(diffs.begin(), diffs.end()));
}

/// All subgroups, found by closure-extension from {e}; each subgroup arises by
/// repeatedly adjoining one outside element to an already-found subgroup.
/// Sorted by (size, lexicographic elements). Brute-force oracle machinery;
/// capped at order <= 120.
inline std::vector<Subgroup> enumerate_subgroups(const GroupPtr& g, int cap = kSubgroupEnumCap) {
  const FiniteGroup& G = *g;
  if (G.order > cap)
    throw SizeLimit("subgroup enumeration capped at order " + std::to_string(cap));
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> queue;
  std::vector<int> trivial{G.identity};
  seen.insert(trivial);
  queue.push_back(trivial);
  for (size_t head = 0; head < queue.size(); ++head) {
    std::vector<int> h = queue[head];
    for (int x = 0; x < G.order; ++x) {
      if (std::binary_search(h.begin(), h.end(), x)) continue;
      std::vector<int> gens = h;
      gens.push_back(x);
      Subgroup ext = generated_subgroup(g, gens);
      if (seen.insert(ext.elements).second) queue.push_back(ext.elements);
    }
  }
  std::vector<Subgroup> out;
  out.reserve(seen.size());
  for (const auto& elems : seen) out.push_back(Subgroup{g, elems});
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.elements.size() != b.elements.size()) return a.elements.size() < b.elements.size();
    return a.elements < b.elements;
  });
  return out;
}

/// Decides strict aperiodicity by its definition: searches for a proper
/// subgroup H and representative r with S contained in r*H. Deterministic
/// enumeration order: subgroups by increasing size (then lexicographic),
/// representatives by index. Returns the first witness, or nothing.
inline std::optional<CosetWitness> coset_containment_witness(
    const GroupPtr& g, const std::vector<int>& s,
    const std::vector<Subgroup>* precomputed = nullptr, int cap = kSubgroupEnumCap) {
  if (s.empty()) throw EmptySupport("coset_containment_witness: empty set");
  const FiniteGroup& G = *g;
  for (int x : s) detail::check_element(G, x);
  std::vector<Subgroup> local;
  const std::vector<Subgroup>* subs = precomputed;
  if (!subs) {
    local = enumerate_subgroups(g, cap);
    subs = &local;
  }
  std::vector<char> member(G.order);
  for (const Subgroup& h : *subs) {
    if (h.whole_group()) continue;
    if (static_cast<size_t>(h.size()) < s.size()) continue;  // |S| <= |rH| = |H|
    std::fill(member.begin(), member.end(), 0);
    for (int x : h.elements) member[x] = 1;
    for (int r = 0; r < G.order; ++r) {
      int rinv = G.inv(r);
      bool all = true;
      for (int x : s)
        if (!member[G.op(rinv, x)]) { all = false; break; }
      if (all) return CosetWitness{r, h};
    }
  }
  return std::nullopt;
}

/// Subgroup of Z generated by a finite set: d = gcd of the elements.
inline ZSubgroup z_subgroup(const std::vector<long long>& s) {
  if (s.empty()) throw EmptySupport("z_subgroup: empty set");
  long long d = 0;
  for (long long x : s) d = std::gcd(d, x < 0 ? -x : x);
  return ZSubgroup{d};
}

}  // namespace ergolab
