#pragma once

#include "ergolab/group.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace ergolab {

/// Complex measure on a finite group: one coefficient per element.
struct FiniteMeasure {
  GroupPtr group;
  std::vector<cplx> coeffs;
};

/// Complex function on a finite group (the representation space).
struct GroupFunction {
  GroupPtr group;
  std::vector<cplx> values;
};

/// Finitely supported complex measure on Z, stored as a dense window
/// coeffs[0..] starting at offset `base`. Sparse supports stay cheap because
/// the window is trimmed to the outermost nonzero entries; an all-zero measure
/// has an empty window. Doubles as a finitely supported function on Z.
struct IntMeasure {
  long long base = 0;
  std::vector<cplx> coeffs;

  bool zero() const { return coeffs.empty(); }
  long long lo() const { return base; }
  long long hi() const { return base + static_cast<long long>(coeffs.size()) - 1; }
  cplx at(long long k) const {
    if (zero() || k < lo() || k > hi()) return cplx{};
    return coeffs[static_cast<size_t>(k - base)];
  }
};

using ZFunction = IntMeasure;

namespace detail {

inline void require_same_group(const GroupPtr& a, const GroupPtr& b, const char* what) {
  if (a.get() == b.get()) return;
  if (a && b && a->order == b->order && a->table == b->table) return;
  throw GroupMismatch(std::string(what) + ": operands live on different groups");
}

inline void trim(IntMeasure& m) {
  size_t lo = 0, hi = m.coeffs.size();
  while (lo < hi && m.coeffs[lo] == cplx{}) ++lo;
  while (hi > lo && m.coeffs[hi - 1] == cplx{}) --hi;
  if (lo == hi) {
    m.coeffs.clear();
    m.base = 0;
    return;
  }
  if (lo > 0) m.coeffs.erase(m.coeffs.begin(), m.coeffs.begin() + lo);
  m.coeffs.resize(hi - lo);
  m.base += static_cast<long long>(lo);
}

}  // namespace detail

// ---- constructors ----------------------------------------------------------

inline FiniteMeasure dirac(const GroupPtr& g, int x) {
  detail::check_element(*g, x);
  FiniteMeasure m{g, std::vector<cplx>(g->order, cplx{})};
  m.coeffs[x] = 1.0;
  return m;
}

inline FiniteMeasure haar_on_subgroup(const Subgroup& h) {
  FiniteMeasure m{h.parent, std::vector<cplx>(h.parent->order, cplx{})};
  const double w = 1.0 / static_cast<double>(h.elements.size());
  for (int x : h.elements) m.coeffs[x] = w;
  return m;
}

inline FiniteMeasure haar(const GroupPtr& g) {
  return FiniteMeasure{g, std::vector<cplx>(g->order, cplx{1.0 / g->order, 0.0})};
}

inline FiniteMeasure uniform_on_set(const GroupPtr& g, const std::vector<int>& s) {
  if (s.empty()) throw EmptySupport("uniform_on_set: empty set");
  std::set<int> uniq(s.begin(), s.end());
  FiniteMeasure m{g, std::vector<cplx>(g->order, cplx{})};
  const double w = 1.0 / static_cast<double>(uniq.size());
  for (int x : uniq) {
    detail::check_element(*g, x);
    m.coeffs[x] = w;
  }
  return m;
}

inline FiniteMeasure from_weights(const GroupPtr& g, std::vector<cplx> w) {
  if (static_cast<int>(w.size()) != g->order)
    throw IndexOutOfRange("from_weights: coefficient count does not match group order");
  return FiniteMeasure{g, std::move(w)};
}

inline IntMeasure z_dirac(long long k) { return IntMeasure{k, {cplx{1.0, 0.0}}}; }

inline IntMeasure z_measure(const std::map<long long, cplx>& items) {
  IntMeasure m;
  if (items.empty()) return m;
  m.base = items.begin()->first;
  m.coeffs.assign(static_cast<size_t>(items.rbegin()->first - m.base + 1), cplx{});
  for (const auto& [k, c] : items) m.coeffs[static_cast<size_t>(k - m.base)] = c;
  detail::trim(m);
  return m;
}

// ---- linear structure ------------------------------------------------------

inline FiniteMeasure operator*(cplx a, const FiniteMeasure& m) {
  FiniteMeasure r = m;
  for (auto& c : r.coeffs) c *= a;
  return r;
}

inline FiniteMeasure operator+(const FiniteMeasure& a, const FiniteMeasure& b) {
  detail::require_same_group(a.group, b.group, "operator+");
  FiniteMeasure r = a;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
  return r;
}

inline FiniteMeasure operator-(const FiniteMeasure& a, const FiniteMeasure& b) {
  detail::require_same_group(a.group, b.group, "operator-");
  FiniteMeasure r = a;
  for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
  return r;
}

/// acc += a * x
inline void axpy(FiniteMeasure& acc, cplx a, const FiniteMeasure& x) {
  detail::require_same_group(acc.group, x.group, "axpy");
  for (size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += a * x.coeffs[i];
}

inline IntMeasure operator*(cplx a, const IntMeasure& m) {
  IntMeasure r = m;
  for (auto& c : r.coeffs) c *= a;
  detail::trim(r);
  return r;
}

inline void axpy(IntMeasure& acc, cplx a, const IntMeasure& x) {
  if (x.zero() || a == cplx{}) return;
  if (acc.zero()) {
    acc = x;
    for (auto& c : acc.coeffs) c *= a;
    return;
  }
  long long lo = std::min(acc.lo(), x.lo());
  long long hi = std::max(acc.hi(), x.hi());
  std::vector<cplx> merged(static_cast<size_t>(hi - lo + 1), cplx{});
  for (long long k = acc.lo(); k <= acc.hi(); ++k) merged[static_cast<size_t>(k - lo)] = acc.at(k);
  for (long long k = x.lo(); k <= x.hi(); ++k) merged[static_cast<size_t>(k - lo)] += a * x.at(k);
  acc.base = lo;
  acc.coeffs = std::move(merged);
}

inline IntMeasure operator+(const IntMeasure& a, const IntMeasure& b) {
  IntMeasure r = a;
  axpy(r, 1.0, b);
  return r;
}

inline IntMeasure operator-(const IntMeasure& a, const IntMeasure& b) {
  IntMeasure r = a;
  axpy(r, -1.0, b);
  return r;
}

// ---- convolution algebra ---------------------------------------------------

inline FiniteMeasure convolve(const FiniteMeasure& a, const FiniteMeasure& b) {
  detail::require_same_group(a.group, b.group, "convolve");
  const FiniteGroup& g = *a.group;
  FiniteMeasure r{a.group, std::vector<cplx>(g.order, cplx{})};
  for (int x = 0; x < g.order; ++x) {
    const cplx ax = a.coeffs[x];
    if (ax == cplx{}) continue;
    const int* row = g.table.data() + static_cast<size_t>(x) * g.order;
    for (int y = 0; y < g.order; ++y) r.coeffs[row[y]] += ax * b.coeffs[y];
  }
  return r;
}

inline IntMeasure convolve(const IntMeasure& a, const IntMeasure& b, long long support_cap = kZSupportCap) {
  if (a.zero() || b.zero()) return IntMeasure{};
  const long long len = static_cast<long long>(a.coeffs.size()) + static_cast<long long>(b.coeffs.size()) - 1;
  if (len > support_cap)
    throw SupportOverflow("convolve: window of " + std::to_string(len) + " points exceeds cap");
  IntMeasure r;
  r.base = a.base + b.base;
  r.coeffs.assign(static_cast<size_t>(len), cplx{});
  for (size_t i = 0; i < a.coeffs.size(); ++i) {
    const cplx ai = a.coeffs[i];
    if (ai == cplx{}) continue;
    for (size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += ai * b.coeffs[j];
  }
  detail::trim(r);
  return r;
}

inline FiniteMeasure identity_measure(const FiniteMeasure& like) { return dirac(like.group, like.group->identity); }
inline IntMeasure identity_measure(const IntMeasure&) { return z_dirac(0); }

inline FiniteMeasure zero_measure(const FiniteMeasure& like) {
  return FiniteMeasure{like.group, std::vector<cplx>(like.group->order, cplx{})};
}
inline IntMeasure zero_measure(const IntMeasure&) { return IntMeasure{}; }

/// n-fold convolution power by repeated squaring; power(mu, 0) is the Dirac
/// measure at the identity (delta_0 on Z).
template <class M>
inline M power(const M& mu, long long n) {
  if (n < 0) throw IndexOutOfRange("power: negative exponent");
  M result = identity_measure(mu);
  M base = mu;
  while (n > 0) {
    if (n & 1) result = convolve(result, base);
    n >>= 1;
    if (n) base = convolve(base, base);
  }
  return result;
}

/// Incremental power stream mu^0, mu^1, ...; the cache trajectories reuse.
template <class M>
struct PowerCache {
  M mu;
  M current;
  long long n = 0;

  explicit PowerCache(M m) : mu(std::move(m)), current(identity_measure(mu)) {}
  const M& value() const { return current; }
  const M& next() {
    current = convolve(current, mu);
    ++n;
    return current;
  }
};

inline FiniteMeasure involution(const FiniteMeasure& m) {
  const FiniteGroup& g = *m.group;
  FiniteMeasure r{m.group, std::vector<cplx>(g.order)};
  for (int x = 0; x < g.order; ++x) r.coeffs[x] = std::conj(m.coeffs[g.inv(x)]);
  return r;
}

inline IntMeasure involution(const IntMeasure& m) {
  IntMeasure r;
  if (m.zero()) return r;
  r.base = -m.hi();
  r.coeffs.resize(m.coeffs.size());
  for (size_t i = 0; i < m.coeffs.size(); ++i) r.coeffs[i] = std::conj(m.coeffs[m.coeffs.size() - 1 - i]);
  return r;
}

// ---- norms, supports, distances -------------------------------------------

inline double tv_norm(const FiniteMeasure& m) {
  double s = 0;
  for (const cplx& c : m.coeffs) s += std::abs(c);
  return s;
}

inline double tv_norm(const IntMeasure& m) {
  double s = 0;
  for (const cplx& c : m.coeffs) s += std::abs(c);
  return s;
}

inline double sup_norm(const FiniteMeasure& m) {
  double s = 0;
  for (const cplx& c : m.coeffs) s = std::max(s, std::abs(c));
  return s;
}

inline double sup_norm(const IntMeasure& m) {
  double s = 0;
  for (const cplx& c : m.coeffs) s = std::max(s, std::abs(c));
  return s;
}

inline double l2_norm(const IntMeasure& m) {
  double s = 0;
  for (const cplx& c : m.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

inline double sup_distance(const FiniteMeasure& a, const FiniteMeasure& b) {
  detail::require_same_group(a.group, b.group, "sup_distance");
  double s = 0;
  for (size_t i = 0; i < a.coeffs.size(); ++i) s = std::max(s, std::abs(a.coeffs[i] - b.coeffs[i]));
  return s;
}

inline double sup_distance(const IntMeasure& a, const IntMeasure& b) {
  double s = 0;
  long long lo = std::min(a.zero() ? 0 : a.lo(), b.zero() ? 0 : b.lo());
  long long hi = std::max(a.zero() ? 0 : a.hi(), b.zero() ? 0 : b.hi());
  for (long long k = lo; k <= hi; ++k) s = std::max(s, std::abs(a.at(k) - b.at(k)));
  return s;
}

inline double tv_distance(const FiniteMeasure& a, const FiniteMeasure& b) { return tv_norm(a - b); }
inline double tv_distance(const IntMeasure& a, const IntMeasure& b) { return tv_norm(a - b); }

inline std::vector<int> support(const FiniteMeasure& m, double tol = kSupportTol) {
  std::vector<int> s;
  for (int x = 0; x < m.group->order; ++x)
    if (std::abs(m.coeffs[x]) > tol) s.push_back(x);
  return s;
}

inline std::vector<long long> support(const IntMeasure& m, double tol = kSupportTol) {
  std::vector<long long> s;
  for (long long k = m.zero() ? 1 : m.lo(); k <= (m.zero() ? 0 : m.hi()); ++k)
    if (std::abs(m.at(k)) > tol) s.push_back(k);
  return s;
}

inline double window_sup(const IntMeasure& m, long long lo, long long hi) {
  double s = 0;
  for (long long k = lo; k <= hi; ++k) s = std::max(s, std::abs(m.at(k)));
  return s;
}

inline bool is_probability(const FiniteMeasure& m, double tol = kProbabilityTol) {
  double sum = 0;
  for (const cplx& c : m.coeffs) {
    if (std::abs(c.imag()) > tol || c.real() < -tol) return false;
    sum += c.real();
  }
  return std::abs(sum - 1.0) <= tol;
}

inline bool is_probability(const IntMeasure& m, double tol = kProbabilityTol) {
  double sum = 0;
  for (const cplx& c : m.coeffs) {
    if (std::abs(c.imag()) > tol || c.real() < -tol) return false;
    sum += c.real();
  }
  return std::abs(sum - 1.0) <= tol;
}

// ---- action on functions ---------------------------------------------------

inline GroupFunction indicator(const GroupPtr& g, int x) {
  detail::check_element(*g, x);
  GroupFunction f{g, std::vector<cplx>(g->order, cplx{})};
  f.values[x] = 1.0;
  return f;
}

inline GroupFunction constant_function(const GroupPtr& g, cplx v = 1.0) {
  return GroupFunction{g, std::vector<cplx>(g->order, v)};
}

/// Left translate f_g(s) = f(g^{-1} s).
inline GroupFunction translate(const GroupFunction& f, int g) {
  const FiniteGroup& G = *f.group;
  detail::check_element(G, g);
  GroupFunction r{f.group, std::vector<cplx>(G.order)};
  const int ginv = G.inv(g);
  for (int s = 0; s < G.order; ++s) r.values[s] = f.values[G.op(ginv, s)];
  return r;
}

/// (mu * f)(g) = sum_h mu(h) f(h^{-1} g).
inline GroupFunction act_on_function(const FiniteMeasure& mu, const GroupFunction& f) {
  detail::require_same_group(mu.group, f.group, "act_on_function");
  const FiniteGroup& G = *mu.group;
  GroupFunction r{f.group, std::vector<cplx>(G.order, cplx{})};
  for (int h = 0; h < G.order; ++h) {
    const cplx w = mu.coeffs[h];
    if (w == cplx{}) continue;
    const int hinv = G.inv(h);
    for (int g = 0; g < G.order; ++g) r.values[g] += w * f.values[G.op(hinv, g)];
  }
  return r;
}

/// Bilinear pairing <mu, f> = sum_g f(g) mu(g).
inline cplx pairing(const FiniteMeasure& mu, const GroupFunction& f) {
  detail::require_same_group(mu.group, f.group, "pairing");
  cplx s{};
  for (int g = 0; g < mu.group->order; ++g) s += f.values[g] * mu.coeffs[g];
  return s;
}

/// Hilbert-space inner product <u, v> = sum_g u(g) conj(v(g)).
inline cplx l2_inner(const GroupFunction& u, const GroupFunction& v) {
  detail::require_same_group(u.group, v.group, "l2_inner");
  cplx s{};
  for (size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * std::conj(v.values[i]);
  return s;
}

inline cplx l2_inner(const ZFunction& u, const ZFunction& v) {
  if (u.zero() || v.zero()) return cplx{};
  cplx s{};
  long long lo = std::max(u.lo(), v.lo()), hi = std::min(u.hi(), v.hi());
  for (long long k = lo; k <= hi; ++k) s += u.at(k) * std::conj(v.at(k));
  return s;
}

inline double function_norm(const GroupFunction& f, double p) {
  if (p == std::numeric_limits<double>::infinity()) {
    double s = 0;
    for (const cplx& v : f.values) s = std::max(s, std::abs(v));
    return s;
  }
  double s = 0;
  for (const cplx& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

// ---- classification --------------------------------------------------------

/// Measure-class flags. Fields for the group case and the Z case are both
/// present; only the ones matching the measure kind are populated.
struct MeasureClass {
  bool probability = false;
  bool adapted = false;
  bool strictly_aperiodic = false;
  bool idempotent = false;
  bool power_bounded = false;
  std::string power_bounded_certificate;

  std::vector<int> support;
  std::optional<Subgroup> generated;
  std::optional<Subgroup> difference_generated;
  std::optional<CosetWitness> coset_witness;

  std::vector<long long> z_support;
  std::optional<ZSubgroup> z_generated;
  std::optional<ZSubgroup> z_difference_generated;
};

/// Z-measure classification. Strict aperiodicity is gcd-of-differences = 1;
/// singleton supports sit in a coset of {0} and are never strictly aperiodic.
inline MeasureClass classify(const IntMeasure& mu, double support_tol = kSupportTol) {
  MeasureClass c;
  c.z_support = support(mu, support_tol);
  if (c.z_support.empty()) throw EmptySupport("classify: measure has empty support");
  c.probability = is_probability(mu);
  c.z_generated = z_subgroup(c.z_support);
  c.adapted = (c.z_generated->d == 1);
  std::vector<long long> diffs;
  for (long long x : c.z_support) diffs.push_back(x - c.z_support.front());
  c.z_difference_generated = z_subgroup(diffs);
  c.strictly_aperiodic = (c.z_difference_generated->d == 1);
  if (c.strictly_aperiodic && !c.adapted)
    throw OracleDisagreement("strictly aperiodic measure classified as not adapted");
  c.idempotent = tv_distance(convolve(mu, mu), mu) <= kIdempotentTol;
  if (c.probability) {
    c.power_bounded = true;
    c.power_bounded_certificate = "tv_norm^n = 1";
  } else if (tv_norm(mu) <= 1.0 + kProbabilityTol) {
    c.power_bounded = true;
    c.power_bounded_certificate = "contraction: tv_norm <= 1";
  } else {
    c.power_bounded = false;
    c.power_bounded_certificate = "tv_norm > 1; no finite-dimensional criterion on Z";
  }
  return c;
}

// classify(FiniteMeasure) lives in spectral.hpp: the power-boundedness clause
// needs the operator criterion.

}  // namespace ergolab
