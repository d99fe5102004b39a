#pragma once

#include "ergolab/measure.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ergolab {

// Operator convention, fixed project-wide: lambda(mu) acts on functions by
// (mu * f)(g) = sum_h mu(h) f(h^{-1} g), realized as the matrix
// M[g, s] = mu(g s^{-1}). Consequences that everything below relies on:
//   - a character chi is an eigenvector with eigenvalue mu_hat(conj(chi));
//   - the Cesaro averages of (xi M)^i converge to the spectral projection at
//     eigenvalue conj(xi), i.e. onto ker(M - conj(xi) I) along its range.
// One sign slip here silently breaks every weighted decomposition check, so
// the tests pin concrete instances of both consequences.

struct SpectralOptions {
  double tol_unit = 1e-8;       // |lambda| >= 1 - tol_unit counts as unitary
  double cluster_radius = 1e-6; // grouping unitary eigenvalues into points
  double rank_rel_tol = 1e-8;   // kernel threshold, relative to sigma_max
  double radius_tol = 1e-6;     // spectral radius <= 1 + radius_tol
  int dense_cap = 1024;         // dense eigensolver order cap
};

struct RegularMatrix {
  GroupPtr group;
  Eigen::MatrixXcd mat;
};

inline RegularMatrix regular_matrix(const FiniteMeasure& mu) {
  const FiniteGroup& g = *mu.group;
  Eigen::MatrixXcd m(g.order, g.order);
  for (int row = 0; row < g.order; ++row)
    for (int col = 0; col < g.order; ++col) m(row, col) = mu.coeffs[g.op(row, g.inv(col))];
  return RegularMatrix{mu.group, std::move(m)};
}

/// Reads a measure back off an operator in the regular representation: the
/// identity column is theta(g) = M[g, e].
inline FiniteMeasure measure_from_operator(const GroupPtr& g, const Eigen::MatrixXcd& m) {
  FiniteMeasure r{g, std::vector<cplx>(g->order)};
  for (int x = 0; x < g->order; ++x) r.coeffs[x] = m(x, g->identity);
  return r;
}

namespace detail {

inline double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

struct SvdSplit {
  Eigen::MatrixXcd kernel;  // orthonormal basis of ker(a)
  Eigen::MatrixXcd range;   // orthonormal basis of ran(a)
  int rank = 0;
};

inline SvdSplit svd_split(const Eigen::MatrixXcd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double tau = rel_tol * std::max(1.0, smax);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tau) ++rank;
  SvdSplit out;
  out.rank = rank;
  out.kernel = svd.matrixV().rightCols(a.cols() - rank);
  out.range = svd.matrixU().leftCols(rank);
  return out;
}

inline int numeric_rank(const Eigen::MatrixXcd& a, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  const double tau = rel_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tau) ++rank;
  return rank;
}

/// Largest principal angle between equal-dimension column spaces, via the
/// projection residual sin(theta) = ||(I - Q1 Q1^H) Q2||.
inline double subspace_gap(const Eigen::MatrixXcd& q1, const Eigen::MatrixXcd& q2) {
  if (q1.cols() == 0 && q2.cols() == 0) return 0.0;
  if (q1.cols() != q2.cols()) return 1.0;
  Eigen::MatrixXcd resid = q2 - q1 * (q1.adjoint() * q2);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(resid);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace detail

struct UnitaryEigenvalue {
  cplx value;
  int algebraic_multiplicity = 0;
  int geometric_multiplicity = 0;
  bool semisimple = false;
  Eigen::MatrixXcd eigenvectors;  // orthonormal basis of ker(M - value I)
};

struct SpectralReport {
  std::vector<cplx> eigenvalues;  // all N, sorted by (re, im)
  double spectral_radius = 0;
  std::vector<UnitaryEigenvalue> unitary;
  double tol_unit = 0;

  bool unitary_subset_of_one(double tol = 1e-6) const {
    for (const auto& u : unitary)
      if (std::abs(u.value - cplx{1.0, 0.0}) > tol) return false;
    return true;
  }
};

inline SpectralReport spectrum(const FiniteMeasure& mu, const SpectralOptions& opt = {}) {
  const int n = mu.group->order;
  if (n > opt.dense_cap) throw SizeLimit("spectrum: order exceeds dense eigensolver cap");
  RegularMatrix reg = regular_matrix(mu);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(reg.mat, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw EigensolverFailure("complex eigensolver did not converge");

  SpectralReport rep;
  rep.tol_unit = opt.tol_unit;
  rep.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const cplx& e : rep.eigenvalues) rep.spectral_radius = std::max(rep.spectral_radius, std::abs(e));

  // Cluster near-unit-modulus eigenvalues into distinct spectral points.
  std::vector<cplx> candidates;
  for (const cplx& e : rep.eigenvalues)
    if (std::abs(e) >= 1.0 - opt.tol_unit) candidates.push_back(e);
  std::vector<std::vector<cplx>> clusters;
  for (const cplx& e : candidates) {
    bool placed = false;
    for (auto& cl : clusters)
      if (std::abs(e - cl.front()) <= opt.cluster_radius) {
        cl.push_back(e);
        placed = true;
        break;
      }
    if (!placed) clusters.push_back({e});
  }
  for (const auto& cl : clusters) {
    UnitaryEigenvalue u;
    cplx mean{};
    for (const cplx& e : cl) mean += e;
    u.value = mean / static_cast<double>(cl.size());
    u.algebraic_multiplicity = static_cast<int>(cl.size());
    Eigen::MatrixXcd shifted = reg.mat - u.value * Eigen::MatrixXcd::Identity(n, n);
    detail::SvdSplit split = detail::svd_split(shifted, opt.rank_rel_tol);
    u.geometric_multiplicity = n - split.rank;
    u.eigenvectors = split.kernel;
    int rank2 = detail::numeric_rank(shifted * shifted, opt.rank_rel_tol);
    u.semisimple = (split.rank == rank2);
    rep.unitary.push_back(std::move(u));
  }
  std::sort(rep.unitary.begin(), rep.unitary.end(), [](const UnitaryEigenvalue& a, const UnitaryEigenvalue& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return rep;
}

/// Kernel identification: the numerically computed ker(M - xi I) must equal
/// the solution space of the translation equations f(g^{-1} s) = xi f(s) over
/// g in supp mu. True iff the two subspaces agree to principal angle < 1e-7.
inline bool unitary_eigenspace_check(const FiniteMeasure& mu, cplx xi, const SpectralOptions& opt = {}) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-9) throw IndexOutOfRange("unitary_eigenspace_check: |xi| must be 1");
  const FiniteGroup& g = *mu.group;
  const int n = g.order;
  RegularMatrix reg = regular_matrix(mu);
  Eigen::MatrixXcd shifted = reg.mat - xi * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd q1 = detail::svd_split(shifted, opt.rank_rel_tol).kernel;

  std::vector<int> supp = support(mu);
  Eigen::MatrixXcd stacked(static_cast<Eigen::Index>(supp.size()) * n, n);
  stacked.setZero();
  for (size_t si = 0; si < supp.size(); ++si) {
    const int ginv = g.inv(supp[si]);
    for (int s = 0; s < n; ++s) {
      stacked(static_cast<Eigen::Index>(si) * n + s, g.op(ginv, s)) += 1.0;  // f(g^{-1} s)
      stacked(static_cast<Eigen::Index>(si) * n + s, s) -= xi;              // - xi f(s)
    }
  }
  Eigen::MatrixXcd q2 = detail::svd_split(stacked, opt.rank_rel_tol).kernel;

  if (q1.cols() != q2.cols()) return false;
  return detail::subspace_gap(q1, q2) < 1e-7 && detail::subspace_gap(q2, q1) < 1e-7;
}

struct PowerBoundedness {
  bool bounded = false;
  std::string certificate;
  double spectral_radius = 0;
  double empirical_sup_tv = 0;  // sup ||mu^n||_1 over n <= 64, sanity trace
};

/// Finite-dimensional criterion: power bounded iff the spectral radius is
/// <= 1 (within tolerance) and every unitary eigenvalue is semisimple.
inline PowerBoundedness power_boundedness(const FiniteMeasure& mu, const SpectralOptions& opt = {}) {
  PowerBoundedness pb;
  SpectralReport rep = spectrum(mu, opt);
  pb.spectral_radius = rep.spectral_radius;
  PowerCache<FiniteMeasure> cache(mu);
  for (int i = 1; i <= 64; ++i) pb.empirical_sup_tv = std::max(pb.empirical_sup_tv, tv_norm(cache.next()));
  if (rep.spectral_radius > 1.0 + opt.radius_tol) {
    pb.bounded = false;
    pb.certificate = "spectral radius " + std::to_string(rep.spectral_radius) + " exceeds 1";
    return pb;
  }
  for (const auto& u : rep.unitary)
    if (!u.semisimple) {
      pb.bounded = false;
      pb.certificate = "defective unitary eigenvalue at (" + std::to_string(u.value.real()) + ", " +
                       std::to_string(u.value.imag()) + ")";
      return pb;
    }
  pb.bounded = true;
  pb.certificate = "spectral radius <= 1 and unitary eigenvalues semisimple";
  return pb;
}

struct EigenprojData {
  cplx xi;
  Eigen::MatrixXcd projection;
};

namespace detail {

/// Spectral projection onto ker(M - lambda I) along ran(M - lambda I); the
/// eigenvalue must be semisimple for the splitting to be invertible.
inline Eigen::MatrixXcd algebraic_projection(const Eigen::MatrixXcd& m, cplx lambda, double rank_rel_tol) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd shifted = m - lambda * Eigen::MatrixXcd::Identity(n, n);
  SvdSplit split = svd_split(shifted, rank_rel_tol);
  const int k = n - split.rank;
  if (k == 0) return Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd basis(n, n);
  basis.leftCols(k) = split.kernel;
  basis.rightCols(split.rank) = split.range;
  Eigen::MatrixXcd selector = Eigen::MatrixXcd::Zero(n, n);
  selector.topLeftCorner(k, k).setIdentity();
  return basis * selector * basis.inverse();
}

/// Cesaro averages (1/n) sum_{i<=n} a^i at n = 2^k via the doubling
/// recurrence S_{2n} = S_n + a^n S_n; stagnation-checked.
inline Eigen::MatrixXcd cesaro_projection(const Eigen::MatrixXcd& a, double stop_delta, int max_doublings,
                                          double* final_delta = nullptr) {
  Eigen::MatrixXcd s = a;        // S_1
  Eigen::MatrixXcd apow = a;     // a^n
  Eigen::MatrixXcd prev = s;     // P_1
  double n = 1.0;
  double delta = std::numeric_limits<double>::infinity();
  for (int k = 0; k < max_doublings; ++k) {
    s = s + apow * s;
    apow = apow * apow;
    n *= 2.0;
    Eigen::MatrixXcd p = s / n;
    delta = max_abs(p - prev);
    prev = p;
    if (delta <= stop_delta) break;
  }
  if (final_delta) *final_delta = delta;
  return prev;
}

}  // namespace detail

/// The mean ergodic projection of xi * lambda(mu): computed algebraically as
/// the spectral projection at eigenvalue conj(xi), and independently by
/// Cesaro accumulation; the two routes must agree to 1e-7.
inline EigenprojData ergodic_projection(const FiniteMeasure& mu, cplx xi, const SpectralOptions& opt = {}) {
  double r = std::abs(xi);
  if (std::abs(r - 1.0) > 1e-9) throw IndexOutOfRange("ergodic_projection: |xi| must be 1");
  xi /= r;
  if (tv_norm(mu) > 1.0 + 1e-9) {
    PowerBoundedness pb = power_boundedness(mu, opt);
    if (!pb.bounded) throw NotPowerBounded("ergodic_projection: " + pb.certificate);
  }
  RegularMatrix reg = regular_matrix(mu);
  Eigen::MatrixXcd alg = detail::algebraic_projection(reg.mat, std::conj(xi), opt.rank_rel_tol);

  double delta = 0;
  Eigen::MatrixXcd iter = detail::cesaro_projection(xi * reg.mat, 1e-10, 44, &delta);
  if (delta > 1e-6)
    throw CesaroNotConverged("ergodic_projection: Cesaro residual " + std::to_string(delta));
  double gap = detail::max_abs(alg - iter);
  if (gap > 1e-7)
    throw OracleDisagreement("ergodic_projection: algebraic vs Cesaro gap " + std::to_string(gap));
  return EigenprojData{xi, std::move(alg)};
}

struct KtReport {
  std::vector<long long> checkpoints;
  std::vector<double> d;  // ||mu^{n+1} - mu^n||_1 at each checkpoint
  bool spectral_predicate = false;
  bool d_small = false;
  bool agree = false;
  double tol = 0;
};

/// Difference decay versus the unitary-spectrum predicate: for power-bounded
/// mu, d_n -> 0 iff the unitary spectrum sits inside {1}. Finite matrices
/// decay geometrically when the predicate holds, so n_max = 256 suffices.
inline KtReport kt_report(const FiniteMeasure& mu, long long n_max = 256, double tol = 1e-9,
                          const SpectralOptions& opt = {}) {
  if (!is_probability(mu)) {
    PowerBoundedness pb = power_boundedness(mu, opt);
    if (!pb.bounded) throw NotPowerBounded("kt_report: " + pb.certificate);
  }
  KtReport rep;
  rep.tol = tol;
  for (long long n = 1; n < n_max; n *= 2) rep.checkpoints.push_back(n);
  rep.checkpoints.push_back(n_max);

  PowerCache<FiniteMeasure> cache(mu);
  FiniteMeasure cur = cache.next();  // mu^1
  size_t ci = 0;
  for (long long n = 1; n <= n_max && ci < rep.checkpoints.size(); ++n) {
    FiniteMeasure nxt = cache.next();
    if (n == rep.checkpoints[ci]) {
      rep.d.push_back(tv_distance(nxt, cur));
      ++ci;
    }
    cur = std::move(nxt);
  }
  SpectralReport sp = spectrum(mu, opt);
  rep.spectral_predicate = sp.unitary_subset_of_one();
  rep.d_small = rep.d.back() <= tol;
  rep.agree = (rep.d_small == rep.spectral_predicate);
  return rep;
}

// ---- finite abelian duality --------------------------------------------------

namespace detail {

inline std::vector<int> mixed_radix_digits(const std::vector<int>& factors, int index) {
  std::vector<int> digits(factors.size());
  for (size_t j = factors.size(); j-- > 0;) {
    digits[j] = index % factors[j];
    index /= factors[j];
  }
  return digits;
}

inline long long factors_lcm(const std::vector<int>& factors) {
  long long l = 1;
  for (int f : factors) l = std::lcm(l, static_cast<long long>(f));
  return l;
}

/// Character phase as an exact residue: chi_k(g) = e^{2 pi i p / L} with
/// p = sum_j k_j g_j (L / n_j) mod L.
inline long long character_phase_num(const std::vector<int>& factors, long long lcm, int k, int g) {
  std::vector<int> kd = mixed_radix_digits(factors, k);
  std::vector<int> gd = mixed_radix_digits(factors, g);
  long long p = 0;
  for (size_t j = 0; j < factors.size(); ++j)
    p = (p + static_cast<long long>(kd[j]) * gd[j] % lcm * (lcm / factors[j])) % lcm;
  return p;
}

}  // namespace detail

inline cplx character_value(const FiniteGroup& g, int k, int x) {
  if (g.cyclic_factors.empty()) throw NotAbelian("character_value: group lacks cyclic factors");
  long long l = detail::factors_lcm(g.cyclic_factors);
  long long p = detail::character_phase_num(g.cyclic_factors, l, k, x);
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(l));
}

inline GroupFunction character_function(const GroupPtr& g, int k) {
  GroupFunction f{g, std::vector<cplx>(g->order)};
  for (int x = 0; x < g->order; ++x) f.values[x] = character_value(*g, k, x);
  return f;
}

/// Fourier data over a finite abelian group given as a product of cyclic
/// factors. Characters are indexed 0..N-1 in the same mixed-radix scheme as
/// the elements. F is the transform-equals-one set, E the unit-modulus set.
struct DualTable {
  GroupPtr group;
  std::vector<int> factors;
  std::vector<cplx> transform;  // mu_hat(chi_k)
  std::vector<int> f_set;
  std::vector<int> e_set;
  double tol = 0;
};

inline DualTable dual_table(const FiniteMeasure& mu, double tol = 1e-9) {
  const FiniteGroup& g = *mu.group;
  if (g.cyclic_factors.empty())
    throw NotAbelian("dual_table: group is not given as a product of cyclic factors");
  DualTable dt;
  dt.group = mu.group;
  dt.factors = g.cyclic_factors;
  dt.tol = tol;
  dt.transform.resize(g.order);
  for (int k = 0; k < g.order; ++k) {
    cplx s{};
    for (int x = 0; x < g.order; ++x) s += mu.coeffs[x] * character_value(g, k, x);
    dt.transform[k] = s;
    if (std::abs(s - cplx{1.0, 0.0}) <= tol) dt.f_set.push_back(k);
    if (std::abs(std::abs(s) - 1.0) <= tol) dt.e_set.push_back(k);
  }
  return dt;
}

/// Annihilator H^perp = {chi : chi(h) = 1 for all h in H}, decided exactly in
/// integer phase arithmetic.
inline std::vector<int> annihilator(const Subgroup& h) {
  const FiniteGroup& g = *h.parent;
  if (g.cyclic_factors.empty()) throw NotAbelian("annihilator: group lacks cyclic factors");
  long long l = detail::factors_lcm(g.cyclic_factors);
  std::vector<int> out;
  for (int k = 0; k < g.order; ++k) {
    bool all_one = true;
    for (int x : h.elements)
      if (detail::character_phase_num(g.cyclic_factors, l, k, x) != 0) {
        all_one = false;
        break;
      }
    if (all_one) out.push_back(k);
  }
  return out;
}

// ---- classification (operator-backed clause) ---------------------------------

/// Full measure classification. Strict aperiodicity is computed two ways on
/// groups small enough for the oracle: the difference-subgroup criterion and
/// the brute-force coset witness; any mismatch is a hard error.
inline MeasureClass classify(const FiniteMeasure& mu, double support_tol = kSupportTol) {
  MeasureClass c;
  c.support = support(mu, support_tol);
  if (c.support.empty()) throw EmptySupport("classify: measure has empty support");
  c.probability = is_probability(mu);
  c.generated = generated_subgroup(mu.group, c.support);
  c.adapted = c.generated->whole_group();
  c.difference_generated = difference_subgroup(mu.group, c.support);
  const bool fast_sa = c.difference_generated->whole_group();
  if (mu.group->order <= kSubgroupEnumCap) {
    std::optional<CosetWitness> witness = coset_containment_witness(mu.group, c.support);
    const bool oracle_sa = !witness.has_value();
    if (oracle_sa != fast_sa)
      throw OracleDisagreement("strict aperiodicity: difference-subgroup and coset-witness criteria disagree");
    c.coset_witness = std::move(witness);
  }
  c.strictly_aperiodic = fast_sa;
  if (c.strictly_aperiodic && !c.adapted)
    throw OracleDisagreement("strictly aperiodic measure classified as not adapted");
  c.idempotent = tv_distance(convolve(mu, mu), mu) <= kIdempotentTol;
  if (c.probability) {
    c.power_bounded = true;
    c.power_bounded_certificate = "tv_norm^n = 1";
  } else {
    PowerBoundedness pb = power_boundedness(mu);
    c.power_bounded = pb.bounded;
    c.power_bounded_certificate = pb.certificate;
  }
  return c;
}

}  // namespace ergolab
