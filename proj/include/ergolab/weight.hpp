#pragma once

#include "ergolab/common.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <variant>
#include <vector>

namespace ergolab {

// Weight families {a_n}, n >= 1, with Cesaro circle limits
// a(xi) = lim (1/n) sum_{i<=n} a_i xi^i. The four built-in kinds have closed
// forms for every unit-modulus xi; custom tables only ever get numerical
// estimates with a residual.

struct ConstantWeight { cplx c{1.0, 0.0}; };
struct CharacterWeight { cplx xi0{1.0, 0.0}; };        // a_n = xi0^n, |xi0| = 1
struct PeriodicWeight { std::vector<cplx> values; };   // a_n = values[(n-1) mod p]
struct RotationWeight {
  // a_n = sum_k coeffs[k] e^{2 pi i k (omega + n theta)}; theta is a
  // double-precision stand-in for an irrational angle. The circle limits come
  // from the explicit character decomposition, which is valid for any theta;
  // no rational/irrational distinction is attempted at machine precision.
  double theta = 0;
  double omega = 0;
  std::map<int, cplx> coeffs;
};
struct CustomWeight {
  std::vector<cplx> table;  // a_1 .. a_len
  double bound = 0;
};

struct WeightSequence {
  std::variant<ConstantWeight, CharacterWeight, PeriodicWeight, RotationWeight, CustomWeight> kind;
  double bound = 0;  // sup |a_n|
};

struct WeightLimit {
  cplx xi;
  cplx value{};
  enum class Mode { exact, numerical } mode = Mode::exact;
  double residual = 0;      // numerical mode only
  std::string derivation;   // exact mode: closed-form tag
};

// ---- constructors ----------------------------------------------------------

inline WeightSequence constant_weight(cplx c) { return WeightSequence{ConstantWeight{c}, std::abs(c)}; }

inline WeightSequence character_weight(cplx xi0) {
  double r = std::abs(xi0);
  if (std::abs(r - 1.0) > 1e-9) throw ConfigError("character weight needs |xi0| = 1");
  return WeightSequence{CharacterWeight{xi0 / r}, 1.0};
}

/// a_n = e^{2 pi i turns n}; turns = 1/2 gives the alternating weight.
inline WeightSequence character_weight_turns(double turns) {
  return character_weight(std::polar(1.0, 2.0 * std::numbers::pi * turns));
}

inline WeightSequence periodic_weight(std::vector<cplx> values) {
  if (values.empty()) throw ConfigError("periodic weight needs at least one value");
  double b = 0;
  for (const cplx& v : values) b = std::max(b, std::abs(v));
  return WeightSequence{PeriodicWeight{std::move(values)}, b};
}

inline WeightSequence rotation_weight(double theta, double omega, std::map<int, cplx> coeffs) {
  double b = 0;
  for (const auto& [k, c] : coeffs) {
    (void)k;
    b += std::abs(c);
  }
  return WeightSequence{RotationWeight{theta, omega, std::move(coeffs)}, b};
}

inline WeightSequence custom_weight(std::vector<cplx> table, double declared_bound) {
  double actual = 0;
  for (const cplx& v : table) actual = std::max(actual, std::abs(v));
  if (declared_bound + 1e-12 < actual) throw ConfigError("custom weight: declared bound below table sup");
  return WeightSequence{CustomWeight{std::move(table), declared_bound}, declared_bound};
}

// ---- pointwise evaluation ---------------------------------------------------

namespace detail {

// z^n for unit-modulus z by repeated squaring; phase error stays O(log n) ulps.
inline cplx unit_pow(cplx z, long long n) {
  cplx r{1.0, 0.0};
  while (n > 0) {
    if (n & 1) r *= z;
    n >>= 1;
    if (n) z *= z;
  }
  return r;
}

inline double mod1(long double x) {
  long double f = x - std::floor(x);
  return static_cast<double>(f);
}

}  // namespace detail

inline cplx weight_at(const WeightSequence& w, long long n) {
  if (n < 1) throw IndexOutOfRange("weight_at: n must be >= 1");
  return std::visit(
      [n](const auto& k) -> cplx {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantWeight>) {
          return k.c;
        } else if constexpr (std::is_same_v<T, CharacterWeight>) {
          return detail::unit_pow(k.xi0, n);
        } else if constexpr (std::is_same_v<T, PeriodicWeight>) {
          return k.values[static_cast<size_t>((n - 1) % static_cast<long long>(k.values.size()))];
        } else if constexpr (std::is_same_v<T, RotationWeight>) {
          cplx s{};
          for (const auto& [j, c] : k.coeffs) {
            long double phase = static_cast<long double>(j) * (static_cast<long double>(k.omega) + static_cast<long double>(n) * static_cast<long double>(k.theta));
            s += c * std::polar(1.0, 2.0 * std::numbers::pi * detail::mod1(phase));
          }
          return s;
        } else {
          if (n > static_cast<long long>(k.table.size()))
            throw CustomOutOfRange("custom weight has no entry at n = " + std::to_string(n));
          return k.table[static_cast<size_t>(n - 1)];
        }
      },
      w.kind);
}

// ---- circle limits ----------------------------------------------------------

namespace detail {

inline WeightLimit numerical_limit(const CustomWeight& k, cplx xi) {
  WeightLimit lim{xi, cplx{}, WeightLimit::Mode::numerical, std::numeric_limits<double>::infinity(), ""};
  const long long len = static_cast<long long>(k.table.size());
  std::vector<cplx> checkpoints;
  cplx sum{};
  cplx xpow{1.0, 0.0};
  long long next = 1024;  // 2^10 .. 2^20
  for (long long i = 1; i <= len && next <= (1 << 20); ++i) {
    xpow *= xi;
    sum += k.table[static_cast<size_t>(i - 1)] * xpow;
    if (i == next) {
      checkpoints.push_back(sum / static_cast<double>(i));
      next *= 2;
    }
  }
  if (checkpoints.empty()) {
    if (len > 0) lim.value = sum / static_cast<double>(len);
    return lim;  // residual stays infinite: too little data for the schedule
  }
  lim.value = checkpoints.back();
  if (checkpoints.size() >= 2) {
    double r = 0;
    size_t first = checkpoints.size() > 3 ? checkpoints.size() - 3 : 1;
    for (size_t i = first; i < checkpoints.size(); ++i)
      r = std::max(r, std::abs(checkpoints[i] - checkpoints[i - 1]));
    lim.residual = r;
  }
  return lim;
}

}  // namespace detail

/// Cesaro circle limit a(xi) for |xi| = 1. Closed forms for the built-in
/// kinds; a numerical Cesaro estimate with Cauchy residual for custom tables.
inline WeightLimit weight_limit(const WeightSequence& w, cplx xi) {
  double r = std::abs(xi);
  if (std::abs(r - 1.0) > 1e-9) throw IndexOutOfRange("weight_limit: |xi| must be 1");
  xi /= r;
  return std::visit(
      [xi](const auto& k) -> WeightLimit {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantWeight>) {
          // (1/n) sum c xi^i: geometric partial sums stay bounded for xi != 1.
          bool at_one = std::abs(xi - cplx{1.0, 0.0}) <= kCharMatchTol;
          return WeightLimit{xi, at_one ? k.c : cplx{}, WeightLimit::Mode::exact, 0, "constant"};
        } else if constexpr (std::is_same_v<T, CharacterWeight>) {
          bool match = std::abs(xi * k.xi0 - cplx{1.0, 0.0}) <= kCharMatchTol;
          return WeightLimit{xi, match ? cplx{1.0, 0.0} : cplx{}, WeightLimit::Mode::exact, 0, "character"};
        } else if constexpr (std::is_same_v<T, PeriodicWeight>) {
          const size_t p = k.values.size();
          cplx xp = detail::unit_pow(xi, static_cast<long long>(p));
          if (std::abs(xp - cplx{1.0, 0.0}) > kCharMatchTol)
            return WeightLimit{xi, cplx{}, WeightLimit::Mode::exact, 0, "periodic, xi^p != 1"};
          cplx block{};
          cplx xpow{1.0, 0.0};
          for (size_t j = 0; j < p; ++j) {
            xpow *= xi;
            block += k.values[j] * xpow;  // a_{j+1} xi^{j+1}
          }
          return WeightLimit{xi, block / static_cast<double>(p), WeightLimit::Mode::exact, 0, "periodic block mean"};
        } else if constexpr (std::is_same_v<T, RotationWeight>) {
          // a_n decomposes into character weights xi_j = e^{2 pi i j theta}
          // with coefficients c_j e^{2 pi i j omega}.
          cplx v{};
          for (const auto& [j, c] : k.coeffs) {
            cplx xij = std::polar(1.0, 2.0 * std::numbers::pi * detail::mod1(static_cast<long double>(j) * static_cast<long double>(k.theta)));
            if (std::abs(xi * xij - cplx{1.0, 0.0}) <= kCharMatchTol)
              v += c * std::polar(1.0, 2.0 * std::numbers::pi * detail::mod1(static_cast<long double>(j) * static_cast<long double>(k.omega)));
          }
          return WeightLimit{xi, v, WeightLimit::Mode::exact, 0, "character decomposition"};
        } else {
          return detail::numerical_limit(k, xi);
        }
      },
      w.kind);
}

/// The mean a = a(1), the scalar factor in the compact-group limit.
inline cplx mean_weight(const WeightSequence& w) { return weight_limit(w, cplx{1.0, 0.0}).value; }

// ---- goodness ----------------------------------------------------------------

struct GoodnessProbe {
  enum class Verdict { certified, numerically_consistent, inconclusive } verdict;
  double max_residual = 0;
  std::vector<WeightLimit> samples;
};

/// Roots of unity of order <= 12 plus 16 seeded pseudorandom circle points.
inline std::vector<cplx> default_probe_points(std::uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  std::vector<cplx> pts;
  std::set<std::pair<int, int>> fractions;  // reduced q/m
  for (int m = 1; m <= 12; ++m)
    for (int q = 0; q < m; ++q) {
      int g = std::gcd(q, m);  // gcd(0, m) = m reduces 0/m to 0/1
      fractions.insert({q / g, m / g});
    }
  for (const auto& [q, m] : fractions)
    pts.push_back(std::polar(1.0, 2.0 * std::numbers::pi * q / m));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 1.0);
  for (int i = 0; i < 16; ++i) pts.push_back(std::polar(1.0, 2.0 * std::numbers::pi * angle(rng)));
  return pts;
}

/// Built-in kinds are certified (every circle limit has a closed form).
/// Custom kinds are probed numerically: all residuals <= tol gives
/// numerically_consistent, anything worse is inconclusive. A finite table can
/// never be certified; goodness is a limit property.
inline GoodnessProbe goodness_probe(const WeightSequence& w,
                                    const std::vector<cplx>& xi_samples = default_probe_points(),
                                    double tol = 1e-4) {
  GoodnessProbe probe{GoodnessProbe::Verdict::certified, 0, {}};
  bool custom = std::holds_alternative<CustomWeight>(w.kind);
  for (const cplx& xi : xi_samples) {
    WeightLimit lim = weight_limit(w, xi);
    if (lim.mode == WeightLimit::Mode::numerical) probe.max_residual = std::max(probe.max_residual, lim.residual);
    probe.samples.push_back(std::move(lim));
  }
  if (custom)
    probe.verdict = probe.max_residual <= tol ? GoodnessProbe::Verdict::numerically_consistent
                                              : GoodnessProbe::Verdict::inconclusive;
  return probe;
}

}  // namespace ergolab
