#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ergolab {

using cplx = std::complex<double>;

inline constexpr double kSupportTol = 1e-12;
inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kIdempotentTol = 1e-9;
inline constexpr double kCharMatchTol = 1e-9;
inline constexpr int kGroupOrderCap = 5040;
inline constexpr int kSubgroupEnumCap = 120;
inline constexpr long long kZSupportCap = 1'000'000;

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy. The scenario runner maps these onto process exit codes:
// config problems -> 2, numerical failures -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TableInvalid : Error { using Error::Error; };
struct SizeLimit : Error { using Error::Error; };
struct EmptySupport : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct GroupMismatch : Error { using Error::Error; };
struct SupportOverflow : Error { using Error::Error; };
struct OracleDisagreement : Error { using Error::Error; };
struct NotPowerBounded : Error { using Error::Error; };
struct CesaroNotConverged : Error { using Error::Error; };
struct EigensolverFailure : Error { using Error::Error; };
struct NotAbelian : Error { using Error::Error; };
struct CustomOutOfRange : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace ergolab
