#pragma once

// Data-parallel kernels behind the numerical hot loops.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (AArch64) variant. The variant is
// chosen once at runtime from the CPU features; every variant performs the
// same IEEE operations in the same order, so all of them return bit-identical
// results. `TCCOPULA_SIMD=scalar|avx2|neon` in the environment overrides the
// choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace tccopula::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

bool isa_supported(Isa isa) noexcept;

/// Best variant the running CPU supports.
Isa detected_isa() noexcept;

/// Variant currently used by the dispatching entry points.
Isa active_isa() noexcept;

/// Select the variant used by the dispatching entry points; throws
/// DomainError when the CPU (or build) lacks it.
void set_active_isa(Isa isa);

/// out[i] = Φ(x[i]), the standard normal distribution function.
/// Accurate to a few ulp in absolute terms; ±inf map to 0 and 1.
void normal_cdf(std::span<const double> x, std::span<double> out);

/// For values x[0..N]: squares[i] = (x[i+1]-x[i])², fourths[i] = squares[i]².
/// Both outputs must hold N = values.size()-1 elements.
void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths);

/// max_i |a[i] - b[i]|, or 0 for empty input.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

namespace scalar {
double normal_cdf_one(double x) noexcept;
double exp_one(double x) noexcept;
void normal_cdf(std::span<const double> x, std::span<double> out) noexcept;
void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void normal_cdf(std::span<const double> x, std::span<double> out) noexcept;
void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void normal_cdf(std::span<const double> x, std::span<double> out) noexcept;
void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b) noexcept;
}  // namespace neon
#endif

}  // namespace tccopula::simd
