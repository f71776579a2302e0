#include <atomic>
#include <cstdlib>
#include <string>

#include "tccopula/errors.hpp"
#include "tccopula/simd/kernels.hpp"

namespace tccopula::simd {

namespace {

struct KernelTable {
  Isa isa;
  void (*normal_cdf)(std::span<const double>, std::span<double>) noexcept;
  void (*increment_powers)(std::span<const double>, std::span<double>, std::span<double>) noexcept;
  double (*max_abs_diff)(std::span<const double>, std::span<const double>) noexcept;
};

constexpr KernelTable kScalarTable{Isa::scalar, &scalar::normal_cdf, &scalar::increment_powers,
                                   &scalar::max_abs_diff};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{Isa::avx2, &avx2::normal_cdf, &avx2::increment_powers,
                                 &avx2::max_abs_diff};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeonTable{Isa::neon, &neon::normal_cdf, &neon::increment_powers,
                                 &neon::max_abs_diff};
#endif

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return &kScalarTable;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("TCCOPULA_SIMD")) {
    const std::string want(env);
    for (Isa candidate : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(candidate) && isa_supported(candidate)) isa = candidate;
    }
  }
  return table_for(isa);
}

std::atomic<const KernelTable*>& active_table() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

const KernelTable& current() noexcept { return *active_table().load(std::memory_order_acquire); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() noexcept {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() noexcept { return current().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw DomainError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available here");
  active_table().store(table_for(isa), std::memory_order_release);
}

void normal_cdf(std::span<const double> x, std::span<double> out) {
  if (out.size() < x.size()) throw DomainError("normal_cdf: output shorter than input");
  current().normal_cdf(x, out);
}

void increment_powers(std::span<const double> values, std::span<double> squares,
                      std::span<double> fourths) {
  const std::size_t n = values.empty() ? 0 : values.size() - 1;
  if (squares.size() < n || fourths.size() < n)
    throw DomainError("increment_powers: output shorter than the increment count");
  current().increment_powers(values, squares, fourths);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("max_abs_diff: length mismatch");
  return current().max_abs_diff(a, b);
}

}  // namespace tccopula::simd
