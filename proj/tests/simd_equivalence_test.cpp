#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tccopula/errors.hpp"
#include "tccopula/simd/kernels.hpp"

using namespace tccopula;

namespace {

std::vector<double> cdf_inputs() {
  std::vector<double> x;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> wide(-40.0, 40.0), narrow(-1.0, 1.0);
  for (int i = 0; i < 50001; ++i) x.push_back(i % 3 ? wide(rng) : narrow(rng));
  // branch boundaries and special values
  const double inv = 1.0 / 0.70710678118654752440;
  for (double y : {0.46875, 4.0, 26.543, 0.0}) {
    for (double d : {-1e-15, 0.0, 1e-15}) {
      x.push_back((y + d) * inv);
      x.push_back(-(y + d) * inv);
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (double v : {0.0, -0.0, inf, -inf, 1e-300, -1e-300, 38.4, -38.4, 37.5, -37.5})
    x.push_back(v);
  return x;
}

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

struct Variant {
  simd::Isa isa;
  void (*cdf)(std::span<const double>, std::span<double>) noexcept;
  void (*powers)(std::span<const double>, std::span<double>, std::span<double>) noexcept;
  double (*maxdiff)(std::span<const double>, std::span<const double>) noexcept;
};

std::vector<Variant> vector_variants() {
  std::vector<Variant> v;
#if defined(__x86_64__) || defined(_M_X64)
  if (simd::isa_supported(simd::Isa::avx2))
    v.push_back({simd::Isa::avx2, simd::avx2::normal_cdf, simd::avx2::increment_powers,
                 simd::avx2::max_abs_diff});
#endif
#if defined(__aarch64__)
  v.push_back({simd::Isa::neon, simd::neon::normal_cdf, simd::neon::increment_powers,
               simd::neon::max_abs_diff});
#endif
  return v;
}

}  // namespace

TEST_CASE("scalar normal cdf matches the erfc oracle") {
  const std::vector<double> x = cdf_inputs();
  for (double xi : x) {
    const double got = simd::scalar::normal_cdf_one(xi);
    const double want = oracle::normal_cdf(xi);
    REQUIRE(std::fabs(got - want) <= 2.3e-16);
  }
}

TEST_CASE("scalar exp matches std::exp") {
  double worst = 0.0;
  // flushed to zero below -708, where results would be near-subnormal
  for (double x = -708.0; x <= 709.0; x += 0.0137) {
    const double want = std::exp(x);
    worst = std::max(worst, std::fabs(simd::scalar::exp_one(x) - want) / want);
  }
  CHECK(worst <= 4e-16);
  CHECK(simd::scalar::exp_one(-708.5) == 0.0);
  CHECK(simd::scalar::exp_one(0.0) == 1.0);
  CHECK(std::isinf(simd::scalar::exp_one(710.0)));
  CHECK(std::isnan(simd::scalar::exp_one(NAN)));
}

TEST_CASE("vector variants are bit-identical to the scalar reference") {
  const std::vector<double> x = cdf_inputs();
  std::vector<double> ref(x.size());
  simd::scalar::normal_cdf(x, ref);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::vector<double> path(10007);
  for (double& p : path) p = normal(rng);
  std::vector<double> sq_ref(path.size() - 1), q4_ref(path.size() - 1);
  simd::scalar::increment_powers(path, sq_ref, q4_ref);

  for (const Variant& v : vector_variants()) {
    CAPTURE(simd::isa_name(v.isa));
    // every tail length
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{5}, std::size_t{7},
                          std::size_t{9}, x.size()}) {
      std::vector<double> got(n);
      v.cdf(std::span<const double>(x.data(), n), got);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(same_bits(got[i], ref[i]));
    }
    std::vector<double> sq(sq_ref.size()), q4(q4_ref.size());
    v.powers(path, sq, q4);
    for (std::size_t i = 0; i < sq.size(); ++i) {
      REQUIRE(same_bits(sq[i], sq_ref[i]));
      REQUIRE(same_bits(q4[i], q4_ref[i]));
    }
    CHECK(v.maxdiff(sq, q4) == simd::scalar::max_abs_diff(sq, q4));
    CHECK(v.maxdiff(std::span<const double>(sq.data(), 3), std::span<const double>(q4.data(), 3)) ==
          simd::scalar::max_abs_diff(std::span<const double>(sq.data(), 3),
                                     std::span<const double>(q4.data(), 3)));
  }
}

TEST_CASE("dispatcher selects and reports variants") {
  const simd::Isa original = simd::active_isa();
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::isa_supported(simd::detected_isa()));
  simd::set_active_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  std::vector<double> x{-1.0, 0.0, 2.5}, out(3);
  simd::normal_cdf(x, out);
  CHECK(out[1] == 0.5);
  for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon})
    if (!simd::isa_supported(isa)) CHECK_THROWS_AS(simd::set_active_isa(isa), DomainError);
  std::vector<double> short_out(2);
  CHECK_THROWS_AS(simd::normal_cdf(x, short_out), DomainError);
  simd::set_active_isa(original);
}

TEST_CASE("max_abs_diff of empty input is zero") {
  std::vector<double> e;
  CHECK(simd::max_abs_diff(e, e) == 0.0);
}
