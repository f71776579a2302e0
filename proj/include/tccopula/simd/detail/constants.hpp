#pragma once

// Coefficients shared by every kernel variant. Only constants live here so
// that ISA-specific translation units can include it without pulling in
// inline functions compiled for the wrong target.

namespace tccopula::simd::detail {

// exp(): k = nearest(x/ln2), r = x - k*ln2 split in two words, Taylor
// polynomial of degree 13 on |r| <= ln2/2.
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kExpUnderflow = -708.0;
inline constexpr int kExpDegree = 13;
inline constexpr double kExpTaylor[kExpDegree + 1] = {
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362880.0,
    1.0 / 3628800.0,
    1.0 / 39916800.0,
    1.0 / 479001600.0,
    1.0 / 6227020800.0,
};

// W. J. Cody's rational Chebyshev approximations for erf/erfc.
inline constexpr double kErfA[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                                    3.77485237685302021e02, 3.20937758913846947e03,
                                    1.85777706184603153e-1};
inline constexpr double kErfB[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                                    1.28261652607737228e03, 2.84423683343917062e03};
inline constexpr double kErfcC[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                                     6.61191906371416295e01, 2.98635138197400131e02,
                                     8.81952221241769090e02, 1.71204761263407058e03,
                                     2.05107837782607147e03, 1.23033935479799725e03,
                                     2.15311535474403846e-8};
inline constexpr double kErfcD[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                                     5.37181101862009858e02, 1.62138957456669019e03,
                                     3.29079923573345963e03, 4.36261909014324716e03,
                                     3.43936767414372164e03, 1.23033935480374942e03};
inline constexpr double kErfcP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                     1.25781726111229246e-1, 1.60837851487422766e-2,
                                     6.58749161529837803e-4, 1.63153871373020978e-2};
inline constexpr double kErfcQ[5] = {2.56852019228982242e00, 1.87295284992346725e00,
                                     5.27905102951428412e-1, 6.05183413124413191e-2,
                                     2.33520497626869185e-3};
inline constexpr double kInvSqrtPi = 5.6418958354775628695e-1;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kErfSmall = 0.46875;
inline constexpr double kErfcMid = 4.0;
// erfc(x) underflows to zero beyond this argument.
inline constexpr double kErfcBig = 26.543;

// exp(-(k/16)^2) for k = 0..425, computed with the scalar exp. The erfc
// factorization only ever needs these values of the first exponential.
inline constexpr int kSquareTableLast = 425;
const double* exp_neg_square_table() noexcept;

}  // namespace tccopula::simd::detail
