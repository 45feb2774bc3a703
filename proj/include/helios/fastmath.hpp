#pragma once

// Branch-free sine/cosine pair for the inner quadrature loops. The reduction
// is a three-part Cody-Waite split of pi/2 and the kernels are the fdlibm
// minimax polynomials on [-pi/4, pi/4]. Absolute error stays within a few ulp
// for |x| <= kFastSincosLimit; callers must route larger phases through std::sin
// and std::cos. The function has no branches, so loops calling it vectorise.

#include <cmath>
#include <cstdint>
#include <cstring>

namespace helios {

inline constexpr double kFastSincosLimit = 1.0e5;

#if defined(__GNUC__)
#define HELIOS_PRAGMA(x) _Pragma(#x)
#define HELIOS_SIMD_REDUCTION(...) HELIOS_PRAGMA(omp simd reduction(+ : __VA_ARGS__))
#define HELIOS_INLINE inline __attribute__((always_inline))
#else
#define HELIOS_SIMD_REDUCTION(...)
#define HELIOS_INLINE inline
#endif

HELIOS_INLINE void fast_sincos(double x, double& s, double& c) {
  constexpr double kTwoOverPi = 0.63661977236758134308;
  constexpr double kRound = 6755399441055744.0;  // 1.5 * 2^52
  constexpr double kPio2a = 1.57079632673412561417e+00;
  constexpr double kPio2b = 6.07710050630396597660e-11;
  constexpr double kPio2c = 2.02226624871116645580e-21;
  const double shifted = x * kTwoOverPi + kRound;
  const double n = shifted - kRound;
  double r = x - n * kPio2a;
  r -= n * kPio2b;
  r -= n * kPio2c;
  const double z = r * r;
  const double sp =
      r + r * z *
              (-1.66666666666666324348e-01 +
               z * (8.33333333332248946124e-03 +
                    z * (-1.98412698298579493134e-04 +
                         z * (2.75573137070700676789e-06 +
                              z * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10)))));
  const double cp =
      1.0 - 0.5 * z +
      z * z *
          (4.16666666666666019037e-02 +
           z * (-1.38888888888741095749e-03 +
                z * (2.48015872894767294178e-05 +
                     z * (-2.75573143513906633035e-07 +
                          z * (2.08757232129817482790e-09 + z * -1.13596475577881948265e-11)))));
  std::int64_t bits;
  std::memcpy(&bits, &shifted, sizeof bits);
  const int q = static_cast<int>(bits & 3);
  const double ss = (q & 1) ? cp : sp;
  const double cc = (q & 1) ? sp : cp;
  s = ss * static_cast<double>(1 - 2 * ((q >> 1) & 1));
  c = cc * static_cast<double>(1 - 2 * (((q + 1) >> 1) & 1));
}

}  // namespace helios
