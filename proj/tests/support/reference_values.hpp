#pragma once

// Values computed offline at 30 digits with mpmath. The Z values come from the
// Hurwitz-zeta form of L(s, chi_q), independent of the smoothed sum.

#include <cstdint>

namespace qlf::testing {

inline constexpr double kLogGammaQuarter = 1.28802252469807745737;
inline constexpr double kLogGammaHalf = 0.572364942924700087;
inline constexpr double kUpperGammaHalfAtOne = 0.278805585280661976499;  // Gamma(1/2, 1)

// G_{0.25 + 0.15i}(2)
inline constexpr double kKernelRe = 0.0526068518939215069;
inline constexpr double kKernelIm = 0.00242562716376073936;

// V_{1/2 + 0.3i}(3)
inline constexpr double kWeightRe = 0.00423727506767830586;
inline constexpr double kWeightIm = 0.00413420218082498900;

struct ZReference {
  std::int64_t q;
  double t;
  double Z;
  double theta;
};

inline constexpr ZReference kZReferences[] = {
    {5, 0.0, 0.23175094750401575588, 0.0},
    {5, 0.3, 0.27198675461975921726, -0.50408972109353461382},
    {5, 1.0, 0.55258923461881273542, -0.962828996595240201},
    {13, 0.0, 0.43959297350900522525, 0.0},
    {13, 0.3, 0.51022893336065347074, -0.3607630043394191649},
    {13, 1.0, 0.92194445320190256472, -0.48507327408152202028},
    {21, 0.0, 0.49726238048811166525, 0.0},
    {21, 0.3, 0.57117800028263952926, -0.2888270423001362285},
    {21, 1.0, 0.91634552168974720898, -0.24528673395057889005},
    {10009, 0.0, 7.4367614404760560031, 0.0},
    {10009, 0.3, 7.3241481332430814525, 0.63618058712420311216},
    {10009, 1.0, 0.28784003319478594053, 2.8380720307972190262},
};

}  // namespace qlf::testing
