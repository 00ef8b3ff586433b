#pragma once

// Published degree-11 reference models used as fixtures by several test binaries.

#include <vector>

namespace pnt::reference {

// Beta(2,2) fitted by PWM matching, a_0 .. a_11.
inline const std::vector<double> kBeta22Pwm11 = {
    0.500000003658777,     0.265961312977451,     -6.4707982562276e-8,  -0.0192416046002625,
    1.41667915745929e-7,   0.00120213182254751,   -8.51019206906232e-8, -0.0000555670500494067,
    1.63734319656302e-8,   1.75657290203781e-6,   -8.53583161405554e-10, -2.76217093165881e-8,
};

// Lognormal(0,1) fitted by percentile matching on 17 even nodes in [0.001, 0.999], a_0 .. a_11.
inline const std::vector<double> kLognormalPct11 = {
    0.999999999545197,    1.00000000118744,     0.500000016464362,    0.166666657138832,
    0.0416665771671574,   0.00833335056026873,  0.00138905069923553,  0.000198405765895619,
    2.46853662677270e-5,  2.75245190929274e-6,  3.07095310533251e-7,  2.70587705587477e-8,
};

// Determinant of the normal PWM matrix for n = 1 .. 12.
inline const std::vector<double> kPwmDeterminants = {
    0.2821,     0.0259,     8.2291e-4,  9.3220e-6,  3.8458e-8,  5.8600e-11,
    3.3321e-14, 7.1266e-18, 5.7686e-22, 1.7762e-26, 2.0880e-31, 9.4023e-37,
};

// rho_x -> rho_z for a pair of Lognormal(0,1) marginals, three decimals.
struct RhoRow {
    double rho_x;
    double rho_z;
};
inline const std::vector<RhoRow> kLognormalRhoTable = {
    {-0.3, -0.725}, {-0.1, -0.189}, {0.1, 0.159}, {0.3, 0.416}, {0.5, 0.620}, {0.7, 0.790}, {0.9, 0.935},
};

}  // namespace pnt::reference
