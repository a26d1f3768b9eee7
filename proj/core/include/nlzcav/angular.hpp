#pragma once

#include <stdexcept>
#include <string>

#include "nlzcav/half_int.hpp"

namespace nlzcav {

/// Raised for angular-momentum arguments outside the physical domain
/// (|m| > j, parity mismatch between j and m, negative magnitudes).
class AngularDomainError : public std::domain_error {
 public:
  explicit AngularDomainError(const std::string& what) : std::domain_error(what) {}
};

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3) from the Racah sum, evaluated in exact
/// rational arithmetic and rounded once to double.
/// Returns exactly 0 for a violated triangle or m1 + m2 + m3 != 0.
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}. Triads (j1 j2 j3), (j1 j5 j6),
/// (j4 j2 j6), (j4 j5 j3) must each have an integer sum; a triangle violation
/// gives 0.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

/// <j1 m1; j2 m2 | J M>, Condon-Shortley phase convention.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

/// Angular prefactor A_gx of the dipole matrix element <F_g m_g| e r_q |F_x m_x> = A_gx d
/// between unperturbed hyperfine sublevels. Nonzero only when m_g = m_x + q.
double coupling_zero_field(HalfInt F_g, HalfInt m_g, HalfInt F_x, HalfInt m_x, int q, HalfInt I,
                           HalfInt J_g, HalfInt J_x);

/// True when (a, b, c) satisfy the triangle inequality and a + b + c is integral.
bool is_triangle(HalfInt a, HalfInt b, HalfInt c);

}  // namespace nlzcav
