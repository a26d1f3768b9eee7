#include "nlzcav/angular.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <boost/multiprecision/cpp_int.hpp>

namespace nlzcav {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

const cpp_int& factorial(int n) {
  // Grows on demand; deque keeps earlier references valid.
  thread_local std::deque<cpp_int> table{1};
  if (n < 0) throw AngularDomainError("negative factorial argument");
  while (static_cast<int>(table.size()) <= n) {
    table.push_back(table.back() * static_cast<int>(table.size()));
  }
  return table[static_cast<std::size_t>(n)];
}

void require_magnitude(HalfInt j, const char* name) {
  if (j.twice() < 0) throw AngularDomainError(std::string(name) + " must be non-negative, got " + j.str());
}

void require_projection(HalfInt j, HalfInt m) {
  if (std::abs(m.twice()) > j.twice()) {
    throw AngularDomainError("projection " + m.str() + " exceeds magnitude " + j.str());
  }
  if ((j.twice() - m.twice()) % 2 != 0) {
    throw AngularDomainError("projection " + m.str() + " and magnitude " + j.str() + " differ by a half-integer");
  }
}

// Integer value of a sum of HalfInts known to be integral.
int to_int(HalfInt h) { return h.twice() / 2; }

// Triangle coefficient Delta(abc) as an exact rational.
cpp_rational triangle_coefficient(HalfInt a, HalfInt b, HalfInt c) {
  cpp_rational num = cpp_rational(factorial(to_int(a + b - c)) * factorial(to_int(a - b + c)) *
                                  factorial(to_int(-a + b + c)));
  return num / cpp_rational(factorial(to_int(a + b + c) + 1));
}

// sign * sqrt(radicand) with the square root taken only once at the end.
double signed_root(const cpp_rational& sum, const cpp_rational& radicand) {
  if (sum == 0) return 0.0;
  const cpp_rational squared = sum * sum * radicand;
  const double magnitude = std::sqrt(squared.convert_to<double>());
  return sum < 0 ? -magnitude : magnitude;
}

}  // namespace

bool is_triangle(HalfInt a, HalfInt b, HalfInt c) {
  if ((a.twice() + b.twice() + c.twice()) % 2 != 0) return false;
  return c >= abs(a - b) && c <= a + b;
}

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  require_magnitude(j1, "j1");
  require_magnitude(j2, "j2");
  require_magnitude(j3, "j3");
  require_projection(j1, m1);
  require_projection(j2, m2);
  require_projection(j3, m3);

  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (!is_triangle(j1, j2, j3)) return 0.0;

  const int a = to_int(j1 + j2 - j3);
  const int b = to_int(j1 - m1);
  const int c = to_int(j2 + m2);
  const int d = to_int(j3 - j2 + m1);
  const int e = to_int(j3 - j1 - m2);
  const int k_min = std::max({0, -d, -e});
  const int k_max = std::min({a, b, c});

  cpp_rational sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    cpp_int denom = factorial(k) * factorial(d + k) * factorial(e + k) * factorial(a - k) *
                    factorial(b - k) * factorial(c - k);
    cpp_rational term(cpp_int(1), denom);
    if (k % 2 != 0) term = -term;
    sum += term;
  }

  cpp_rational radicand = triangle_coefficient(j1, j2, j3);
  radicand *= cpp_rational(factorial(to_int(j1 + m1)) * factorial(to_int(j1 - m1)) *
                           factorial(to_int(j2 + m2)) * factorial(to_int(j2 - m2)) *
                           factorial(to_int(j3 + m3)) * factorial(to_int(j3 - m3)));

  const int phase = to_int(j1 - j2 - m3);
  double value = signed_root(sum, radicand);
  return (phase % 2 != 0) ? -value : value;
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  require_magnitude(j1, "j1");
  require_magnitude(j2, "j2");
  require_magnitude(j3, "j3");
  require_magnitude(j4, "j4");
  require_magnitude(j5, "j5");
  require_magnitude(j6, "j6");

  const HalfInt triads[4][3] = {{j1, j2, j3}, {j1, j5, j6}, {j4, j2, j6}, {j4, j5, j3}};
  for (const auto& t : triads) {
    if ((t[0].twice() + t[1].twice() + t[2].twice()) % 2 != 0) {
      throw AngularDomainError("6-j triad (" + t[0].str() + ", " + t[1].str() + ", " + t[2].str() +
                               ") has a half-integer sum");
    }
  }
  for (const auto& t : triads) {
    if (!is_triangle(t[0], t[1], t[2])) return 0.0;
  }

  const int a1 = to_int(j1 + j2 + j3);
  const int a2 = to_int(j1 + j5 + j6);
  const int a3 = to_int(j4 + j2 + j6);
  const int a4 = to_int(j4 + j5 + j3);
  const int b1 = to_int(j1 + j2 + j4 + j5);
  const int b2 = to_int(j2 + j3 + j5 + j6);
  const int b3 = to_int(j3 + j1 + j6 + j4);
  const int t_min = std::max({a1, a2, a3, a4});
  const int t_max = std::min({b1, b2, b3});

  cpp_rational sum = 0;
  for (int t = t_min; t <= t_max; ++t) {
    cpp_int denom = factorial(t - a1) * factorial(t - a2) * factorial(t - a3) * factorial(t - a4) *
                    factorial(b1 - t) * factorial(b2 - t) * factorial(b3 - t);
    cpp_rational term(factorial(t + 1), denom);
    if (t % 2 != 0) term = -term;
    sum += term;
  }

  const cpp_rational radicand = triangle_coefficient(j1, j2, j3) * triangle_coefficient(j1, j5, j6) *
                                triangle_coefficient(j4, j2, j6) * triangle_coefficient(j4, j5, j3);
  return signed_root(sum, radicand);
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  const double threej = wigner_3j(j1, j2, J, m1, m2, -M);
  if (threej == 0.0) return 0.0;
  const int phase = to_int(j1 - j2 + M);
  const double value = std::sqrt(static_cast<double>(J.multiplicity())) * threej;
  return (phase % 2 != 0) ? -value : value;
}

double coupling_zero_field(HalfInt F_g, HalfInt m_g, HalfInt F_x, HalfInt m_x, int q, HalfInt I,
                           HalfInt J_g, HalfInt J_x) {
  if (q < -1 || q > 1) throw AngularDomainError("dipole component q must be -1, 0 or +1");
  require_projection(F_g, m_g);
  require_projection(F_x, m_x);
  if (m_g != m_x + HalfInt(q)) return 0.0;

  const double sixj = wigner_6j(J_g, J_x, 1, F_x, F_g, I);
  if (sixj == 0.0) return 0.0;
  const double threej = wigner_3j(F_x, 1, F_g, m_x, q, -m_g);
  if (threej == 0.0) return 0.0;

  const int phase = to_int(HalfInt(1) + I + J_x + F_x + F_g - m_x);
  const double root = std::sqrt(static_cast<double>(F_g.multiplicity() * F_x.multiplicity() * J_g.multiplicity()));
  const double value = root * sixj * threej;
  return (phase % 2 != 0) ? -value : value;
}

}  // namespace nlzcav
