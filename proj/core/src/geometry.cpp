#include <cmath>
#include <stdexcept>

#include "nlzcav/cavitysys.hpp"

namespace nlzcav {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kEpsilon0 = 8.8541878128e-12;
constexpr double kHbar = 1.054571817e-34;
}  // namespace

CavityRates cavity_params_from_geometry(const CavityGeometry& g) {
  if (!(g.length > 0 && g.wavelength > 0 && g.mirror_radius > 0)) {
    throw std::invalid_argument("cavity length, wavelength and mirror radius must be positive");
  }
  if (g.length >= 2.0 * g.mirror_radius) throw std::domain_error("unstable resonator: L >= 2 R");
  const double loss = 1e-6 * (g.transmission_1 + g.transmission_2 + g.loss_1 + g.loss_2);
  if (!(loss > 0)) throw std::invalid_argument("total round-trip loss must be positive");

  CavityRates r;
  r.finesse = kTwoPi / loss;
  r.fsr = kTwoPi * kSpeedOfLight / (2.0 * g.length);
  r.fwhm = r.fsr / r.finesse;
  r.kappa = 0.5 * r.fwhm;

  const double w0_sq = g.wavelength / kTwoPi * std::sqrt(g.length * (2.0 * g.mirror_radius - g.length));
  r.waist = std::sqrt(w0_sq);
  r.mode_volume = 0.25 * kPi * w0_sq * g.length;
  const double omega = kTwoPi * kSpeedOfLight / g.wavelength;
  r.g0 = g.dipole > 0 ? g.dipole * std::sqrt(omega / (2.0 * kHbar * kEpsilon0 * r.mode_volume)) : 0.0;
  return r;
}

}  // namespace nlzcav
