#include "nlzcav/hom.hpp"

#include "nlzcav/atomstruct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace nlzcav {

namespace {

using Kronrod61 = boost::math::quadrature::gauss_kronrod<double, 61>;

template <class F>
double adaptive(F&& f, double a, double b, double tol = 1e-11) {
  return Kronrod61::integrate(f, a, b, 15, tol);
}

void require_width(double w, const char* what) {
  if (!(w > 0) || !std::isfinite(w)) throw std::domain_error(std::string(what) + " must be positive");
}

using Legendre30 = boost::math::quadrature::gauss<double, 30>;

struct Rule {
  std::vector<double> x, w;
};

// Composite 30-point Gauss-Legendre rule on [a, b].
Rule composite_rule(double a, double b, int panels) {
  Rule r;
  const auto& abs = Legendre30::abscissa();
  const auto& wts = Legendre30::weights();
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h, half = 0.5 * h;
    for (std::size_t k = 0; k < abs.size(); ++k) {
      const double ws = wts[k] * half;
      r.x.push_back(mid + half * abs[k]);
      r.w.push_back(ws);
      if (abs[k] != 0.0) {
        r.x.push_back(mid - half * abs[k]);
        r.w.push_back(ws);
      }
    }
  }
  return r;
}

// Unit-centred rule scaled onto centre +- 10 sigma of a Gaussian-shaped integrand.
const Rule& unit_rule() {
  static const Rule r = composite_rule(-10.0, 10.0, 2);
  return r;
}

template <class F>
double gaussian_window_sum(F&& f, double centre, double sigma) {
  const Rule& r = unit_rule();
  double s = 0.0;
  for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * f(centre + sigma * r.x[k]);
  return s * sigma;
}

}  // namespace

double gaussian_wavepacket(double t, double delta_t, double t0) {
  require_width(delta_t, "wavepacket width");
  const double x = (t - t0) / delta_t;
  return std::pow(2.0 / (kPi * delta_t * delta_t), 0.25) * std::exp(-x * x);
}

double timing_gaussian(double t, double t0, double width) {
  require_width(width, "timing width");
  const double x = (t - t0) / width;
  return std::exp(-x * x) / (width * std::sqrt(kPi));
}

void WavepacketModel::validate() const {
  require_width(delta_t, "delta_t");
  require_width(delta_t_prime, "delta_t'");
  require_width(L_ph, "L_ph");
  if (jitter < 0) throw std::domain_error("jitter must be non-negative");
  if (P_cont < 0 || P_cont > 1) throw std::domain_error("P_cont must lie in [0, 1]");
  if (beat_fraction < 0 || beat_fraction > 1) throw std::domain_error("beat fraction must lie in [0, 1]");
}

WavepacketModel WavepacketModel::fitted_d2(double P_cont) {
  WavepacketModel m{97.4e-9, 129.5e-9, 47.6e-9, 226.7e-9, 45.0e-9, P_cont, 300e-9, 0.0, 0.0};
  m.validate();
  return m;
}

std::string wavepacket_model_to_json(const WavepacketModel& m) {
  nlohmann::json j{{"schema", "nlzcav-wavepacket/1"},
                   {"delta_t_ns", m.delta_t * 1e9},
                   {"t0_ns", m.t0 * 1e9},
                   {"delta_t_prime_ns", m.delta_t_prime * 1e9},
                   {"t0_prime_ns", m.t0_prime * 1e9},
                   {"jitter_ns", m.jitter * 1e9},
                   {"P_cont", m.P_cont},
                   {"L_ph_ns", m.L_ph * 1e9},
                   {"beat_fraction", m.beat_fraction},
                   {"beat_freq_MHz", angular_to_mhz(m.beat_freq)}};
  return j.dump(2);
}

WavepacketModel wavepacket_model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("wavepacket JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("wavepacket JSON must be an object");
  auto get = [&](const char* key, std::optional<double> fallback) {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError(std::string("wavepacket JSON: missing field '") + key + "'");
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("wavepacket JSON: field '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  WavepacketModel m;
  m.delta_t = get("delta_t_ns", std::nullopt) * 1e-9;
  m.t0 = get("t0_ns", std::nullopt) * 1e-9;
  m.delta_t_prime = get("delta_t_prime_ns", std::nullopt) * 1e-9;
  m.t0_prime = get("t0_prime_ns", std::nullopt) * 1e-9;
  m.jitter = get("jitter_ns", std::nullopt) * 1e-9;
  m.P_cont = get("P_cont", std::nullopt);
  m.L_ph = get("L_ph_ns", std::nullopt) * 1e-9;
  m.beat_fraction = get("beat_fraction", 0.0);
  m.beat_freq = mhz_to_angular(get("beat_freq_MHz", 0.0));
  try {
    m.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("wavepacket JSON: ") + e.what());
  }
  return m;
}

ContaminatedParams contaminated_params(double delta_t, double /*t0*/, double L_ph, double t_sp) {
  require_width(delta_t, "delta_t");
  require_width(L_ph, "L_ph");
  if (!(t_sp > 0 && t_sp < L_ph)) throw std::domain_error("t_sp must lie inside (0, L_ph)");
  return {(L_ph - t_sp) / L_ph * delta_t, 0.5 * (L_ph + t_sp)};
}

SpontaneousTiming spontaneous_timing(double L_ph, const std::function<double(double)>& psi_sq, std::size_t samples) {
  require_width(L_ph, "L_ph");
  if (samples < 3) throw std::invalid_argument("need at least 3 samples");

  auto p_sp = [L_ph](double t) {
    const double s = std::sin(kPi * t / L_ph);
    return s * s * s * s;
  };
  // Panel-wise quadrature between neighbouring samples, accumulated in both directions.
  const double dt = L_ph / static_cast<double>(samples - 1);
  std::vector<double> C(samples, 0.0), S(samples, 0.0);
  for (std::size_t i = 1; i < samples; ++i) {
    const double lo = static_cast<double>(i - 1) * dt, hi = static_cast<double>(i) * dt;
    C[i] = C[i - 1] + Kronrod61::integrate(p_sp, lo, hi, 0);
  }
  for (std::size_t i = samples - 1; i-- > 0;) {
    const double lo = static_cast<double>(i) * dt, hi = static_cast<double>(i + 1) * dt;
    S[i] = S[i + 1] + Kronrod61::integrate(psi_sq, lo, hi, 0);
  }
  const double sp_total = C.back();
  const double psi_total = S.front();
  if (!(psi_total > 0)) throw std::invalid_argument("intensity profile has no weight on [0, L_ph]");

  // With P_sp normalised, P_{sp<t} = C (1 - (1 - C)) = C^2 and its derivative is 2 C P_sp.
  SpontaneousTiming out;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (psi_sq(t) < 0) throw std::invalid_argument("intensity profile must be non-negative");
    const double c = C[i] / sp_total;
    out.t.push_back(t);
    out.P_sp_before.push_back(c * c);
    out.P_sp_final.push_back(2.0 * c * p_sp(t) / sp_total);
    out.P_emm.push_back(out.P_sp_final.back() * S[i] / psi_total);
  }
  double emm_total = 0.0;
  for (std::size_t i = 1; i < samples; ++i) emm_total += 0.5 * dt * (out.P_emm[i - 1] + out.P_emm[i]);
  if (!(emm_total > 0)) throw std::invalid_argument("intensity profile gives no emission after a reset");
  for (double& v : out.P_emm) v /= emm_total;

  // Least squares in units of L_ph keeps the problem well scaled.
  const double mean = std::transform_reduce(out.t.begin(), out.t.end(), out.P_emm.begin(), 0.0) * dt;
  double var = 0.0;
  for (std::size_t i = 0; i < samples; ++i) var += (out.t[i] - mean) * (out.t[i] - mean) * out.P_emm[i] * dt;

  struct Residual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    const SpontaneousTiming* data;
    double scale;
    int inputs() const { return 2; }
    int values() const { return static_cast<int>(data->t.size()); }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
      const double w = std::abs(x[1]);
      for (std::size_t i = 0; i < data->t.size(); ++i) {
        const double u = (data->t[i] / scale - x[0]) / w;
        f[static_cast<Eigen::Index>(i)] = std::exp(-u * u) / (w * std::sqrt(kPi)) - data->P_emm[i] * scale;
      }
      return 0;
    }
  };
  Residual r{&out, L_ph};
  Eigen::VectorXd x(2);
  x << mean / L_ph, std::sqrt(2.0 * var) / L_ph;
  Eigen::NumericalDiff<Residual> nd(r);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residual>> lm(nd);
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation)
    throw std::runtime_error("Gaussian fit of the emission-start density did not converge");
  out.t_sp = x[0] * L_ph;
  out.jitter = std::abs(x[1]) * L_ph;
  Eigen::VectorXd f(static_cast<Eigen::Index>(samples));
  r(x, f);
  out.rms_residual = std::sqrt(f.squaredNorm() / static_cast<double>(samples)) / L_ph;
  return out;
}

double contamination_single(double F_P, double decay) {
  if (F_P < 0) throw std::domain_error("Purcell factor must be non-negative");
  if (decay < 0 || decay > 1) throw std::domain_error("decay probability must lie in [0, 1]");
  return decay * (1.0 - F_P / (F_P + 1.0));
}

double contamination_probability(const ContaminationInputs& in) {
  if (in.eta_plus < 0 || in.eta_minus < 0) throw std::domain_error("efficiencies must be non-negative");
  const double total = in.eta_plus + in.eta_minus;
  if (!(total > 0)) throw std::domain_error("contamination undefined when both efficiencies vanish");
  return in.eta_plus / total * contamination_single(in.F_P_plus, in.decay_plus) +
         in.eta_minus / total * contamination_single(in.F_P_minus, in.decay_minus);
}

namespace {

double contaminated_intensity(const WavepacketModel& m, double t) {
  const double w = m.delta_t_prime;
  if (m.jitter == 0.0) {
    const double e = gaussian_wavepacket(t, w, m.t0_prime);
    return e * e;
  }
  // Product of the jitter Gaussian and the shifted intensity, as a Gaussian in the shift.
  const double D = m.jitter;
  const double p = 1.0 / (D * D) + 2.0 / (w * w);
  const double centre = 2.0 * (t - m.t0_prime) / (w * w) / p;
  const double sigma = std::sqrt(0.5 / p);
  auto f = [&](double shift) {
    const double e = gaussian_wavepacket(t, w, m.t0_prime + shift);
    return timing_gaussian(shift, 0.0, D) * e * e;
  };
  return gaussian_window_sum(f, centre, sigma);
}

}  // namespace

double model_emission_profile(const WavepacketModel& model, double t) {
  model.validate();
  const double e = gaussian_wavepacket(t, model.delta_t, model.t0);
  double v = (1.0 - model.P_cont) * e * e;
  if (model.P_cont > 0) v += model.P_cont * contaminated_intensity(model, t);
  return v;
}

std::vector<double> model_emission_profile(const WavepacketModel& model, const std::vector<double>& t) {
  std::vector<double> out;
  out.reserve(t.size());
  for (double ti : t) out.push_back(model_emission_profile(model, ti));
  return out;
}

namespace {

// Free-parameter layout of the emission fit, in ns.
struct EmissionLayout {
  bool relation;
  bool fix_P;
  bool fit_contaminated;
  double L_ns;
  WavepacketModel base;  // ns units

  // Without the relation delta_t' and the jitter only enter through one combined
  // width, so the jitter stays at its initial value.
  int size() const { return 3 + (fit_contaminated ? 2 : 0) + (fix_P ? 0 : 1); }

  Eigen::VectorXd pack(const WavepacketModel& m, double amplitude) const {
    Eigen::VectorXd x(size());
    int k = 0;
    x[k++] = amplitude;
    x[k++] = m.delta_t;
    x[k++] = m.t0;
    if (fit_contaminated) {
      if (relation) {
        x[k++] = 2.0 * m.t0_prime - L_ns;
        x[k++] = m.jitter;
      } else {
        x[k++] = m.delta_t_prime;
        x[k++] = m.t0_prime;
      }
    }
    if (!fix_P) x[k++] = std::asin(std::sqrt(std::clamp(m.P_cont, 1e-3, 1.0 - 1e-3)));
    return x;
  }

  WavepacketModel unpack(const Eigen::VectorXd& x, double* amplitude) const {
    WavepacketModel m = base;
    int k = 0;
    if (amplitude) *amplitude = x[k];
    ++k;
    m.delta_t = std::abs(x[k++]);
    m.t0 = x[k++];
    if (fit_contaminated) {
      if (relation) {
        const double t_sp = x[k++];
        m.delta_t_prime = std::abs((L_ns - t_sp) / L_ns * m.delta_t);
        m.t0_prime = 0.5 * (L_ns + t_sp);
        m.jitter = std::abs(x[k++]);
      } else {
        m.delta_t_prime = std::abs(x[k++]);
        m.t0_prime = x[k++];
      }
    }
    if (!fix_P) {
      const double s = std::sin(x[k++]);
      m.P_cont = s * s;
    }
    return m;
  }
};

WavepacketModel scaled(WavepacketModel m, double s) {
  m.delta_t *= s;
  m.t0 *= s;
  m.delta_t_prime *= s;
  m.t0_prime *= s;
  m.jitter *= s;
  m.L_ph *= s;
  m.beat_freq /= s;
  return m;
}

}  // namespace

EmissionFit fit_emission_model(const std::vector<double>& t, const std::vector<double>& intensity,
                               const WavepacketModel& initial, const EmissionFitOptions& options) {
  if (t.size() != intensity.size()) throw std::invalid_argument("time and intensity samples differ in length");
  if (t.size() < 20) throw std::invalid_argument("emission fit needs at least 20 samples");
  initial.validate();
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  if (*lo > 0.1 * initial.L_ph || *hi < 0.9 * initial.L_ph)
    throw std::invalid_argument("samples must span the photon window");

  const double to_ns = 1e9;
  std::vector<double> t_ns(t.size());
  std::transform(t.begin(), t.end(), t_ns.begin(), [&](double v) { return v * to_ns; });
  const double peak = *std::max_element(intensity.begin(), intensity.end());
  if (!(peak > 0)) throw std::invalid_argument("intensity samples are all zero");
  // Samples are rescaled so the amplitude parameter is O(1).
  const double norm = peak / gaussian_wavepacket(0.0, initial.delta_t * to_ns, 0.0) /
                      gaussian_wavepacket(0.0, initial.delta_t * to_ns, 0.0);

  EmissionLayout layout{options.enforce_contamination_relation, options.fix_P_cont,
                        !(options.fix_P_cont && initial.P_cont == 0.0), initial.L_ph * to_ns,
                        scaled(initial, to_ns)};

  struct Residual {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    const EmissionLayout* layout;
    const std::vector<double>* t;
    const std::vector<double>* y;
    double norm;
    int inputs() const { return layout->size(); }
    int values() const { return static_cast<int>(t->size()); }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
      double A = 1.0;
      WavepacketModel m = layout->unpack(x, &A);
      m.delta_t = std::max(m.delta_t, 1e-6);
      m.delta_t_prime = std::max(m.delta_t_prime, 1e-6);
      for (std::size_t i = 0; i < t->size(); ++i)
        f[static_cast<Eigen::Index>(i)] = A * model_emission_profile(m, (*t)[i]) - (*y)[i] / norm;
      return 0;
    }
  };
  Residual r{&layout, &t_ns, &intensity, norm};
  Eigen::VectorXd x = layout.pack(layout.base, 1.0);
  Eigen::NumericalDiff<Residual> nd(r);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residual>> lm(nd);
  lm.parameters.xtol = 1e-13;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = options.max_iterations * (layout.size() + 1);
  const auto status = lm.minimize(x);

  double A = 1.0;
  WavepacketModel best = scaled(layout.unpack(x, &A), 1.0 / to_ns);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
      status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation)
    throw FitError("emission-profile fit did not converge", best);

  EmissionFit fit;
  fit.model = best;
  fit.amplitude = A * norm / to_ns;
  fit.iterations = static_cast<int>(lm.iter);
  Eigen::VectorXd f(static_cast<Eigen::Index>(t.size()));
  r(x, f);
  fit.rms_residual = std::sqrt(f.squaredNorm() / static_cast<double>(t.size())) * norm;
  return fit;
}

namespace {

struct Packet {
  double width, centre, norm;  // norm multiplies exp(-((t - centre)/width)^2)
  Packet(double w, double c) : width(w), centre(c), norm(std::pow(2.0 / (kPi * w * w), 0.25)) {}
  double operator()(double t) const {
    const double x = (t - centre) / width;
    return norm * std::exp(-x * x);
  }
};

struct Terms {
  double perp = 0.0;
  double interference = 0.0;  // integral of F(t, tau)
};

// Both coincidence terms at a fixed arrival difference c: centres +c/2 (a) and -c/2 (b).
Terms terms_at(double a, double b, double tau, double c) {
  const Packet A(a, 0.5 * c), B(b, -0.5 * c);
  const double p = 2.0 / (a * a) + 2.0 / (b * b);
  const double sigma = std::sqrt(0.5 / p);
  auto cross = [&](double shiftA, double shiftB) {
    const double centre = (2.0 * (A.centre - shiftA) / (a * a) + 2.0 * (B.centre - shiftB) / (b * b)) / p;
    return gaussian_window_sum(
        [&](double t) {
          const double ea = A(t + shiftA), eb = B(t + shiftB);
          return ea * ea * eb * eb;
        },
        centre, sigma);
  };
  Terms out;
  out.perp = 0.25 * (cross(0.0, tau) + cross(tau, 0.0));
  const double centre = ((2.0 * A.centre - tau) / (a * a) + (2.0 * B.centre - tau) / (b * b)) / p;
  out.interference =
      0.5 * gaussian_window_sum([&](double t) { return A(t) * A(t + tau) * B(t) * B(t + tau); }, centre, sigma);
  return out;
}

Terms jittered_terms(double a, double b, double tau, double offset, double jitter) {
  if (jitter == 0.0) return terms_at(a, b, tau, offset);
  static const Rule outer = composite_rule(-10.0, 10.0, 4);
  const double sigma = jitter / std::sqrt(2.0);
  Terms sum;
  for (std::size_t k = 0; k < outer.x.size(); ++k) {
    const double d = sigma * outer.x[k];
    const double w = outer.w[k] * sigma * timing_gaussian(d, 0.0, jitter);
    const Terms t = terms_at(a, b, tau, offset + d);
    sum.perp += w * t.perp;
    sum.interference += w * t.interference;
  }
  return sum;
}

void check_pair(const GaussianPhoton& a, const GaussianPhoton& b, double jitter) {
  require_width(a.delta_t, "photon width");
  require_width(b.delta_t, "photon width");
  if (jitter < 0) throw std::domain_error("jitter must be non-negative");
}

}  // namespace

CorrelationCurve hom_correlations(const GaussianPhoton& a, const GaussianPhoton& b, double offset, double jitter,
                                  double beat, const std::vector<double>& tau) {
  check_pair(a, b, jitter);
  CorrelationCurve out;
  out.tau = tau;
  out.P_perp.reserve(tau.size());
  out.P_para.reserve(tau.size());
  for (double x : tau) {
    const Terms t = jittered_terms(a.delta_t, b.delta_t, x, offset, jitter);
    out.P_perp.push_back(t.perp);
    out.P_para.push_back(t.perp - t.interference * std::cos(beat * x));
  }
  return out;
}

PairWeights PairWeights::from_contamination(double P_first, double P_second) {
  if (P_first < 0 || P_first > 1 || P_second < 0 || P_second > 1)
    throw std::domain_error("contamination probabilities must lie in [0, 1]");
  return {(1 - P_first) * (1 - P_second), (1 - P_first) * P_second, P_first * (1 - P_second), P_first * P_second};
}

void PairWeights::validate() const {
  for (double w : {clean_clean, clean_contaminated, contaminated_clean, contaminated_contaminated})
    if (w < 0) throw std::invalid_argument("pair weights must be non-negative");
  const double sum = clean_clean + clean_contaminated + contaminated_clean + contaminated_contaminated;
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("pair weights must sum to 1");
}

CorrelationCurve weighted_pair_interference(const WavepacketModel& model, const PairWeights& weights,
                                            const std::vector<double>& tau) {
  model.validate();
  weights.validate();
  CorrelationCurve out;
  out.tau = tau;
  out.P_perp.assign(tau.size(), 0.0);
  out.P_para.assign(tau.size(), 0.0);

  const GaussianPhoton clean = model.clean();
  const GaussianPhoton cont = model.contaminated();
  struct Pair {
    double w;
    const GaussianPhoton *first, *second;
    double jitter;
  };
  const Pair pairs[] = {{weights.clean_clean, &clean, &clean, 0.0},
                        {weights.clean_contaminated, &clean, &cont, model.jitter},
                        {weights.contaminated_clean, &cont, &clean, model.jitter},
                        {weights.contaminated_contaminated, &cont, &cont, std::sqrt(2.0) * model.jitter}};

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double phase = (1.0 - model.beat_fraction) + model.beat_fraction * std::cos(model.beat_freq * tau[i]);
      for (const Pair& p : pairs) {
        if (p.w == 0.0) continue;
        const Terms t = jittered_terms(p.first->delta_t, p.second->delta_t, tau[i], p.first->t0 - p.second->t0, p.jitter);
        out.P_perp[i] += p.w * t.perp;
        out.P_para[i] += p.w * (t.perp - t.interference * phase);
      }
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(tau.size() / 64, 1));
  if (workers == 1) {
    fill(0, tau.size());
  } else {
    // Disjoint index ranges, so no synchronisation beyond the joins.
    std::vector<std::jthread> pool;
    const std::size_t chunk = (tau.size() + workers - 1) / workers;
    for (std::size_t b = 0; b < tau.size(); b += chunk) pool.emplace_back(fill, b, std::min(b + chunk, tau.size()));
  }
  return out;
}

double visibility(const CorrelationCurve& curve, std::optional<double> half_window) {
  const auto& x = curve.tau;
  double perp = 0.0, para = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (half_window && (std::abs(x[i - 1]) > *half_window || std::abs(x[i]) > *half_window)) continue;
    const double h = x[i] - x[i - 1];
    perp += 0.5 * h * (curve.P_perp[i - 1] + curve.P_perp[i]);
    para += 0.5 * h * (curve.P_para[i - 1] + curve.P_para[i]);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("visibility window contains no grid interval");
  if (!(perp > 0)) throw std::domain_error("orthogonal coincidence integral vanishes on the window");
  return 1.0 - para / perp;
}

}  // namespace nlzcav
