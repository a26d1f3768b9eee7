#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlzcav {

/// Normalised Gaussian amplitude (2/(pi dt^2))^(1/4) exp(-((t - t0)/dt)^2), in s^(-1/2).
double gaussian_wavepacket(double t, double delta_t, double t0);

/// Normalised timing distribution exp(-((t - t0)/width)^2) / (width sqrt(pi)).
double timing_gaussian(double t, double t0, double width);

struct GaussianPhoton {
  double delta_t = 0.0;  // s
  double t0 = 0.0;       // s
};

/// Clean and contaminated photon shapes plus the statistics tying them together.
struct WavepacketModel {
  double delta_t = 0.0;
  double t0 = 0.0;
  double delta_t_prime = 0.0;
  double t0_prime = 0.0;
  double jitter = 0.0;          // Delta tau', width of the contaminated emission-time spread
  double P_cont = 0.0;
  double L_ph = 0.0;
  double beat_fraction = 0.0;   // share of pairs carrying a frequency difference
  double beat_freq = 0.0;       // rad/s

  /// The fitted emission parameters of the 300 ns D2 photons with the given
  /// contamination probability.
  static WavepacketModel fitted_d2(double P_cont);

  GaussianPhoton clean() const { return {delta_t, t0}; }
  GaussianPhoton contaminated() const { return {delta_t_prime, t0_prime}; }
  void validate() const;
};

/// JSON with times in ns and the beat frequency in MHz (/2pi).
std::string wavepacket_model_to_json(const WavepacketModel& model);
WavepacketModel wavepacket_model_from_json(const std::string& text);

struct ContaminatedParams {
  double delta_t_prime = 0.0;
  double t0_prime = 0.0;
};

/// Shortened, delayed profile of a photon emitted after a spontaneous reset at t_sp.
ContaminatedParams contaminated_params(double delta_t, double t0, double L_ph, double t_sp);

struct SpontaneousTiming {
  std::vector<double> t;
  std::vector<double> P_sp_before;  // probability the last spontaneous event happened before t
  std::vector<double> P_sp_final;   // density of the last spontaneous event at t
  std::vector<double> P_emm;        // normalised density of a cavity emission following a reset at t
  double t_sp = 0.0;
  double jitter = 0.0;              // Delta tau'
  double rms_residual = 0.0;
};

/// Spontaneous events follow sin^4(pi t / L_ph); psi_sq is the photon intensity
/// profile on [0, L_ph]. The emission-start density is fitted by a timing_gaussian.
SpontaneousTiming spontaneous_timing(double L_ph, const std::function<double(double)>& psi_sq,
                                     std::size_t samples = 601);

struct ContaminationInputs {
  double eta_plus = 0.0;
  double eta_minus = 0.0;
  double F_P_plus = 0.0;
  double F_P_minus = 0.0;
  double decay_plus = 0.0;   // probability a spontaneous decay lands in |F_g=1, m=+1>
  double decay_minus = 0.0;  // ... in |F_g=1, m=-1>
};

/// Probability that the next photon of one polarisation follows a spontaneous reset.
double contamination_single(double F_P, double decay);

/// Efficiency-weighted contamination probability over both polarisations.
double contamination_probability(const ContaminationInputs& in);

/// Normalised intensity of the mixed clean / contaminated emission.
double model_emission_profile(const WavepacketModel& model, double t);
std::vector<double> model_emission_profile(const WavepacketModel& model, const std::vector<double>& t);

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, WavepacketModel last) : std::runtime_error(what), last_iterate(last) {}
  WavepacketModel last_iterate;
};

struct EmissionFitOptions {
  /// Tie delta_t' and t0' to a single reset time t_sp and fit the jitter. Otherwise
  /// delta_t' and t0' are free and the jitter is held at its initial value.
  bool enforce_contamination_relation = false;
  /// Hold P_cont at the initial value (contaminated parameters are then fixed too when it is 0).
  bool fix_P_cont = false;
  int max_iterations = 2000;
};

struct EmissionFit {
  WavepacketModel model;
  double amplitude = 1.0;  // intensity scale of the samples relative to a unit-area profile
  double rms_residual = 0.0;
  int iterations = 0;
};

/// Damped least squares of amplitude * model_emission_profile against the samples.
/// initial supplies the starting point and L_ph.
EmissionFit fit_emission_model(const std::vector<double>& t, const std::vector<double>& intensity,
                               const WavepacketModel& initial, const EmissionFitOptions& options = {});

struct CorrelationCurve {
  std::vector<double> tau;
  std::vector<double> P_perp;
  std::vector<double> P_para;
};

/// Coincidence densities for two Gaussian photons whose arrival difference is
/// offset plus a Gaussian jitter of width `jitter`. A nonzero beat multiplies the
/// interference term by cos(beat tau).
CorrelationCurve hom_correlations(const GaussianPhoton& a, const GaussianPhoton& b, double offset, double jitter,
                                  double beat, const std::vector<double>& tau);

struct PairWeights {
  double clean_clean = 1.0;
  double clean_contaminated = 0.0;
  double contaminated_clean = 0.0;
  double contaminated_contaminated = 0.0;

  /// Independent contamination of the first and second photon.
  static PairWeights from_contamination(double P_first, double P_second);
  void validate() const;
};

/// Convex combination of the four pair scenarios. Contaminated photons carry the
/// model's emission-time jitter; the beat population is mixed in per scenario.
CorrelationCurve weighted_pair_interference(const WavepacketModel& model, const PairWeights& weights,
                                            const std::vector<double>& tau);

/// 1 - integral(P_para) / integral(P_perp) over |tau| <= half_window (full grid if empty).
double visibility(const CorrelationCurve& curve, std::optional<double> half_window = std::nullopt);

}  // namespace nlzcav
