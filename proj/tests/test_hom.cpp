#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlzcav/atomstruct.hpp"
#include "nlzcav/hom.hpp"
#include "oracles.hpp"

using namespace nlzcav;

namespace {

constexpr double ns = 1e-9;

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
  return g;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return s;
}

}  // namespace

TEST(Wavepacket, NormalisedGaussians) {
  const auto t = grid(-1000 * ns, 1000 * ns, 0.5 * ns);
  std::vector<double> i1, g;
  for (double x : t) {
    const double e = gaussian_wavepacket(x, 97.4 * ns, 30 * ns);
    i1.push_back(e * e);
    g.push_back(timing_gaussian(x, -20 * ns, 45 * ns));
  }
  EXPECT_NEAR(trapezoid(t, i1), 1.0, 1e-10);
  EXPECT_NEAR(trapezoid(t, g), 1.0, 1e-10);
  EXPECT_NEAR(timing_gaussian(25 * ns, -20 * ns, 45 * ns) / timing_gaussian(-20 * ns, -20 * ns, 45 * ns), std::exp(-1.0),
              1e-14);
  EXPECT_NEAR(gaussian_wavepacket(0, 1, 0), std::pow(2 / std::numbers::pi, 0.25), 1e-15);
  EXPECT_THROW(gaussian_wavepacket(0, 0, 0), std::domain_error);
  EXPECT_THROW(timing_gaussian(0, 0, -1), std::domain_error);
}

TEST(Contamination, ShortenedDelayedProfile) {
  const auto p = contaminated_params(97.4 * ns, 129.5 * ns, 300 * ns, 153.4 * ns);
  EXPECT_NEAR(p.delta_t_prime / ns, 47.6, 0.1);
  EXPECT_NEAR(p.t0_prime / ns, 226.7, 0.1);
  const auto early = contaminated_params(97.4 * ns, 129.5 * ns, 300 * ns, 1e-6 * ns);
  EXPECT_NEAR(early.delta_t_prime / ns, 97.4, 1e-6);
  EXPECT_NEAR(early.t0_prime / ns, 150.0, 1e-6);
  EXPECT_THROW(contaminated_params(97.4 * ns, 0, 300 * ns, 300 * ns), std::domain_error);
  EXPECT_THROW(contaminated_params(97.4 * ns, 0, 300 * ns, 0.0), std::domain_error);
}

TEST(Contamination, SingleAndWeighted) {
  EXPECT_DOUBLE_EQ(contamination_single(0.0, 0.4), 0.4);
  EXPECT_DOUBLE_EQ(contamination_single(3.0, 0.4), 0.1);
  EXPECT_EQ(contamination_single(5.0, 0.0), 0.0);
  EXPECT_THROW(contamination_single(-1.0, 0.1), std::domain_error);
  EXPECT_THROW(contamination_single(1.0, 1.5), std::domain_error);
  const ContaminationInputs in{0.6, 0.2, 3.0, 1.0, 0.4, 0.5};
  EXPECT_NEAR(contamination_probability(in), 0.75 * 0.1 + 0.25 * 0.25, 1e-15);
  EXPECT_THROW(contamination_probability(ContaminationInputs{}), std::domain_error);
}

TEST(SpontaneousTiming, CumulativeMatchesClosedForm) {
  const double L = 300 * ns;
  auto psi = [](double t) {
    const double e = gaussian_wavepacket(t, 97.4 * ns, 129.5 * ns);
    return e * e;
  };
  const auto st = spontaneous_timing(L, psi);
  ASSERT_EQ(st.t.size(), 601u);
  for (std::size_t i = 0; i < st.t.size(); i += 20) {
    const double c = oracle::sin4_cdf(st.t[i], L);
    EXPECT_NEAR(st.P_sp_before[i], c * c, 1e-12);
  }
  EXPECT_NEAR(trapezoid(st.t, st.P_emm), 1.0, 1e-12);
  EXPECT_NEAR(trapezoid(st.t, st.P_sp_final), 1.0, 1e-5);
  EXPECT_GT(st.t_sp, 0.25 * L);
  EXPECT_LT(st.t_sp, 0.75 * L);
  EXPECT_GT(st.jitter, 0.0);
  EXPECT_LT(st.rms_residual * L, 0.05 * timing_gaussian(0, 0, st.jitter) * L);
  EXPECT_THROW(spontaneous_timing(L, [](double) { return 0.0; }), std::invalid_argument);
  EXPECT_THROW(spontaneous_timing(L, psi, 2), std::invalid_argument);
}

TEST(EmissionProfile, NormalisedMixture) {
  const auto t = grid(-300 * ns, 800 * ns, 0.5 * ns);
  for (double P : {0.0, 0.12, 1.0}) {
    const auto m = WavepacketModel::fitted_d2(P);
    EXPECT_NEAR(trapezoid(t, model_emission_profile(m, t)), 1.0, 1e-8) << P;
  }
  const auto pure = WavepacketModel::fitted_d2(0.0);
  for (double x : {0.0, 100 * ns, 250 * ns}) {
    const double e = gaussian_wavepacket(x, pure.delta_t, pure.t0);
    EXPECT_DOUBLE_EQ(model_emission_profile(pure, x), e * e);
  }
}

TEST(EmissionProfile, JitterBroadensContaminatedPart) {
  // A Gaussian start-time spread convolves the contaminated intensity.
  auto m = WavepacketModel::fitted_d2(1.0);
  const double var = m.delta_t_prime * m.delta_t_prime / 4 + m.jitter * m.jitter / 2;
  for (double x : {150 * ns, 226.7 * ns, 300 * ns}) {
    const double ref =
        std::exp(-(x - m.t0_prime) * (x - m.t0_prime) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
    EXPECT_NEAR(model_emission_profile(m, x), ref, 1e-9 * ref);
  }
}

TEST(EmissionFit, NoiselessRoundTrip) {
  const auto truth = WavepacketModel::fitted_d2(0.12);
  const auto t = grid(0, 300 * ns, 1 * ns);
  auto y = model_emission_profile(truth, t);
  for (double& v : y) v *= 3.5;
  auto start = truth;
  start.delta_t *= 1.05;
  start.t0 *= 0.97;
  start.t0_prime *= 1.03;
  start.P_cont = 0.2;
  const auto fit = fit_emission_model(t, y, start);
  EXPECT_LT(fit.rms_residual, 1e-8 * *std::max_element(y.begin(), y.end()));
  EXPECT_NEAR(fit.amplitude, 3.5, 1e-5);
  EXPECT_NEAR(fit.model.delta_t / ns, 97.4, 1e-3);
  EXPECT_NEAR(fit.model.t0 / ns, 129.5, 1e-3);
  EXPECT_NEAR(fit.model.t0_prime / ns, 226.7, 1e-3);
  EXPECT_NEAR(fit.model.P_cont, 0.12, 1e-5);
  // Only the combined width of the contaminated part is identifiable.
  auto combined = [](const WavepacketModel& m) {
    return m.delta_t_prime * m.delta_t_prime / 4 + m.jitter * m.jitter / 2;
  };
  EXPECT_NEAR(combined(fit.model) / combined(truth), 1.0, 1e-4);
}

TEST(EmissionFit, NoisyRecovery) {
  const auto truth = WavepacketModel::fitted_d2(0.12);
  const auto t = grid(0, 300 * ns, 1 * ns);
  auto y = model_emission_profile(truth, t);
  const double peak = *std::max_element(y.begin(), y.end());
  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 0.01 * peak);
  for (double& v : y) v += noise(rng);
  EmissionFitOptions opt;
  opt.enforce_contamination_relation = true;
  const auto fit = fit_emission_model(t, y, truth, opt);
  EXPECT_NEAR(fit.model.delta_t / truth.delta_t, 1.0, 0.05);
  EXPECT_NEAR(fit.model.t0 / truth.t0, 1.0, 0.05);
  EXPECT_LT(fit.rms_residual, 0.015 * peak);
}

TEST(EmissionFit, FixedPureModel) {
  const auto truth = WavepacketModel::fitted_d2(0.0);
  const auto t = grid(0, 300 * ns, 2 * ns);
  const auto y = model_emission_profile(truth, t);
  auto start = truth;
  start.delta_t = 80 * ns;
  start.t0 = 140 * ns;
  EmissionFitOptions opt;
  opt.fix_P_cont = true;
  const auto fit = fit_emission_model(t, y, start, opt);
  EXPECT_EQ(fit.model.P_cont, 0.0);
  EXPECT_NEAR(fit.model.delta_t / ns, 97.4, 1e-5);
  EXPECT_NEAR(fit.model.t0 / ns, 129.5, 1e-5);
}

TEST(EmissionFit, RejectsBadSamples) {
  const auto m = WavepacketModel::fitted_d2(0.1);
  const auto t = grid(0, 300 * ns, 10 * ns);
  const auto y = model_emission_profile(m, t);
  EXPECT_THROW(fit_emission_model(t, std::vector<double>(t.size() - 1, 1.0), m), std::invalid_argument);
  EXPECT_THROW(fit_emission_model(grid(0, 100 * ns, 1 * ns), std::vector<double>(101, 1.0), m), std::invalid_argument);
  EXPECT_THROW(fit_emission_model(t, std::vector<double>(t.size(), 0.0), m), std::invalid_argument);
  EXPECT_NO_THROW(fit_emission_model(t, y, m));
}

TEST(HomCorrelations, MatchesEqualWidthClosedForm) {
  const auto tau = grid(-600 * ns, 600 * ns, 7 * ns);
  const double dt = 97.4 * ns;
  const double beat = mhz_to_angular(15.0);
  for (double offset : {0.0, 60 * ns})
    for (double D : {0.0, 45 * ns, 90 * ns}) {
      const auto c = hom_correlations({dt, 0}, {dt, 0}, offset, D, beat, tau);
      const double scale = oracle::hom_perp(0, dt, 0, 0);
      for (std::size_t i = 0; i < tau.size(); ++i) {
        EXPECT_NEAR(c.P_perp[i], oracle::hom_perp(tau[i], dt, offset, D), 1e-9 * scale);
        EXPECT_NEAR(c.P_para[i], oracle::hom_para(tau[i], dt, offset, D, beat), 1e-9 * scale);
      }
    }
}

TEST(HomCorrelations, Invariants) {
  const auto tau = grid(-1500 * ns, 1500 * ns, 1 * ns);
  const GaussianPhoton a{97.4 * ns, 0}, b{47.6 * ns, 0};
  const auto c = hom_correlations(a, b, 97.2 * ns, 45 * ns, 0.0, tau);
  EXPECT_NEAR(trapezoid(tau, c.P_perp), 0.5, 1e-6);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    EXPECT_GE(c.P_para[i], -1e-15 * c.P_perp[i]);
    EXPECT_LE(c.P_para[i], c.P_perp[i] * (1 + 1e-12));
    const std::size_t j = tau.size() - 1 - i;
    EXPECT_NEAR(c.P_perp[i], c.P_perp[j], 1e-12 * c.P_perp[tau.size() / 2]);
    EXPECT_NEAR(c.P_para[i], c.P_para[j], 1e-12 * c.P_perp[tau.size() / 2]);
  }
  EXPECT_NEAR(visibility(c), oracle::pair_visibility(97.4 * ns, 47.6 * ns, 97.2 * ns, 45 * ns), 1e-6);
  EXPECT_THROW(hom_correlations(a, {0, 0}, 0, 0, 0, tau), std::domain_error);
  EXPECT_THROW(hom_correlations(a, b, 0, -1, 0, tau), std::domain_error);
}

TEST(HomCorrelations, IdenticalPhotonsAreIndistinguishable) {
  const auto tau = grid(-800 * ns, 800 * ns, 1 * ns);
  const auto c = hom_correlations({97.4 * ns, 0}, {97.4 * ns, 0}, 0, 0, 0, tau);
  EXPECT_NEAR(visibility(c), 1.0, 1e-9);
  EXPECT_NEAR(c.P_para[tau.size() / 2], 0.0, 1e-20);
}

TEST(HomCorrelations, JitterWashesOutInterference) {
  const auto tau = grid(-3000 * ns, 3000 * ns, 2 * ns);
  double last = 2.0;
  for (double D : {0.0, 20 * ns, 50 * ns, 100 * ns, 300 * ns, 1000 * ns}) {
    const double v = visibility(hom_correlations({97.4 * ns, 0}, {97.4 * ns, 0}, 0, D, 0, tau));
    EXPECT_LT(v, last);
    last = v;
  }
  EXPECT_LT(last, 0.1);
}

TEST(PairWeights, Construction) {
  const auto w = PairWeights::from_contamination(0.1, 0.3);
  EXPECT_NEAR(w.clean_clean, 0.63, 1e-15);
  EXPECT_NEAR(w.clean_contaminated, 0.27, 1e-15);
  EXPECT_NEAR(w.contaminated_clean, 0.07, 1e-15);
  EXPECT_NEAR(w.contaminated_contaminated, 0.03, 1e-15);
  EXPECT_NO_THROW(w.validate());
  EXPECT_THROW(PairWeights::from_contamination(-0.1, 0.3), std::domain_error);
  EXPECT_THROW((PairWeights{0.5, 0.5, 0.5, -0.5}.validate()), std::invalid_argument);
  EXPECT_THROW((PairWeights{0.5, 0.1, 0.1, 0.1}.validate()), std::invalid_argument);
}

TEST(WeightedInterference, CleanPairsOnly) {
  const auto tau = grid(-600 * ns, 600 * ns, 5 * ns);
  const auto m = WavepacketModel::fitted_d2(0.0);
  const auto w = weighted_pair_interference(m, PairWeights::from_contamination(0, 0), tau);
  const auto c = hom_correlations(m.clean(), m.clean(), 0, 0, 0, tau);
  for (std::size_t i = 0; i < tau.size(); ++i) {
    EXPECT_DOUBLE_EQ(w.P_perp[i], c.P_perp[i]);
    EXPECT_DOUBLE_EQ(w.P_para[i], c.P_para[i]);
  }
}

TEST(WeightedInterference, VisibilityIsWeightedPairSum) {
  const auto tau = grid(-2500 * ns, 2500 * ns, 1 * ns);
  const auto m = WavepacketModel::fitted_d2(0.12);
  const auto w = PairWeights::from_contamination(0.12, 0.12);
  const double off = m.t0 - m.t0_prime;
  const double ref =
      w.clean_clean * 1.0 +
      (w.clean_contaminated + w.contaminated_clean) * oracle::pair_visibility(m.delta_t, m.delta_t_prime, off, m.jitter) +
      w.contaminated_contaminated * oracle::pair_visibility(m.delta_t_prime, m.delta_t_prime, 0, std::sqrt(2.0) * m.jitter);
  EXPECT_NEAR(visibility(weighted_pair_interference(m, w, tau)), ref, 1e-6);
}

TEST(WeightedInterference, BeatPopulation) {
  const auto tau = grid(-1500 * ns, 1500 * ns, 0.5 * ns);
  auto m = WavepacketModel::fitted_d2(0.0);
  m.beat_fraction = 0.09;
  m.beat_freq = mhz_to_angular(15.0);
  const auto c = weighted_pair_interference(m, PairWeights{}, tau);
  const double wd = m.beat_freq * m.delta_t;
  EXPECT_NEAR(visibility(c), 1 - m.beat_fraction + m.beat_fraction * std::exp(-wd * wd / 4), 1e-6);
  auto plain = m;
  plain.beat_fraction = 0;
  const auto p = weighted_pair_interference(plain, PairWeights{}, tau);
  for (std::size_t i = 0; i < tau.size(); ++i) EXPECT_GE(c.P_para[i] - p.P_para[i], -1e-15 * c.P_perp[i]);
}

TEST(Visibility, WindowHandling) {
  CorrelationCurve c{{-1, 0, 1}, {1, 1, 1}, {0.5, 0.5, 0.5}};
  EXPECT_DOUBLE_EQ(visibility(c), 0.5);
  EXPECT_DOUBLE_EQ(visibility(c, 1.0), 0.5);
  EXPECT_THROW(visibility(c, 0.5), std::invalid_argument);
  CorrelationCurve z{{-1, 1}, {0, 0}, {0, 0}};
  EXPECT_THROW(visibility(z), std::domain_error);
}

TEST(WavepacketJson, RoundTripAndErrors) {
  auto m = WavepacketModel::fitted_d2(0.1228);
  m.beat_fraction = 0.09;
  m.beat_freq = mhz_to_angular(15);
  const auto back = wavepacket_model_from_json(wavepacket_model_to_json(m));
  EXPECT_DOUBLE_EQ(back.delta_t, m.delta_t);
  EXPECT_DOUBLE_EQ(back.t0_prime, m.t0_prime);
  EXPECT_DOUBLE_EQ(back.jitter, m.jitter);
  EXPECT_DOUBLE_EQ(back.P_cont, m.P_cont);
  EXPECT_DOUBLE_EQ(back.beat_freq, m.beat_freq);
  EXPECT_THROW(wavepacket_model_from_json("{"), ConfigError);
  EXPECT_THROW(wavepacket_model_from_json(R"({"delta_t_ns": 1})"), ConfigError);
  EXPECT_THROW(wavepacket_model_from_json(
                   R"({"delta_t_ns": 97, "t0_ns": 1, "delta_t_prime_ns": 40, "t0_prime_ns": 1, "jitter_ns": 1, "P_cont": 2, "L_ph_ns": 300})"),
               ConfigError);
  EXPECT_THROW(wavepacket_model_from_json(
                   R"({"delta_t_ns": "x", "t0_ns": 1, "delta_t_prime_ns": 40, "t0_prime_ns": 1, "jitter_ns": 1, "P_cont": 0, "L_ph_ns": 300})"),
               ConfigError);
}
