#pragma once

#include <complex>
#include <vector>

#include "qread/core_model.hpp"
#include "qread/gaussian_channel.hpp"

namespace qread {

// Unnormalized conditional density matrix of the qubit, trace-normalized
// after every step with the scale carried in log_scale. f10 is the conjugate
// of f01 and is not stored.
struct ConditionalDensityMatrix {
  double f00 = 0.0;
  double f11 = 0.0;
  std::complex<double> f01{0.0, 0.0};
  double log_scale = 0.0;

  double trace() const { return f00 + f11; }
};

// Rates of the continuous measurement master equation. The dephasing rate
// must dominate sigma^2/4 pointwise.
struct QubitRates {
  RateSchedule decay;
  RateSchedule excitation;
  RateSchedule dephasing;
  RateSchedule sigma;

  QubitRates(RateSchedule decay_, RateSchedule excitation_, RateSchedule dephasing_,
             RateSchedule sigma_);
  void validate(const TimeGrid& grid) const;
};

// One update of the linear stochastic master equation. The diagonal pair is
// stepped through exactly the same split-step arithmetic as the classical
// filter; the off-diagonal gets the exact exponential of its decoupled linear
// dynamics. Errors out if positivity degrades beyond tolerance (dt too
// coarse).
ConditionalDensityMatrix sme_step(const ConditionalDensityMatrix& rho, const QubitRates& rates,
                                  double dy_k, std::size_t k, double dt);

// sigma * f11 / (f00 + f11); reads only the diagonal.
double quantum_estimator(const ConditionalDensityMatrix& rho, double sigma_k);

struct DecouplingReport {
  // Largest diagonal difference between the full master equation and a
  // diagonals-only (classical) integration of the same record.
  double max_offdiag_influence = 0.0;
  // Largest gap between the quantum and classical estimators along the run.
  double max_estimator_gap = 0.0;
  // (dephasing multiplier of sigma^2/4, max estimator gap) over a sweep.
  std::vector<std::pair<double, double>> sweep;
};

// Integrates the master equation and its classical diagonal restriction over
// one record and reports how much the coherence could have influenced the
// readout estimate (analytically: not at all).
DecouplingReport decoupling_report(const QubitRates& rates, const GaussianRecord& record,
                                   const ConditionalDensityMatrix& initial);

}  // namespace qread
