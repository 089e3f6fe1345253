#include "qread/quantum_verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qread/errors.hpp"
#include "qread/filter_state.hpp"

namespace qread {

namespace {

constexpr double kPositivityTol = 1e-9;

void check_state(const ConditionalDensityMatrix& rho, std::size_t k) {
  if (rho.f00 < -kPositivityTol || rho.f11 < -kPositivityTol ||
      std::norm(rho.f01) > rho.f00 * rho.f11 + kPositivityTol)
    throw runtime_breach("sme_step: positivity violated at step " + std::to_string(k) +
                         " (dt too large)");
}

}  // namespace

QubitRates::QubitRates(RateSchedule decay_, RateSchedule excitation_, RateSchedule dephasing_,
                       RateSchedule sigma_)
    : decay(std::move(decay_)),
      excitation(std::move(excitation_)),
      dephasing(std::move(dephasing_)),
      sigma(std::move(sigma_)) {
  decay.for_each_value([](double v) {
    if (v < 0.0) throw std::invalid_argument("QubitRates: decay must be >= 0");
  });
  excitation.for_each_value([](double v) {
    if (v < 0.0) throw std::invalid_argument("QubitRates: excitation must be >= 0");
  });
  dephasing.for_each_value([](double v) {
    if (v < 0.0) throw std::invalid_argument("QubitRates: dephasing must be >= 0");
  });
}

void QubitRates::validate(const TimeGrid& grid) const {
  decay.check_grid(grid, "decay");
  excitation.check_grid(grid, "excitation");
  dephasing.check_grid(grid, "dephasing");
  sigma.check_grid(grid, "sigma");
  for (std::size_t k = 0; k < grid.points(); ++k) {
    const double s = sigma.at(k);
    if (dephasing.at(k) < 0.25 * s * s)
      throw std::invalid_argument("QubitRates: dephasing must be >= sigma^2/4 at every point");
  }
}

ConditionalDensityMatrix sme_step(const ConditionalDensityMatrix& rho, const QubitRates& rates,
                                  double dy_k, std::size_t k, double dt) {
  if (!std::isfinite(dy_k)) throw std::invalid_argument("sme_step: nonfinite increment");
  const double dec = rates.decay.at(k);
  const double exc = rates.excitation.at(k);
  const double sig = rates.sigma.at(k);
  const StepMatrix a = rate_step_matrix(dec, exc, dt);

  ConditionalDensityMatrix next = rho;
  // Diagonal block: identical arithmetic to the classical split-step filter.
  const double ln_sum = detail::gaussian_split_step(next.f00, next.f11, a, sig, dy_k, dt);
  // Off-diagonal: d f01 = -[(L- + L+ + Lx)/2] f01 dt + (sigma/2) f01 dy is a
  // scalar geometric motion; apply its exact exponential factor, split the
  // same way as the diagonal (deterministic half, then measurement half).
  const double damp = 0.5 * (dec + exc + rates.dephasing.at(k));
  next.f01 *= std::exp(-dt * damp) * std::exp(0.5 * sig * dy_k - 0.125 * sig * sig * dt);
  // Same trace renormalization as the diagonals.
  next.f01 *= std::exp(-ln_sum);
  next.log_scale += ln_sum;
  check_state(next, k);
  return next;
}

double quantum_estimator(const ConditionalDensityMatrix& rho, double sigma_k) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw std::invalid_argument("quantum_estimator: zero trace");
  return sigma_k * rho.f11 / tr;
}

DecouplingReport decoupling_report(const QubitRates& rates, const GaussianRecord& record,
                                   const ConditionalDensityMatrix& initial) {
  rates.validate(record.grid);
  const double tr0 = initial.trace();
  if (!(tr0 > 0.0)) throw std::invalid_argument("decoupling_report: zero initial trace");

  const auto run_gap = [&](const QubitRates& r) {
    const double dt = record.grid.dt();
    ConditionalDensityMatrix full{initial.f00 / tr0, initial.f11 / tr0, initial.f01 / tr0,
                                  std::log(tr0)};
    // Diagonals-only run: the classical filter stepped identically.
    FilterState diag{full.f00, full.f11, full.log_scale};
    double max_diag = 0.0;
    double max_est = 0.0;
    for (std::size_t k = 0; k < record.grid.steps(); ++k) {
      max_est = std::max(max_est, std::abs(quantum_estimator(full, r.sigma.at(k)) -
                                           estimator_mu(diag, r.sigma.at(k))));
      full = sme_step(full, r, record.dy[k], k, dt);
      const StepMatrix a = rate_step_matrix(r.decay.at(k), r.excitation.at(k), dt);
      diag.log_scale +=
          detail::gaussian_split_step(diag.p0, diag.p1, a, r.sigma.at(k), record.dy[k], dt);
      max_diag = std::max({max_diag, std::abs(full.f00 - diag.p0), std::abs(full.f11 - diag.p1)});
    }
    const std::size_t last = record.grid.steps();
    max_est = std::max(max_est, std::abs(quantum_estimator(full, r.sigma.at(last)) -
                                         estimator_mu(diag, r.sigma.at(last))));
    return std::pair<double, double>{max_diag, max_est};
  };

  DecouplingReport report;
  const auto base = run_gap(rates);
  report.max_offdiag_influence = base.first;
  report.max_estimator_gap = base.second;

  // Sweep the dephasing rate from the minimum allowed sigma^2/4 upward; the
  // estimator gap must not react (it never reads the coherence).
  for (int mult = 1; mult <= 10; ++mult) {
    std::vector<double> lx(record.grid.points());
    for (std::size_t k = 0; k < record.grid.points(); ++k) {
      const double s = rates.sigma.at(k);
      lx[k] = 0.25 * s * s * static_cast<double>(mult);
    }
    QubitRates swept(rates.decay, rates.excitation, RateSchedule(std::move(lx)), rates.sigma);
    report.sweep.emplace_back(static_cast<double>(mult), run_gap(swept).second);
  }
  return report;
}

}  // namespace qread
