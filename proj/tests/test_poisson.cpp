#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qread/errors.hpp"
#include "qread/poisson_channel.hpp"
#include "qread/rng.hpp"

using namespace qread;

namespace {

HypothesisModel make_model(RateSchedule decay, RateSchedule excitation, RateSchedule alpha,
                           std::array<double, 2> init) {
  return HypothesisModel("p", std::move(decay), std::move(excitation), std::move(alpha), init);
}

CountRecord random_record(const HypothesisModel& model, const RateSchedule& lambda0,
                          const TimeGrid& grid, std::uint64_t seed) {
  return simulate_poisson(model, sample_trajectory(model, grid, mix64(seed + 2)), lambda0,
                          mix64(seed + 3));
}

std::size_t total_counts(const CountRecord& record) {
  std::size_t n = 0;
  for (auto d : record.dn) n += d;
  return n;
}

}  // namespace

TEST_SUITE_BEGIN("poisson_channel");

TEST_CASE("flat intensity gives the homogeneous Poisson count") {
  const TimeGrid grid(1.0, 200);
  const double lam0 = 2.0;
  const auto model = make_model(0.0, 0.0, 0.0, {1.0, 0.0});
  const std::size_t n = 100000;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += static_cast<double>(total_counts(random_record(model, lam0, grid, 300 + 16 * i)));
  const double mean = sum / static_cast<double>(n);
  CHECK(std::abs(mean - lam0 * grid.horizon()) <=
        3.0 * std::sqrt(lam0 * grid.horizon() / static_cast<double>(n)));
}

TEST_CASE("contrast near -1 extinguishes the intensity") {
  const TimeGrid grid(1.0, 100);
  const auto model = make_model(0.0, 0.0, -1.0 + 1e-9, {0.0, 1.0});
  std::size_t total = 0;
  for (int i = 0; i < 200; ++i) total += total_counts(random_record(model, 1.0, grid, 900 + i));
  CHECK(total == 0);
}

TEST_CASE("expected count follows the propagated occupation") {
  const TimeGrid grid(1.0, 100);
  const double lam0 = 3.0, alpha = 1.5;
  const auto model = make_model(1.0, 0.0, alpha, {0.0, 1.0});
  const auto probs = kolmogorov_propagate(model, grid);
  double expected = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k)
    expected += lam0 * (1.0 + alpha * probs[k][1]) * grid.dt();
  const std::size_t n = 100000;
  std::vector<double> counts(n);
  for (std::size_t i = 0; i < n; ++i)
    counts[i] = static_cast<double>(total_counts(random_record(model, lam0, grid, 2000 + 16 * i)));
  const double se = std::sqrt(oracles::sample_variance(counts) / static_cast<double>(n));
  CHECK(std::abs(oracles::mean(counts) - expected) <= 3.0 * se);
}

TEST_CASE("zero contrast makes the split step a no-op") {
  const auto model = make_model(0.0, 0.0, 0.0, {0.4, 0.6});
  const FilterState next =
      poisson_dmz_step(FilterState{0.4, 0.6, 0.0}, model, 2.0, 1, 0, 0.01, 2.0);
  CHECK(next.p0 == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(next.p1 == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(next.log_scale == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("degenerate excited state with no counts accumulates -lambda0 alpha T") {
  const TimeGrid grid(2.0, 400);
  const double lam0 = 1.3, alpha = 0.8;
  const auto model = make_model(0.0, 0.0, alpha, {0.0, 1.0});
  FilterState state{0.0, 1.0, 0.0};
  for (std::size_t k = 0; k < grid.steps(); ++k)
    state = poisson_dmz_step(state, model, lam0, 0, k, grid.dt(), lam0);
  CHECK(state.p1 == 1.0);
  CHECK(state.log_scale == doctest::Approx(-lam0 * alpha * grid.horizon()).epsilon(1e-10));
}

TEST_CASE("ground state is absorbing under pure decay") {
  const TimeGrid grid(1.0, 300);
  const double lam0 = 2.0;
  const auto model = make_model(1.0, 0.0, 1.0, {1.0, 0.0});
  const auto record = random_record(model, lam0, grid, 3000);
  const auto run = poisson_filter_numeric(model, record);
  CHECK(run.states.back().p0 == 1.0);
  CHECK(run.states.back().p1 == 0.0);
  CHECK(run.states.back().log_scale == 0.0);
  CHECK(run.trace.llr.back() == 0.0);
}

TEST_CASE("no-excitation closed form matches the decay integral") {
  const TimeGrid grid(1.0, 1000);
  const auto model = make_model(1.0, 0.0, 1.0, {0.0, 1.0});
  CountRecord record{grid, std::vector<std::uint8_t>(grid.steps(), 0), 1.0};
  const auto run = poisson_solve_no_excitation(model, record);
  const FilterState& last = run.states.back();
  const double p1_raw = last.p1 * std::exp(last.log_scale);
  const double p0_raw = last.p0 * std::exp(last.log_scale);
  const double expected_p1 = std::exp(-2.0);
  const double expected_p0 = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(std::abs(p1_raw - expected_p1) / expected_p1 <= 2.0 * grid.dt());
  CHECK(std::abs(p0_raw - expected_p0) / expected_p0 <= 2.0 * grid.dt());
}

TEST_CASE("no-decay closed form matches the shifted exponential") {
  const TimeGrid grid(1.0, 1000);
  const auto model = make_model(0.0, 1.0, 1.0, {1.0, 0.0});
  CountRecord record{grid, std::vector<std::uint8_t>(grid.steps(), 0), 1.0};
  const auto run = poisson_solve_no_decay(model, record);
  const FilterState& last = run.states.back();
  const double p0_raw = last.p0 * std::exp(last.log_scale);
  CHECK(std::abs(p0_raw - 1.0) <= 2.0 * grid.dt());
}

TEST_CASE("closed forms and split step converge at first order") {
  Rng pick(171);
  std::vector<double> ratios_nx, ratios_nd;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t k_fine = 8000;
    const TimeGrid fine_grid(1.0, k_fine);
    const double lam0 = 1.0 + pick.uniform();
    const double alpha = 0.5 + pick.uniform();
    const double rate = 0.5 + pick.uniform();
    {
      const auto model = make_model(rate, 0.0, alpha, {0.2, 0.8});
      const auto fine = random_record(model, lam0, fine_grid, 400 + rep);
      const auto coarse = oracles::coarsen(fine);
      const double d_fine = oracles::max_abs_diff(
          poisson_solve_no_excitation(model, fine).trace.nu,
          poisson_filter_numeric(model, fine).trace.nu);
      const double d_coarse = oracles::max_abs_diff(
          poisson_solve_no_excitation(model, coarse).trace.nu,
          poisson_filter_numeric(model, coarse).trace.nu);
      ratios_nx.push_back(d_coarse / d_fine);
    }
    {
      const auto model = make_model(0.0, rate, alpha, {0.8, 0.2});
      const auto fine = random_record(model, lam0, fine_grid, 500 + rep);
      const auto coarse = oracles::coarsen(fine);
      const double d_fine = oracles::max_abs_diff(poisson_solve_no_decay(model, fine).trace.nu,
                                                  poisson_filter_numeric(model, fine).trace.nu);
      const double d_coarse =
          oracles::max_abs_diff(poisson_solve_no_decay(model, coarse).trace.nu,
                                poisson_filter_numeric(model, coarse).trace.nu);
      ratios_nd.push_back(d_coarse / d_fine);
    }
  }
  CHECK(oracles::median(ratios_nx) > 1.7);
  CHECK(oracles::median(ratios_nx) < 2.3);
  CHECK(oracles::median(ratios_nd) > 1.7);
  CHECK(oracles::median(ratios_nd) < 2.3);
}

TEST_CASE("zero contrast gives an identically zero llr") {
  const TimeGrid grid(1.0, 200);
  const auto model = make_model(1.0, 0.5, 0.0, {0.5, 0.5});
  const auto record = random_record(model, 2.0, grid, 4000);
  const auto trace = llr_poisson(model, record);
  for (double v : trace.llr) CHECK(v == 0.0);
}

TEST_CASE("deterministic llr counts photons against the null") {
  const TimeGrid grid(1.0, 500);
  const double lam0 = 2.0, alpha = 1.2;
  const auto model = make_model(0.0, 0.0, alpha, {0.0, 1.0});
  const auto record = random_record(model, lam0, grid, 5000);
  const auto trace = llr_poisson(model, record);
  const double expected = static_cast<double>(total_counts(record)) * std::log1p(alpha) -
                          lam0 * alpha * grid.horizon();
  CHECK(trace.llr.back() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Zakai mass tracks the llr on generic models") {
  const std::size_t k_steps = 100000;
  const TimeGrid grid(1.0, k_steps);
  Rng pick(191);
  for (int rep = 0; rep < 3; ++rep) {
    const double alpha = rep == 0 ? -0.5 : 0.5 + pick.uniform();  // include a negative contrast
    const auto model =
        make_model(0.2 + pick.uniform(), 0.2 + pick.uniform(), alpha, {0.5, 0.5});
    const auto record = random_record(model, 1.0 + pick.uniform(), grid, 6000 + rep);
    const auto run = poisson_filter_numeric(model, record);
    CHECK(std::abs(run.states.back().log_scale - run.trace.llr.back()) <=
          1e-8 * static_cast<double>(k_steps));
  }
}

TEST_CASE("reference intensity kappa only rescales the bookkeeping") {
  const TimeGrid grid(1.0, 2000);
  const double lam0 = 1.7;
  const auto model = make_model(0.8, 0.6, 1.1, {0.5, 0.5});
  const auto record = random_record(model, lam0, grid, 7000);
  const auto base = poisson_filter_numeric(model, record);
  for (double kappa : {0.37, 3.4}) {
    const RateSchedule kap(kappa);
    const auto alt = poisson_filter_numeric(model, record, &kap);
    for (std::size_t k = 0; k < base.states.size(); ++k) {
      CHECK(std::abs(alt.states[k].p1 - base.states[k].p1) <= 1e-9);
      CHECK(std::abs(alt.trace.nu[k] - base.trace.nu[k]) <= 1e-9);
    }
    CHECK(std::abs(alt.states.back().log_scale - base.states.back().log_scale) <= 1e-9);
  }
}

TEST_CASE("estimator stays inside the contrast range") {
  const TimeGrid grid(1.0, 2000);
  Rng pick(201);
  for (int rep = 0; rep < 4; ++rep) {
    const double alpha = rep % 2 == 0 ? 1.4 : -0.6;
    const auto model =
        make_model(0.5 + pick.uniform(), 0.5 + pick.uniform(), alpha, {0.4, 0.6});
    const auto record = random_record(model, 1.5, grid, 8000 + rep);
    const auto run = poisson_filter_numeric(model, record);
    const double lo = std::min(0.0, alpha), hi = std::max(0.0, alpha);
    for (double nu : run.trace.nu) {
      CHECK(nu >= lo - 1e-12);
      CHECK(nu <= hi + 1e-12);
    }
  }
}

TEST_CASE("limit transform arithmetic") {
  const TimeGrid grid(0.1, 100);  // dt = 1e-3
  CountRecord record{grid, std::vector<std::uint8_t>(grid.steps(), 0), 100.0};
  const auto g = gaussian_limit_transform(record);
  for (double v : g.dy) CHECK(v == doctest::Approx(-0.01).epsilon(1e-15));
  CountRecord varying{grid, std::vector<std::uint8_t>(grid.steps(), 0),
                      RateSchedule(std::vector<double>(grid.points(), 100.0))};
  CHECK_THROWS_AS(gaussian_limit_transform(varying), std::invalid_argument);
}

TEST_CASE("limit transform has centered-Poisson moments on null records") {
  const double lam0 = 50.0;
  const TimeGrid grid(20.0, 20000);  // dt = 1e-3, lambda dt = 0.05
  const auto model = make_model(0.0, 0.0, 0.0, {1.0, 0.0});
  std::vector<double> all;
  all.reserve(5 * grid.steps());
  for (int i = 0; i < 5; ++i) {
    const auto g = gaussian_limit_transform(random_record(model, lam0, grid, 9000 + 16 * i));
    all.insert(all.end(), g.dy.begin(), g.dy.end());
  }
  const double dt = grid.dt();
  const double n = static_cast<double>(all.size());
  CHECK(std::abs(oracles::mean(all)) <= 3.0 * std::sqrt(dt / n));
  // exact Bernoulli variance of the centered increment; the tolerance uses
  // the Bernoulli fourth moment (heavy-tailed at small lambda dt)
  const double p = lam0 * dt;
  const double var_exact = dt * (1.0 - p);
  const double kurt = (1.0 - 6.0 * p * (1.0 - p)) / (p * (1.0 - p)) + 3.0;
  CHECK(std::abs(oracles::sample_variance(all) - var_exact) <=
        3.0 * var_exact * std::sqrt((kurt - 1.0) / n));
}

TEST_CASE("poisson llr approaches the gaussian llr as lambda0 grows") {
  const double sigma = 1.0;
  const TimeGrid grid(0.25, 32000);  // lambda dt <= 0.1 up to lambda0 = 1e4
  const auto sigma_model = make_model(1.0, 0.5, sigma, {0.0, 1.0});
  std::vector<double> medians;
  for (double lam0 : {100.0, 1000.0, 10000.0}) {
    const double alpha = sigma / std::sqrt(lam0);
    const auto alpha_model = make_model(1.0, 0.5, alpha, {0.0, 1.0});
    std::vector<double> gaps;
    for (int j = 0; j < 20; ++j) {
      const auto record =
          random_record(alpha_model, lam0, grid, 10000 + 100 * static_cast<int>(lam0) + j);
      const double llr_p = llr_poisson(alpha_model, record).llr.back();
      const double llr_g =
          llr_estimator_correlator(sigma_model, gaussian_limit_transform(record)).llr.back();
      gaps.push_back(std::abs(llr_p - llr_g));
    }
    medians.push_back(oracles::median(gaps));
  }
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
}

TEST_CASE("bad inputs are rejected") {
  const TimeGrid grid(1.0, 100);
  const auto model = make_model(1.0, 0.0, 1.0, {0.0, 1.0});
  const auto traj = sample_trajectory(model, grid, 1);
  CHECK_THROWS_AS(simulate_poisson(model, traj, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(simulate_poisson(model, traj, 100.0, 2), std::invalid_argument);  // 2 dt > 0.1
  const auto bad_alpha = make_model(1.0, 0.0, -1.5, {0.0, 1.0});
  CHECK_THROWS_AS(simulate_poisson(bad_alpha, traj, 1.0, 2), std::invalid_argument);
  CountRecord record{grid, std::vector<std::uint8_t>(grid.steps(), 0), 1.0};
  record.dn[4] = 2;
  CHECK_THROWS_AS(poisson_filter_numeric(model, record), std::invalid_argument);
  CHECK_THROWS_AS(
      poisson_dmz_step(FilterState{0.5, 0.5, 0.0}, model, 1.0, 0, 0, 0.01, 0.0),
      std::invalid_argument);
}

TEST_SUITE_END();
