// Copyright 2026 The QCA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qca/automaton.hpp"
#include "qca/corpus.hpp"

namespace qca {

/// Per-step mean and standard error of each recorded observable over an
/// ensemble of independently seeded trajectories.
struct EnsembleStats {
  int n_config = 0;
  /// Dense over steps; index = step number.
  std::vector<double> mean_distance;
  std::vector<double> se_distance;
  /// Sparse observable samples shared by every trajectory.
  std::vector<std::int64_t> sample_steps;
  std::vector<double> mean_asymmetry, se_asymmetry;
  std::vector<double> mean_correlation, se_correlation;
  std::vector<double> mean_tmi, se_tmi;
  std::vector<double> mean_accepted;
  bool has_observables = false;

  int sample_slot(std::int64_t step) const {
    for (std::size_t i = 0; i < sample_steps.size(); ++i) {
      if (sample_steps[i] == step) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }
};

namespace detail {

inline void mean_and_se(std::span<const double> values, double& mean,
                        double& se) {
  const std::size_t n = values.size();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  mean = sum / static_cast<double>(n);
  if (n < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  se = std::sqrt(ss / static_cast<double>(n - 1)) /
       std::sqrt(static_cast<double>(n));
}

/// Runs `count` jobs on up to `threads` workers; jobs are indexed and the
/// caller stores results by index, so the outcome is independent of the
/// scheduling order.
template <typename Job>
void run_indexed(int count, int threads, Job&& job) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) {
      job(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min(threads, count);
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace detail

/// Runs n_config trajectories with seeds derive_stream_seed(master_seed, i)
/// and reduces them in index order, so the result is independent of both
/// the thread count and the completion order.
inline EnsembleStats ensemble_average(const AutomatonConfig& base,
                                      const CorpusState& cs, int n_config,
                                      std::uint64_t master_seed,
                                      int threads = 1) {
  if (n_config < 1) {
    throw std::invalid_argument("ensemble_average: need at least one configuration");
  }
  base.validate();
  std::vector<TrajectoryRecord> records(n_config);
  detail::run_indexed(n_config, threads, [&](int i) {
    AutomatonConfig config = base;
    config.seed = derive_stream_seed(master_seed, static_cast<std::uint64_t>(i));
    records[static_cast<std::size_t>(i)] = run_trajectory(config, cs);
  });

  EnsembleStats stats;
  stats.n_config = n_config;
  stats.has_observables = base.record_observables;
  const std::size_t n_steps = records.front().distance_series.size();
  const std::size_t n_samples = records.front().samples.size();
  for (const auto& r : records) {
    if (r.distance_series.size() != n_steps || r.samples.size() != n_samples) {
      throw std::logic_error("ensemble_average: trajectories recorded inconsistent schedules");
    }
  }
  stats.mean_distance.resize(n_steps);
  stats.se_distance.resize(n_steps);
  std::vector<double> column(n_config);
  for (std::size_t s = 0; s < n_steps; ++s) {
    for (int i = 0; i < n_config; ++i) {
      column[i] = records[i].distance_series[s];
    }
    detail::mean_and_se(column, stats.mean_distance[s], stats.se_distance[s]);
  }
  stats.sample_steps.resize(n_samples);
  stats.mean_asymmetry.resize(n_samples);
  stats.se_asymmetry.resize(n_samples);
  stats.mean_correlation.resize(n_samples);
  stats.se_correlation.resize(n_samples);
  stats.mean_tmi.resize(n_samples);
  stats.se_tmi.resize(n_samples);
  stats.mean_accepted.resize(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    stats.sample_steps[s] = records.front().samples[s].step;
    for (int i = 0; i < n_config; ++i) {
      column[i] = records[i].samples[s].asymmetry;
    }
    detail::mean_and_se(column, stats.mean_asymmetry[s], stats.se_asymmetry[s]);
    for (int i = 0; i < n_config; ++i) {
      column[i] = records[i].samples[s].correlation;
    }
    detail::mean_and_se(column, stats.mean_correlation[s], stats.se_correlation[s]);
    for (int i = 0; i < n_config; ++i) {
      column[i] = records[i].samples[s].tmi;
    }
    detail::mean_and_se(column, stats.mean_tmi[s], stats.se_tmi[s]);
    double acc = 0.0;
    for (int i = 0; i < n_config; ++i) {
      acc += static_cast<double>(records[i].samples[s].accepted);
    }
    stats.mean_accepted[s] = acc / n_config;
  }
  return stats;
}

struct PowerLawFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  /// L2 norm of the (weighted) residual vector at (a, b, c).
  double residual = 0.0;
  bool converged = false;
};

struct FitOptions {
  /// Fit y = a t^b with c pinned at zero.
  bool two_param = false;
  /// Weight residuals by 1/se when a standard-error column is supplied.
  bool weighted = false;
  int max_iterations = 200;
};

namespace detail {

struct FitWork {
  std::span<const double> t;
  std::span<const double> y;
  std::vector<double> w;
  std::vector<double> log_t;
  bool two_param = false;

  double ssr(double a, double b, double c) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double r = w[i] * (a * std::pow(t[i], b) + c - y[i]);
      sum += r * r;
    }
    return sum;
  }

  /// Least squares in the linear coefficients (a, c) at fixed exponent.
  void linear_solve(double b, double& a, double& c) const {
    double saa = 0.0, sac = 0.0, scc = 0.0, say = 0.0, scy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double f = w[i] * std::pow(t[i], b);
      const double g = w[i];
      saa += f * f;
      sac += f * g;
      scc += g * g;
      say += f * w[i] * y[i];
      scy += g * w[i] * y[i];
    }
    if (two_param) {
      a = (saa > 0.0) ? say / saa : 0.0;
      c = 0.0;
      return;
    }
    const double det = saa * scc - sac * sac;
    if (std::abs(det) < 1e-300) {
      a = 0.0;
      c = (scc > 0.0) ? scy / scc : 0.0;
      return;
    }
    a = (say * scc - sac * scy) / det;
    c = (saa * scy - sac * say) / det;
  }
};

}  // namespace detail

/// Least-squares fit of y = a t^b + c by damped Gauss-Newton descent with
/// multi-start over the exponent. Requires at least 4 samples and t >= 1.
inline PowerLawFit fit_power_law(std::span<const double> t,
                                 std::span<const double> y,
                                 const FitOptions& options = {},
                                 std::span<const double> se = {}) {
  if (t.size() != y.size()) {
    throw std::invalid_argument("fit_power_law: t and y sizes differ");
  }
  if (t.size() < 4) {
    throw std::invalid_argument("fit_power_law: need at least 4 samples");
  }
  for (double ti : t) {
    if (!(ti >= 1.0)) {
      throw std::invalid_argument("fit_power_law: every sample needs t >= 1");
    }
  }
  detail::FitWork work;
  work.t = t;
  work.y = y;
  work.two_param = options.two_param;
  work.w.assign(t.size(), 1.0);
  if (options.weighted) {
    if (se.size() != t.size()) {
      throw std::invalid_argument("fit_power_law: weighted fit needs one standard error per sample");
    }
    for (std::size_t i = 0; i < se.size(); ++i) {
      work.w[i] = se[i] > 0.0 ? 1.0 / se[i] : 1.0;
    }
  }
  work.log_t.resize(t.size());
  double y_scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    work.log_t[i] = std::log(t[i]);
    y_scale = std::max(y_scale, std::abs(y[i]));
  }

  const int n_params = options.two_param ? 2 : 3;
  constexpr double kStarts[] = {-1.5, -1.0, -0.5, -0.1, -0.01};
  double best_ssr = std::numeric_limits<double>::infinity();
  double best_a = 0.0, best_b = 0.0, best_c = 0.0;
  bool best_stationary = false;

  for (double b0 : kStarts) {
    double a = 0.0, c = 0.0;
    work.linear_solve(b0, a, c);
    double b = b0;
    double ssr = work.ssr(a, b, c);
    double lambda = 1e-3;
    bool stationary = false;
    Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      Eigen::Matrix3d hessian = Eigen::Matrix3d::Zero();
      gradient.setZero();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double tb = std::pow(t[i], b);
        const double r = work.w[i] * (a * tb + c - y[i]);
        Eigen::Vector3d j(work.w[i] * tb, work.w[i] * a * tb * work.log_t[i],
                          options.two_param ? 0.0 : work.w[i]);
        hessian += j * j.transpose();
        gradient += j * r;
      }
      const double grad_scale = std::max(std::sqrt(ssr), 1e-30);
      if (gradient.head(n_params).cwiseAbs().maxCoeff() <
          1e-11 * std::max(grad_scale, 1.0)) {
        stationary = true;
        break;
      }
      bool stepped = false;
      while (lambda < 1e13) {
        Eigen::Matrix3d damped = hessian;
        for (int p = 0; p < 3; ++p) {
          damped(p, p) += lambda * std::max(hessian(p, p), 1e-12);
        }
        if (options.two_param) {
          damped(2, 2) = 1.0;  // pins c
        }
        const Eigen::Vector3d delta = damped.ldlt().solve(-gradient);
        const double a_try = a + delta[0];
        const double b_try = b + delta[1];
        const double c_try = options.two_param ? 0.0 : c + delta[2];
        const double ssr_try = work.ssr(a_try, b_try, c_try);
        if (std::isfinite(ssr_try) && ssr_try < ssr) {
          const double step = delta.head(n_params).cwiseAbs().maxCoeff();
          a = a_try;
          b = b_try;
          c = c_try;
          ssr = ssr_try;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (step < 1e-13 * (1.0 + std::abs(b))) {
            stationary = true;
          }
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) {
        stationary = true;  // no descent at any damping: numerically stationary
      }
      if (!stepped || stationary) {
        break;
      }
    }
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_a = a;
      best_b = b;
      best_c = c;
      best_stationary = stationary;
    }
  }

  PowerLawFit fit;
  fit.a = best_a;
  fit.b = best_b;
  fit.c = best_c;
  fit.residual = std::sqrt(work.ssr(best_a, best_b, best_c));

  // The exponent is only identified when the power term carries weight
  // relative to the data scale; a constant series fails this.
  double term_scale = 0.0;
  for (double ti : t) {
    term_scale = std::max(term_scale, std::abs(best_a * std::pow(ti, best_b)));
  }
  const bool identified = term_scale > 1e-9 * std::max(y_scale, 1e-300);
  fit.converged = best_stationary && identified;
  return fit;
}

enum class ScanAxis : std::uint8_t { one_site, two_site };

struct ScanRow {
  double axis_value = 0.0;
  std::int64_t checkpoint = 0;
  double mean_distance = 0.0;
  double se_distance = 0.0;
  double mean_tmi = 0.0;
  double se_tmi = 0.0;
  double mean_asymmetry = 0.0;
  double mean_correlation = 0.0;
};

struct ScanResult {
  ScanAxis axis = ScanAxis::two_site;
  std::vector<double> grid;
  std::vector<std::int64_t> checkpoints;
  /// Grid-major, checkpoint-minor; size grid.size() * checkpoints.size().
  std::vector<ScanRow> rows;

  const ScanRow& at(std::size_t grid_slot, std::size_t checkpoint_slot) const {
    return rows.at(grid_slot * checkpoints.size() + checkpoint_slot);
  }

  std::vector<double> distance_series(std::size_t checkpoint_slot) const {
    std::vector<double> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out.push_back(at(g, checkpoint_slot).mean_distance);
    }
    return out;
  }

  std::vector<double> tmi_series(std::size_t checkpoint_slot) const {
    std::vector<double> out;
    out.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out.push_back(at(g, checkpoint_slot).mean_tmi);
    }
    return out;
  }
};

/// Sweeps one gate entropy over `grid`, running a full ensemble per value
/// and recording the ensemble means at each checkpoint step. Trajectory
/// seeds depend only on (master_seed, trajectory index), so grid points
/// share common random numbers.
inline ScanResult scan_gate_entropy(const AutomatonConfig& base,
                                    const CorpusState& cs, int n_config,
                                    std::uint64_t master_seed, ScanAxis axis,
                                    std::vector<double> grid,
                                    std::vector<std::int64_t> checkpoints,
                                    int threads = 1) {
  if (grid.empty()) {
    throw std::invalid_argument("scan_gate_entropy: empty grid");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (checkpoints.empty()) {
    throw std::invalid_argument("scan_gate_entropy: need at least one checkpoint step");
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.front() < 1) {
    throw std::invalid_argument("scan_gate_entropy: checkpoint steps must be >= 1");
  }

  ScanResult result;
  result.axis = axis;
  result.grid = grid;
  result.checkpoints = checkpoints;
  for (double value : grid) {
    AutomatonConfig config = base;
    if (axis == ScanAxis::one_site) {
      config.one_site_entropy = GateEntropy(value);
    } else {
      config.two_site_entropy = GateEntropy(value);
    }
    config.steps = checkpoints.back();
    config.record_every = config.steps;  // observables at checkpoints only
    config.checkpoint_steps = checkpoints;
    config.record_observables = true;
    const EnsembleStats stats =
        ensemble_average(config, cs, n_config, master_seed, threads);
    for (std::int64_t checkpoint : checkpoints) {
      const int slot = stats.sample_slot(checkpoint);
      if (slot < 0) {
        throw std::logic_error("scan_gate_entropy: checkpoint step was not recorded");
      }
      ScanRow row;
      row.axis_value = value;
      row.checkpoint = checkpoint;
      row.mean_distance = stats.mean_distance[static_cast<std::size_t>(checkpoint)];
      row.se_distance = stats.se_distance[static_cast<std::size_t>(checkpoint)];
      row.mean_tmi = stats.mean_tmi[slot];
      row.se_tmi = stats.se_tmi[slot];
      row.mean_asymmetry = stats.mean_asymmetry[slot];
      row.mean_correlation = stats.mean_correlation[slot];
      result.rows.push_back(row);
    }
  }
  return result;
}

enum class ThresholdMode : std::uint8_t { stagnation, vanishing };

struct ThresholdParams {
  /// Stagnation: successive differences below this fraction of the curve's
  /// total range count as flat.
  double stagnation_fraction = 0.05;
  /// Vanishing: absolute values below this tolerance count as zero (nats).
  double vanishing_tolerance = 0.01;
};

struct ThresholdEstimate {
  bool found = false;
  double value = 0.0;
};

/// Locates the crossover of a scanned curve.
///   stagnation: smallest grid value beyond which every successive
///     difference stays below stagnation_fraction * range.
///   vanishing: smallest grid value beyond which |value| stays below
///     vanishing_tolerance.
/// Linear interpolation between the bracketing grid points; found = false
/// signals "no crossover in range" (distinct from an input error, which
/// throws).
inline ThresholdEstimate detect_threshold(std::span<const double> grid,
                                          std::span<const double> values,
                                          ThresholdMode mode,
                                          const ThresholdParams& params = {}) {
  if (grid.size() != values.size()) {
    throw std::invalid_argument("detect_threshold: grid and value sizes differ");
  }
  if (grid.size() < 4) {
    throw std::invalid_argument("detect_threshold: need at least 4 grid points");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("detect_threshold: grid must be strictly ascending");
    }
  }

  if (mode == ThresholdMode::vanishing) {
    const double tol = params.vanishing_tolerance;
    std::size_t first_flat = grid.size();
    for (std::size_t k = grid.size(); k-- > 0;) {
      if (std::abs(values[k]) >= tol) {
        break;
      }
      first_flat = k;
    }
    if (first_flat == grid.size() || first_flat == 0) {
      return {false, 0.0};
    }
    const double above = std::abs(values[first_flat - 1]);
    const double below = std::abs(values[first_flat]);
    const double fraction = (above - tol) / std::max(above - below, 1e-300);
    return {true, grid[first_flat - 1] +
                      fraction * (grid[first_flat] - grid[first_flat - 1])};
  }

  double lo = values[0];
  double hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double cutoff = params.stagnation_fraction * (hi - lo);
  const std::size_t n_diff = grid.size() - 1;
  std::vector<double> diff(n_diff);
  for (std::size_t k = 0; k < n_diff; ++k) {
    diff[k] = std::abs(values[k + 1] - values[k]);
  }
  std::size_t first_flat = n_diff;
  for (std::size_t k = n_diff; k-- > 0;) {
    if (diff[k] >= cutoff) {
      break;
    }
    first_flat = k;
  }
  if (first_flat == n_diff || first_flat == 0) {
    return {false, 0.0};
  }
  // The diff over [grid_k, grid_k+1] crosses the cutoff between the last
  // steep interval and the first flat one.
  const double steep = diff[first_flat - 1];
  const double flat = diff[first_flat];
  const double fraction = (steep - cutoff) / std::max(steep - flat, 1e-300);
  const double left = grid[first_flat - 1];
  const double right = grid[first_flat];
  return {true, left + fraction * (right - left)};
}

/// Mode-specific wrapper on a scan: stagnation reads the distance curve,
/// vanishing the TMI curve, both at the last checkpoint.
inline ThresholdEstimate detect_threshold(const ScanResult& scan,
                                          ThresholdMode mode,
                                          const ThresholdParams& params = {}) {
  const std::size_t last = scan.checkpoints.size() - 1;
  const std::vector<double> series = (mode == ThresholdMode::stagnation)
                                         ? scan.distance_series(last)
                                         : scan.tmi_series(last);
  return detect_threshold(scan.grid, series, mode, params);
}

}  // namespace qca
