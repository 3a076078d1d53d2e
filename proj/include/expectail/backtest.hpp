#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "expectail/extreme_expectile.hpp"

namespace expectail {

/// Asymmetric quadratic scoring function |tau - 1{x-xi <= 0}| (x-xi)^2.
double expectile_score(double xi, double x, double tau);

/// Asymmetric piecewise-linear (check) scoring function |alpha - 1{x-q <= 0}| |x-q|.
double quantile_score(double q, double x, double alpha);

/// Rolling one-step-ahead evaluation: each window of length window_length
/// forecasts the next observation.
struct RollingScheme {
  std::vector<double> series;  // loss returns, time-ordered
  int window_length = 300;
  int step = 1;

  int forecast_cases() const;  // (len - n) for step 1
  /// Crude split-sample mean-stability check; true when the two halves of
  /// the series have clearly different means.
  bool stationarity_warning() const;
};

enum class ForecasterId { Empirical, GpQuantile, LawsDirect, LawsAlt, QuantileBased };

struct ForecasterSpec {
  ForecasterId id = ForecasterId::Empirical;
  FitMethod method = FitMethod::GpMaximumLikelihood;
};

std::string forecaster_label(const ForecasterSpec& spec);

/// The seven expectile forecasters: empirical plus {LAWS, LAWS-alt, QB} x
/// {GPML, Moment}.
std::vector<ForecasterSpec> default_expectile_forecasters();

/// The eight quantile forecasters: {GP-quantile, LAWS, LAWS-alt, QB} x
/// {GPML, Moment}.
std::vector<ForecasterSpec> default_quantile_forecasters();

struct ScoreEntry {
  double avg_loss = 0.0;   // minimum over the k grid of the average loss
  int opt_k = 0;           // argmin k (0 for k-independent forecasters)
  int fallback_count = 0;  // windows scored with the fallback forecast at opt_k
};

struct ScoreReport {
  std::vector<double> level_grid;
  std::vector<ForecasterSpec> forecasters;
  std::vector<int> k_grid;
  int forecast_cases = 0;
  std::vector<ScoreEntry> entries;  // forecaster-major: entries[f * levels + l]

  const ScoreEntry& entry(std::size_t forecaster_index, std::size_t level_index) const;
  /// CSV: forecaster,level,avg_loss,opt_k,fallback_count.
  void write_csv(std::ostream& out) const;
};

/// 101 equally spaced levels on [0.99, 0.9999].
std::vector<double> default_level_grid();

/// Scores expectile point forecasts under the asymmetric quadratic loss.
/// For extrapolating forecasters the reported loss is the minimum over the
/// k grid of the average realized loss, with the argmin recorded; a window
/// where a forecaster errors contributes the window's empirical expectile
/// instead and bumps the fallback counter.
ScoreReport run_expectile_backtest(const RollingScheme& scheme,
                                   std::span<const double> level_grid,
                                   std::span<const ForecasterSpec> forecasters,
                                   std::span<const int> k_grid, int workers = 1);

/// Scores quantile (VaR) forecasts under the check loss at level alpha.
/// Expectile-based forecasters first select the asymmetry level 1 - pi_hat
/// matching the alpha-quantile, then forecast the expectile there; the
/// fallback is the window's empirical alpha-quantile.
ScoreReport run_quantile_backtest(const RollingScheme& scheme,
                                  std::span<const double> alpha_grid,
                                  std::span<const ForecasterSpec> forecasters,
                                  std::span<const int> k_grid, int workers = 1);

/// Forecaster indices in ascending order of average loss at the given level;
/// ties keep the configured forecaster order.
std::vector<std::size_t> rank_forecasters(const ScoreReport& report, double level);

}  // namespace expectail
