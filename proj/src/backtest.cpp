#include "expectail/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "expectail/errors.hpp"
#include "expectail/parallel.hpp"

namespace expectail {

double expectile_score(double xi, double x, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("scoring level must lie in (0,1)");
  const double d = x - xi;
  const double w = std::abs(tau - (d <= 0.0 ? 1.0 : 0.0));
  return w * d * d;
}

double quantile_score(double q, double x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("scoring level must lie in (0,1)");
  const double d = x - q;
  const double w = std::abs(alpha - (d <= 0.0 ? 1.0 : 0.0));
  return w * std::abs(d);
}

int RollingScheme::forecast_cases() const {
  const int len = static_cast<int>(series.size());
  if (window_length < 2 || window_length >= len)
    throw DomainError("window length must satisfy 2 <= n < length(series)");
  const int s = std::max(1, step);
  return (len - window_length - 1) / s + 1;
}

bool RollingScheme::stationarity_warning() const {
  const std::size_t n = series.size();
  if (n < 20) return false;
  const std::size_t half = n / 2;
  auto stats = [&](std::size_t begin, std::size_t end) {
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += series[i];
    mean /= static_cast<double>(end - begin);
    double var = 0.0;
    for (std::size_t i = begin; i < end; ++i) var += (series[i] - mean) * (series[i] - mean);
    var /= static_cast<double>(end - begin - 1);
    return std::pair{mean, var / static_cast<double>(end - begin)};
  };
  const auto [m1, v1] = stats(0, half);
  const auto [m2, v2] = stats(half, n);
  return std::abs(m1 - m2) > 3.0 * std::sqrt(v1 + v2);
}

std::string forecaster_label(const ForecasterSpec& spec) {
  switch (spec.id) {
    case ForecasterId::Empirical: return "empirical";
    case ForecasterId::GpQuantile: return "gp-quantile-" + to_string(spec.method);
    case ForecasterId::LawsDirect: return "laws-" + to_string(spec.method);
    case ForecasterId::LawsAlt: return "laws-alt-" + to_string(spec.method);
    case ForecasterId::QuantileBased: return "qb-" + to_string(spec.method);
  }
  return "unknown";
}

std::vector<ForecasterSpec> default_expectile_forecasters() {
  const auto gpml = FitMethod::GpMaximumLikelihood;
  const auto mom = FitMethod::Moment;
  return {{ForecasterId::Empirical, gpml},  {ForecasterId::LawsDirect, gpml},
          {ForecasterId::LawsAlt, gpml},    {ForecasterId::QuantileBased, gpml},
          {ForecasterId::LawsDirect, mom},  {ForecasterId::LawsAlt, mom},
          {ForecasterId::QuantileBased, mom}};
}

std::vector<ForecasterSpec> default_quantile_forecasters() {
  const auto gpml = FitMethod::GpMaximumLikelihood;
  const auto mom = FitMethod::Moment;
  return {{ForecasterId::GpQuantile, gpml}, {ForecasterId::LawsDirect, gpml},
          {ForecasterId::LawsAlt, gpml},    {ForecasterId::QuantileBased, gpml},
          {ForecasterId::GpQuantile, mom},  {ForecasterId::LawsDirect, mom},
          {ForecasterId::LawsAlt, mom},     {ForecasterId::QuantileBased, mom}};
}

const ScoreEntry& ScoreReport::entry(std::size_t forecaster_index,
                                     std::size_t level_index) const {
  return entries[forecaster_index * level_grid.size() + level_index];
}

void ScoreReport::write_csv(std::ostream& out) const {
  out << "forecaster,level,avg_loss,opt_k,fallback_count\n";
  for (std::size_t f = 0; f < forecasters.size(); ++f) {
    for (std::size_t l = 0; l < level_grid.size(); ++l) {
      const ScoreEntry& e = entry(f, l);
      out << forecaster_label(forecasters[f]) << ',' << level_grid[l] << ',' << e.avg_loss
          << ',' << e.opt_k << ',' << e.fallback_count << '\n';
    }
  }
}

std::vector<double> default_level_grid() {
  std::vector<double> grid(101);
  for (int i = 0; i <= 100; ++i) grid[i] = 0.99 + (0.9999 - 0.99) * i / 100.0;
  return grid;
}

namespace {

bool is_k_independent(const ForecasterSpec& spec) {
  return spec.id == ForecasterId::Empirical;
}

struct BacktestProblem {
  const RollingScheme& scheme;
  std::span<const double> levels;
  std::span<const ForecasterSpec> forecasters;
  std::span<const int> k_grid;
  bool quantile_mode;
};

// Per-window quantities shared by every forecaster at one (k, method).
struct FitContext {
  bool ok = false;
  TailFit fit;
  double sigma_direct = std::numeric_limits<double>::quiet_NaN();
  double sigma_alt = std::numeric_limits<double>::quiet_NaN();
};

void validate(const BacktestProblem& p) {
  if (p.levels.empty()) throw DomainError("level grid must be nonempty");
  for (double lvl : p.levels)
    if (!(lvl > 0.0 && lvl < 1.0)) throw DomainError("levels must lie strictly in (0,1)");
  if (p.forecasters.empty()) throw DomainError("forecaster set must be nonempty");
  bool needs_k = false;
  for (const auto& f : p.forecasters) needs_k = needs_k || !is_k_independent(f);
  if (needs_k && p.k_grid.empty()) throw DomainError("k grid must be nonempty");
  for (int k : p.k_grid)
    if (k < 2 || k >= p.scheme.window_length)
      throw DomainError("k grid entries must lie in [2, n-1]");
}

// Fills losses[f * L * K + l * K + j] and fallback flags for one case.
void score_case(const BacktestProblem& p, int t, double* losses,
                unsigned char* fallbacks) {
  const int n = p.scheme.window_length;
  const int start = t * std::max(1, p.scheme.step);
  std::vector<double> sorted(p.scheme.series.begin() + start,
                             p.scheme.series.begin() + start + n);
  std::sort(sorted.begin(), sorted.end());
  const double realized = p.scheme.series[static_cast<std::size_t>(start + n)];
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);

  const std::size_t L = p.levels.size();
  const std::size_t K = std::max<std::size_t>(1, p.k_grid.size());

  // Fallback forecasts, one per level.
  std::vector<double> fallback_forecast(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double lvl = p.levels[l];
    if (p.quantile_mode) {
      const auto idx = static_cast<std::size_t>(
          std::min<double>(std::ceil(lvl * n), static_cast<double>(n)) - 1.0);
      fallback_forecast[l] = sorted[idx];
    } else {
      fallback_forecast[l] = empirical_expectile_sorted(sorted, lvl);
    }
  }

  auto score = [&](double forecast, double lvl) {
    return p.quantile_mode ? quantile_score(forecast, realized, lvl)
                           : expectile_score(forecast, realized, lvl);
  };

  for (std::size_t j = 0; j < p.k_grid.size() || (j == 0 && p.k_grid.empty()); ++j) {
    FitContext ctx[2];
    double tau_n = 0.0, xi_intermediate = 0.0, surv = 0.0;
    bool have_intermediate = false;
    if (!p.k_grid.empty()) {
      const int k = p.k_grid[j];
      tau_n = 1.0 - static_cast<double>(k) / n;
      try {
        xi_intermediate = empirical_expectile_sorted(sorted, tau_n);
        surv = empirical_survival_sorted(sorted, xi_intermediate);
        have_intermediate = surv > 0.0;
      } catch (const Error&) {
      }
      for (int mi = 0; mi < 2; ++mi) {
        const FitMethod method =
            mi == 0 ? FitMethod::GpMaximumLikelihood : FitMethod::Moment;
        try {
          ctx[mi].fit = fit_tail(sorted, k, method);
          ctx[mi].ok = true;
          if (have_intermediate) {
            const int k_prime = static_cast<int>(std::lround(n * surv));
            if (k_prime >= 2)
              ctx[mi].sigma_direct =
                  fit_tail(sorted, std::min(k_prime, n - 1), method).scale_hat;
            ctx[mi].sigma_alt = ctx[mi].fit.scale_hat *
                                std::pow((1.0 - tau_n) / surv, ctx[mi].fit.gamma_hat);
          }
        } catch (const Error&) {
        }
      }
    }

    for (std::size_t f = 0; f < p.forecasters.size(); ++f) {
      const auto& spec = p.forecasters[f];
      if (is_k_independent(spec) && j > 0) continue;
      const FitContext& c =
          ctx[spec.method == FitMethod::GpMaximumLikelihood ? 0 : 1];
      for (std::size_t l = 0; l < L; ++l) {
        const double lvl = p.levels[l];
        const double p_n = 1.0 - lvl;
        double forecast = std::numeric_limits<double>::quiet_NaN();
        try {
          if (spec.id == ForecasterId::Empirical) {
            forecast = fallback_forecast[l];  // the empirical forecast itself
          } else if (!c.ok) {
            // fit failed; fall through to fallback below
          } else if (p.quantile_mode) {
            if (spec.id == ForecasterId::GpQuantile) {
              forecast = extreme_quantile(c.fit, p_n);
            } else {
              const double pi =
                  expectile_level_for_quantile(mean, c.fit, p_n).pi_n;
              if (spec.id == ForecasterId::QuantileBased) {
                forecast = qb_extrapolated(mean, c.fit, pi).value;
              } else if (have_intermediate) {
                const double sigma = spec.id == ForecasterId::LawsDirect
                                         ? c.sigma_direct
                                         : c.sigma_alt;
                if (std::isfinite(sigma))
                  forecast = extrapolate_expectile_value(
                      xi_intermediate, sigma, c.fit.gamma_hat, (1.0 - tau_n) / pi);
              }
            }
          } else {
            if (spec.id == ForecasterId::QuantileBased) {
              forecast = qb_extrapolated(mean, c.fit, p_n).value;
            } else if (have_intermediate && p_n <= 1.0 - tau_n) {
              const double sigma = spec.id == ForecasterId::LawsDirect
                                       ? c.sigma_direct
                                       : c.sigma_alt;
              if (std::isfinite(sigma))
                forecast = extrapolate_expectile_value(
                    xi_intermediate, sigma, c.fit.gamma_hat, (1.0 - tau_n) / p_n);
            }
          }
        } catch (const Error&) {
          forecast = std::numeric_limits<double>::quiet_NaN();
        }
        const std::size_t slot = f * L * K + l * K + j;
        if (std::isfinite(forecast)) {
          losses[slot] = score(forecast, lvl);
        } else {
          losses[slot] = score(fallback_forecast[l], lvl);
          fallbacks[slot] = 1;
        }
      }
    }
  }
}

ScoreReport run_backtest(const BacktestProblem& p, int workers) {
  validate(p);
  const int T = p.scheme.forecast_cases();
  const std::size_t L = p.levels.size();
  const std::size_t K = std::max<std::size_t>(1, p.k_grid.size());
  const std::size_t F = p.forecasters.size();
  const std::size_t per_case = F * L * K;

  std::vector<double> losses(static_cast<std::size_t>(T) * per_case, 0.0);
  std::vector<unsigned char> fallbacks(losses.size(), 0);
  parallel_for(static_cast<std::size_t>(T), workers, [&](std::size_t t) {
    score_case(p, static_cast<int>(t), losses.data() + t * per_case,
               fallbacks.data() + t * per_case);
  });

  ScoreReport report;
  report.level_grid.assign(p.levels.begin(), p.levels.end());
  report.forecasters.assign(p.forecasters.begin(), p.forecasters.end());
  report.k_grid.assign(p.k_grid.begin(), p.k_grid.end());
  report.forecast_cases = T;
  report.entries.resize(F * L);

  for (std::size_t f = 0; f < F; ++f) {
    const bool fixed_k = is_k_independent(p.forecasters[f]);
    for (std::size_t l = 0; l < L; ++l) {
      double best_loss = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      const std::size_t j_count = fixed_k ? 1 : K;
      for (std::size_t j = 0; j < j_count; ++j) {
        double sum = 0.0;
        for (int t = 0; t < T; ++t)
          sum += losses[static_cast<std::size_t>(t) * per_case + f * L * K + l * K + j];
        const double avg = sum / T;
        if (avg < best_loss) {
          best_loss = avg;
          best_j = j;
        }
      }
      int fallback_count = 0;
      for (int t = 0; t < T; ++t)
        fallback_count += fallbacks[static_cast<std::size_t>(t) * per_case + f * L * K +
                                    l * K + best_j];
      const int opt_k =
          (fixed_k || p.k_grid.empty()) ? 0 : p.k_grid[best_j];
      report.entries[f * L + l] = ScoreEntry{best_loss, opt_k, fallback_count};
    }
  }
  return report;
}

}  // namespace

ScoreReport run_expectile_backtest(const RollingScheme& scheme,
                                   std::span<const double> level_grid,
                                   std::span<const ForecasterSpec> forecasters,
                                   std::span<const int> k_grid, int workers) {
  return run_backtest(BacktestProblem{scheme, level_grid, forecasters, k_grid, false},
                      workers);
}

ScoreReport run_quantile_backtest(const RollingScheme& scheme,
                                  std::span<const double> alpha_grid,
                                  std::span<const ForecasterSpec> forecasters,
                                  std::span<const int> k_grid, int workers) {
  return run_backtest(BacktestProblem{scheme, alpha_grid, forecasters, k_grid, true},
                      workers);
}

std::vector<std::size_t> rank_forecasters(const ScoreReport& report, double level) {
  std::size_t level_index = report.level_grid.size();
  for (std::size_t l = 0; l < report.level_grid.size(); ++l)
    if (report.level_grid[l] == level) level_index = l;
  if (level_index == report.level_grid.size())
    throw DomainError("level not present in the report grid");
  std::vector<std::size_t> order(report.forecasters.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.entry(a, level_index).avg_loss < report.entry(b, level_index).avg_loss;
  });
  return order;
}

}  // namespace expectail
