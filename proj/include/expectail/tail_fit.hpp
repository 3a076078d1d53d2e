#pragma once

#include <span>
#include <string>
#include <vector>

namespace expectail {

enum class FitMethod { GpMaximumLikelihood, Moment };

std::string to_string(FitMethod m);
FitMethod fit_method_from_string(const std::string& name);

/// Fitted tail parameters from the top-k order statistics.
struct TailFit {
  double gamma_hat = 0.0;
  double scale_hat = 0.0;  // estimate of a(n/k), > 0
  int k = 0;               // number of exceedances, >= 2
  double threshold = 0.0;  // the order statistic X_{n-k,n} (original scale)
  int n = 0;
  FitMethod method = FitMethod::GpMaximumLikelihood;
  double shift = 0.0;  // positivity shift applied internally (Moment only)
};

/// Ascending sort; rejects NaN.
std::vector<double> order_statistics(std::span<const double> sample);

/// GP pseudo-maximum-likelihood fit to the k exceedances over X_{n-k,n},
/// via the Grimshaw one-dimensional profile over theta = gamma/sigma
/// (feasible grid + golden-section refinement). The gamma -> 0 boundary is
/// the exponential model.
TailFit gpd_pseudo_ml(std::span<const double> sample, int k);
TailFit gpd_pseudo_ml_sorted(std::span<const double> sorted, int k);

/// Dekkers-Einmahl-de Haan Moment estimator of (gamma, a(n/k)) from the
/// log-spacings of the top k order statistics. When min(sample) <= 0 the
/// sample is shifted by 1 - min before taking logs; the shift is recorded.
TailFit moment_estimator(std::span<const double> sample, int k);
TailFit moment_estimator_sorted(std::span<const double> sorted, int k);

TailFit fit_tail(std::span<const double> sorted, int k, FitMethod method);

/// Extreme quantile extrapolation:
/// X_{n-k,n} + a(n/k) * ((k/(np))^gamma - 1)/gamma, p < k/n.
double extreme_quantile(const TailFit& fit, double p);

/// Right endpoint X_{n-k,n} - a(n/k)/gamma; requires gamma < 0.
double endpoint(const TailFit& fit);

struct KSelection {
  int k = 0;
  double gamma_hat = 0.0;
  bool fallback = false;  // no stable region found; k = floor(sqrt(k_min k_max))
};

/// Path-stability choice of k: scans gamma_hat(k) over [k_min, k_max], finds
/// maximal runs whose rolling range (over `window` consecutive points) stays
/// below band * MAD of the whole path, picks the longest run (ties -> larger
/// k) and returns the k whose estimate is the median over that run.
KSelection select_k_path_stability(std::span<const double> sample, int k_min, int k_max,
                                   FitMethod method, int window = 10, double band = 0.4);

}  // namespace expectail
