#include "expectail/tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "expectail/errors.hpp"

namespace expectail {

std::string to_string(FitMethod m) {
  return m == FitMethod::GpMaximumLikelihood ? "gpml" : "moment";
}

FitMethod fit_method_from_string(const std::string& name) {
  if (name == "gpml") return FitMethod::GpMaximumLikelihood;
  if (name == "moment") return FitMethod::Moment;
  throw DomainError("unknown fit method: " + name);
}

std::vector<double> order_statistics(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double x : sorted)
    if (std::isnan(x)) throw DomainError("sample contains NaN");
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

namespace {

void check_k(std::span<const double> sorted, int k) {
  const int n = static_cast<int>(sorted.size());
  if (k < 2 || k >= n) throw DomainError("k must satisfy 2 <= k < n");
}

// Profile GPD log-likelihood over theta = gamma/sigma. For theta != 0 the
// profile maximizer has gamma(theta) = mean(log(1+theta y)) and
// l(theta) = -k [log(gamma/theta) + gamma + 1]; theta = 0 is the exponential
// model with l = -k [log(mean y) + 1].
struct GpdProfile {
  std::span<const double> y;
  double mean_y;

  double gamma_of(double theta) const {
    double acc = 0.0;
    for (double v : y) acc += std::log1p(theta * v);
    return acc / static_cast<double>(y.size());
  }

  double loglik(double theta) const {
    const double k = static_cast<double>(y.size());
    if (theta == 0.0) return -k * (std::log(mean_y) + 1.0);
    const double g = gamma_of(theta);
    if (!(g / theta > 0.0)) return -std::numeric_limits<double>::infinity();
    return -k * (std::log(g / theta) + g + 1.0);
  }

  // d/dtheta of loglik, theta != 0. Comparison-based search alone can only
  // locate the maximum to about sqrt(machine-eps); the sign of this derivative
  // pins it to full precision.
  double dloglik(double theta) const {
    const double k = static_cast<double>(y.size());
    double g = 0.0, gp = 0.0;
    for (double v : y) {
      g += std::log1p(theta * v);
      gp += v / (1.0 + theta * v);
    }
    g /= k;
    gp /= k;
    if (!(g / theta > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return -static_cast<double>(y.size()) * (gp * (1.0 / g + 1.0) - 1.0 / theta);
  }
};

double golden_section_max(const GpdProfile& profile, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = profile.loglik(x1);
  double f2 = profile.loglik(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = profile.loglik(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = profile.loglik(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TailFit gpd_pseudo_ml_sorted(std::span<const double> sorted, int k) {
  check_k(sorted, k);
  const int n = static_cast<int>(sorted.size());
  const double threshold = sorted[n - k - 1];

  std::vector<double> y(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) y[i] = sorted[n - k + i] - threshold;
  const double y_max = y.back();
  const double y_min = y.front();
  if (!(y_max > y_min) || !(y_max > 0.0))
    throw DegenerateSampleError("all exceedances above the threshold are identical");
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(k);

  GpdProfile profile{y, mean_y};

  // Feasible grid: theta in (-1/y_max, 0) geometrically dense near the lower
  // bound, plus a geometric positive branch and the exponential point.
  std::vector<double> grid;
  const double lo = -1.0 / y_max;
  constexpr int kHalfGrid = 100;
  for (int j = 0; j <= kHalfGrid; ++j) {
    const double s = std::pow(10.0, -8.0 + 8.0 * j / kHalfGrid);  // in (1e-8, 1]
    grid.push_back(lo * (1.0 - s));
  }
  grid.push_back(0.0);
  for (int j = 0; j <= kHalfGrid; ++j) {
    const double s = std::pow(10.0, -8.0 + 9.0 * j / kHalfGrid);  // up to 10/mean_y
    grid.push_back(s / mean_y);
  }
  std::sort(grid.begin(), grid.end());

  std::vector<double> ll(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ll[i] = profile.loglik(grid[i]);

  // Interior local maxima are the stationary-point candidates; the likelihood
  // supremum at the feasibility boundary (gamma <= -1 regime) is not one.
  double best_theta = std::numeric_limits<double>::quiet_NaN();
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (ll[i] >= ll[i - 1] && ll[i] >= ll[i + 1] && std::isfinite(ll[i])) {
      double theta = golden_section_max(profile, grid[i - 1], grid[i + 1]);
      // Polish by bisection on the profile derivative when the bracket stays
      // on one side of zero (the exponential point is its own candidate).
      if (grid[i - 1] * grid[i + 1] > 0.0) {
        double a = grid[i - 1], b = grid[i + 1];
        double fa = profile.dloglik(a), fb = profile.dloglik(b);
        if (std::isfinite(fa) && std::isfinite(fb) && fa > 0.0 && fb < 0.0) {
          for (int it = 0; it < 200 && b - a > 0.0; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            const double fm = profile.dloglik(mid);
            if (!std::isfinite(fm)) break;
            (fm > 0.0 ? a : b) = mid;
          }
          theta = 0.5 * (a + b);
        }
      }
      const double value = profile.loglik(theta);
      if (value > best_ll) {
        best_ll = value;
        best_theta = theta;
      }
    }
  }
  if (!std::isfinite(best_ll))
    throw ConvergenceError("GP profile likelihood has no interior stationary point (k=" +
                           std::to_string(k) + ", y_max=" + std::to_string(y_max) + ")");

  double gamma_hat, sigma_hat;
  if (std::abs(best_theta) < 1e-14 / mean_y) {
    gamma_hat = 0.0;
    sigma_hat = mean_y;
  } else {
    gamma_hat = profile.gamma_of(best_theta);
    sigma_hat = gamma_hat / best_theta;
  }
  return TailFit{gamma_hat, sigma_hat, k, threshold, n, FitMethod::GpMaximumLikelihood, 0.0};
}

TailFit gpd_pseudo_ml(std::span<const double> sample, int k) {
  const auto sorted = order_statistics(sample);
  return gpd_pseudo_ml_sorted(sorted, k);
}

TailFit moment_estimator_sorted(std::span<const double> sorted, int k) {
  check_k(sorted, k);
  const int n = static_cast<int>(sorted.size());
  const double shift = (sorted.front() <= 0.0) ? 1.0 - sorted.front() : 0.0;
  const double threshold = sorted[n - k - 1];
  const double shifted_threshold = threshold + shift;
  if (!(shifted_threshold > 0.0))
    throw DomainError("threshold nonpositive after positivity shift");

  const double log_threshold = std::log(shifted_threshold);
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = std::log(sorted[n - 1 - i] + shift) - log_threshold;
    m1 += d;
    m2 += d * d;
  }
  m1 /= static_cast<double>(k);
  m2 /= static_cast<double>(k);
  if (!(m2 > 0.0)) throw DegenerateSampleError("all top-k order statistics are identical");
  const double ratio = m1 * m1 / m2;
  if (!(ratio < 1.0)) throw DegenerateSampleError("moment ratio degenerate (M1^2 = M2)");

  const double gamma_minus = 1.0 - 0.5 / (1.0 - ratio);
  const double gamma_hat = m1 + gamma_minus;
  const double scale_hat = shifted_threshold * m1 * (1.0 - gamma_minus);
  return TailFit{gamma_hat, scale_hat, k, threshold, n, FitMethod::Moment, shift};
}

TailFit moment_estimator(std::span<const double> sample, int k) {
  const auto sorted = order_statistics(sample);
  return moment_estimator_sorted(sorted, k);
}

TailFit fit_tail(std::span<const double> sorted, int k, FitMethod method) {
  return method == FitMethod::GpMaximumLikelihood ? gpd_pseudo_ml_sorted(sorted, k)
                                                  : moment_estimator_sorted(sorted, k);
}

double extreme_quantile(const TailFit& fit, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("tail probability must lie in (0,1)");
  const double ratio = static_cast<double>(fit.k) / (static_cast<double>(fit.n) * p);
  if (ratio < 1.0)
    throw ExtrapolationError("extreme_quantile requires p <= k/n (extrapolation beyond the "
                             "threshold, not interpolation below it)");
  const double g = fit.gamma_hat;
  const double bracket =
      (std::abs(g) < 1e-8) ? std::log(ratio) : (std::pow(ratio, g) - 1.0) / g;
  return fit.threshold + fit.scale_hat * bracket;
}

double endpoint(const TailFit& fit) {
  if (!(fit.gamma_hat < 0.0))
    throw ExtrapolationError("endpoint is infinite for gamma_hat >= 0 (gamma_hat=" +
                             std::to_string(fit.gamma_hat) + ")");
  return fit.threshold - fit.scale_hat / fit.gamma_hat;
}

KSelection select_k_path_stability(std::span<const double> sample, int k_min, int k_max,
                                   FitMethod method, int window, double band) {
  const auto sorted = order_statistics(sample);
  const int n = static_cast<int>(sorted.size());
  if (!(2 <= k_min && k_min < k_max && k_max < n))
    throw DomainError("need 2 <= k_min < k_max < n");
  if (window < 3) throw DomainError("window must be >= 3");

  const int count = k_max - k_min + 1;
  std::vector<double> path(static_cast<std::size_t>(count),
                           std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < count; ++i) {
    try {
      path[i] = fit_tail(sorted, k_min + i, method).gamma_hat;
    } catch (const Error&) {
      // failed fits break stability runs but do not abort the scan
    }
  }

  std::vector<double> finite;
  for (double g : path)
    if (std::isfinite(g)) finite.push_back(g);
  auto fallback = [&]() {
    const int k = static_cast<int>(std::sqrt(static_cast<double>(k_min) * k_max));
    double g = std::numeric_limits<double>::quiet_NaN();
    const int idx = k - k_min;
    if (idx >= 0 && idx < count) g = path[static_cast<std::size_t>(idx)];
    return KSelection{k, g, true};
  };
  if (static_cast<int>(finite.size()) < window) return fallback();

  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
  };
  const double med = median_of(finite);
  std::vector<double> dev;
  dev.reserve(finite.size());
  for (double g : finite) dev.push_back(std::abs(g - med));
  const double tol = std::max(band * median_of(dev), 1e-12);

  // Mark window starts whose rolling range stays under the band.
  std::vector<char> stable(static_cast<std::size_t>(count), 0);
  for (int i = 0; i + window <= count; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool ok = true;
    for (int j = i; j < i + window; ++j) {
      if (!std::isfinite(path[j])) {
        ok = false;
        break;
      }
      lo = std::min(lo, path[j]);
      hi = std::max(hi, path[j]);
    }
    stable[i] = (ok && hi - lo < tol) ? 1 : 0;
  }

  // Longest maximal run of stable starts; ties resolved toward larger k.
  int best_begin = -1, best_end = -1;
  for (int i = 0; i < count;) {
    if (!stable[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < count && stable[j]) ++j;
    const int begin = i, end = std::min(j - 1 + window, count);  // region covers windows
    if (end - begin >= best_end - best_begin) {
      best_begin = begin;
      best_end = end;
    }
    i = j;
  }
  if (best_begin < 0) return fallback();

  // k whose estimate is the median over the stable region.
  std::vector<std::pair<double, int>> region;
  for (int i = best_begin; i < best_end; ++i)
    if (std::isfinite(path[i])) region.emplace_back(path[i], k_min + i);
  std::sort(region.begin(), region.end());
  const auto& pick = region[(region.size() - 1) / 2];
  return KSelection{pick.second, pick.first, false};
}

}  // namespace expectail
