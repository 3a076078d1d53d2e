#include "expectail/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "expectail/errors.hpp"

namespace expectail {

std::string to_string(ExpectileMethod m) {
  switch (m) {
    case ExpectileMethod::EmpiricalLaws: return "empirical";
    case ExpectileMethod::ExtrapolatedLaws: return "laws";
    case ExpectileMethod::ExtrapolatedLawsAlt: return "laws-alt";
    case ExpectileMethod::QuantileBased: return "qb";
    case ExpectileMethod::Oracle: return "oracle";
  }
  return "unknown";
}

std::string to_string(ScaleVariant v) {
  return v == ScaleVariant::Direct ? "direct" : "alt";
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("asymmetry level must lie strictly in (0,1)");
}

void check_finite(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  for (double x : sample)
    if (!std::isfinite(x)) throw DomainError("sample contains a non-finite value");
}

}  // namespace

double empirical_expectile_sorted(std::span<const double> sorted, double tau) {
  check_tau(tau);
  const std::size_t n = sorted.size();
  if (n == 0) throw DomainError("sample must be nonempty");
  if (n == 1) return sorted[0];

  // FOC: g(theta) = tau * sum_{x>theta}(x-theta) - (1-tau) * sum_{x<=theta}(theta-x),
  // strictly decreasing and piecewise linear with knots at the order statistics.
  // Find the last knot with g >= 0, then solve the linear segment exactly.
  std::vector<double> prefix(n + 1, 0.0);
  std::partial_sum(sorted.begin(), sorted.end(), prefix.begin() + 1);
  const double total = prefix[n];
  // The half-expectile is the mean; return it directly so the identity holds
  // to the last bit rather than up to segment-solver rounding.
  if (tau == 0.5) return total / static_cast<double>(n);

  auto g_at_knot = [&](std::size_t i) {  // theta = sorted[i-1], first i points below-or-equal
    const double theta = sorted[i - 1];
    const double above = total - prefix[i];
    return tau * (above - static_cast<double>(n - i) * theta) -
           (1.0 - tau) * (static_cast<double>(i) * theta - prefix[i]);
  };

  std::size_t lo = 1, hi = n;
  if (g_at_knot(1) <= 0.0) return sorted[0];
  if (g_at_knot(n) >= 0.0) return sorted[n - 1];
  while (hi - lo > 1) {  // g(knot lo) > 0 >= g(knot hi)
    const std::size_t mid = lo + (hi - lo) / 2;
    (g_at_knot(mid) > 0.0 ? lo : hi) = mid;
  }
  // Solve on [sorted[lo-1], sorted[lo]] with lo points at or below theta.
  const double above = total - prefix[lo];
  const double denom =
      tau * static_cast<double>(n - lo) + (1.0 - tau) * static_cast<double>(lo);
  return (tau * above + (1.0 - tau) * prefix[lo]) / denom;
}

ExpectileEstimate empirical_expectile(std::span<const double> sample, double tau) {
  check_finite(sample);
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  return ExpectileEstimate{tau, empirical_expectile_sorted(sorted, tau),
                           ExpectileMethod::EmpiricalLaws, std::nullopt, std::nullopt};
}

double empirical_tail_moment(std::span<const double> sample, double x, int kappa) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  if (kappa != 1 && kappa != 2) throw DomainError("tail moment order must be 1 or 2");
  double acc = 0.0;
  for (double v : sample) {
    if (v > x) {
      const double d = v - x;
      acc += (kappa == 1) ? d : d * d;
    }
  }
  return acc / static_cast<double>(sample.size());
}

double empirical_e_survival(std::span<const double> sample, double x) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  const double phi = empirical_tail_moment(sample, x, 1);
  const double mean =
      std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
  const double denom = 2.0 * phi + x - mean;
  if (!(denom > 0.0))
    throw DomainError("E-survival denominator nonpositive at x=" + std::to_string(x));
  return phi / denom;
}

double empirical_survival(std::span<const double> sample, double x) {
  if (sample.empty()) throw DomainError("sample must be nonempty");
  std::size_t count = 0;
  for (double v : sample)
    if (v > x) ++count;
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double empirical_survival_sorted(std::span<const double> sorted, double x) {
  if (sorted.empty()) throw DomainError("sample must be nonempty");
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

double oracle_tail_moment(const ModelSpec& model, double x, double abs_tol) {
  // phi^(1)(x) = int_x^{x*} (u - x) f(u) du = int_x^{x*} (1 - F(u)) du
  // (integration by parts; the boundary term vanishes at the finite endpoint).
  const ModelSpec marginal = model.marginal();
  const double upper = marginal.support_upper();
  if (x >= upper) return 0.0;
  auto survival = [&](double u) { return 1.0 - cdf(marginal, u); };
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      survival, x, upper, 12, abs_tol);
}

ExpectileEstimate oracle_expectile(const ModelSpec& model, double tau, double tol) {
  check_tau(tau);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const ModelSpec marginal = model.marginal();
  const double mean = marginal.mean();
  const double upper = marginal.support_upper();
  double lower = marginal.support_lower();
  if (!std::isfinite(lower)) lower = quantile(marginal, 1e-12);

  const double quad_tol = tol / 10.0;
  auto e_survival = [&](double x) {
    const double phi = oracle_tail_moment(marginal, x, quad_tol);
    return phi / (2.0 * phi + x - mean);
  };

  // Ebar is continuous and strictly decreasing with Ebar(E X) = 1/2, so the
  // expectile brackets on [E X, x*] for tau >= 1/2 and below the mean otherwise.
  double lo = (tau >= 0.5) ? mean : lower;
  double hi = (tau >= 0.5) ? upper : mean;
  const double target = 1.0 - tau;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (e_survival(mid) > target ? lo : hi) = mid;
  }
  return ExpectileEstimate{tau, 0.5 * (lo + hi), ExpectileMethod::Oracle, std::nullopt,
                           std::nullopt};
}

}  // namespace expectail
