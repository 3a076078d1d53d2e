#include "expectail/extreme_expectile.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "expectail/errors.hpp"

namespace expectail {

ExtrapolationInputs make_extrapolation_inputs(std::span<const double> sorted,
                                              const TailFit& fit, double p_n) {
  const int n = fit.n;
  if (static_cast<int>(sorted.size()) != n)
    throw DomainError("sample size does not match the tail fit");
  const double tau_n = 1.0 - static_cast<double>(fit.k) / n;
  if (!(p_n > 0.0 && p_n <= 1.0 - tau_n))
    throw DomainError("need 0 < p_n <= 1 - tau_n = k/n");
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  const double xi = empirical_expectile_sorted(sorted, tau_n);
  const double surv = empirical_survival_sorted(sorted, xi);
  if (!(surv > 0.0))
    throw ExtrapolationError("intermediate expectile is not interior to the sample "
                             "(empirical survival vanishes)");
  return ExtrapolationInputs{tau_n, p_n, fit, mean, n, xi, surv};
}

double extrapolate_expectile_value(double intermediate_expectile, double sigma,
                                   double gamma, double ratio) {
  if (!(ratio >= 1.0))
    throw ExtrapolationError("extrapolation ratio (1-tau_n)/p_n must be >= 1");
  const double exponent = gamma / (1.0 - gamma);
  const double bracket = (std::abs(gamma) < 1e-8)
                             ? std::log(ratio)
                             : (std::pow(ratio, exponent) - 1.0) / gamma;
  return intermediate_expectile + sigma * bracket;
}

ExpectileEstimate laws_extrapolated(std::span<const double> sorted,
                                    const ExtrapolationInputs& inputs, ScaleVariant variant) {
  const TailFit& fit = inputs.fit;
  const double surv = inputs.survival_at_intermediate;
  if (!(surv > 0.0))
    throw ExtrapolationError("intermediate expectile is not interior to the sample");

  double sigma = 0.0;
  if (variant == ScaleVariant::Direct) {
    // a(1/Fbar_n(xi_hat)) realized by refitting the scale at
    // k' = round(n Fbar_n(xi_hat)) exceedances with the same method.
    const int k_prime = static_cast<int>(std::lround(inputs.n * surv));
    if (k_prime < 2)
      throw ExtrapolationError("too few exceedances above the intermediate expectile "
                               "(k'=" + std::to_string(k_prime) + ")");
    sigma = fit_tail(sorted, std::min(k_prime, inputs.n - 1), fit.method).scale_hat;
  } else {
    // a((1-tau_n)^{-1}) = a(n/k) rescaled by regular variation.
    sigma = fit.scale_hat * std::pow((1.0 - inputs.tau_n) / surv, fit.gamma_hat);
  }

  const double ratio = (1.0 - inputs.tau_n) / inputs.p_n;
  const double value =
      extrapolate_expectile_value(inputs.intermediate_expectile, sigma, fit.gamma_hat, ratio);
  return ExpectileEstimate{1.0 - inputs.p_n, value,
                           variant == ScaleVariant::Direct
                               ? ExpectileMethod::ExtrapolatedLaws
                               : ExpectileMethod::ExtrapolatedLawsAlt,
                           fit.k, variant};
}

ExpectileEstimate qb_extrapolated(double sample_mean, const TailFit& fit, double p_n) {
  const double g = fit.gamma_hat;
  if (!(g < 0.0))
    throw ExtrapolationError("quantile-based extrapolation requires gamma_hat < 0");
  const double x_star = endpoint(fit);
  if (!(x_star > sample_mean))
    throw ExtrapolationError("estimated endpoint does not exceed the sample mean");
  const double q_star = extreme_quantile(fit, p_n);
  if (q_star > x_star)
    throw ExtrapolationError("estimated extreme quantile exceeds the estimated endpoint "
                             "(q*=" + std::to_string(q_star) +
                             ", x*=" + std::to_string(x_star) + ")");
  const double spread = (x_star - sample_mean) * (1.0 - 1.0 / g);
  const double value = x_star - std::pow(spread, -g / (1.0 - g)) *
                                    std::pow(x_star - q_star, 1.0 / (1.0 - g));
  return ExpectileEstimate{1.0 - p_n, value, ExpectileMethod::QuantileBased, fit.k,
                           std::nullopt};
}

LevelSelection expectile_level_for_quantile(double sample_mean, const TailFit& fit,
                                            double p_n) {
  const double g = fit.gamma_hat;
  if (!(g < 0.0))
    throw ExtrapolationError("level selection requires gamma_hat < 0");
  const double x_star = endpoint(fit);
  if (!(x_star > sample_mean))
    throw ExtrapolationError("estimated endpoint does not exceed the sample mean");
  const double q_star = extreme_quantile(fit, p_n);
  if (q_star > x_star)
    throw ExtrapolationError("estimated extreme quantile exceeds the estimated endpoint");
  const double pi = expectile_level_for_quantile_oracle(g, x_star, sample_mean, q_star, p_n);
  const double hi = 1.0 - 1.0 / static_cast<double>(fit.n);
  if (pi <= 0.0) return {std::numeric_limits<double>::min(), true};
  if (pi > hi) return {hi, true};
  return {pi, false};
}

double expectile_level_for_quantile_oracle(double gamma, double endpoint, double mean,
                                           double quantile_at_level, double p_n) {
  return p_n * (endpoint - quantile_at_level) /
         ((endpoint - mean) * (1.0 - 1.0 / gamma));
}

VarianceMatrix asymptotic_variance_iid(double gamma) {
  if (!(gamma < 0.5)) throw DomainError("asymptotic variance requires gamma < 1/2");
  return VarianceMatrix{2.0 / ((1.0 - gamma) * (1.0 - 2.0 * gamma)), 1.0 / (1.0 - gamma),
                        1.0};
}

}  // namespace expectail
