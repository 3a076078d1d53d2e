#pragma once

#include <span>

#include "expectail/expectile.hpp"
#include "expectail/tail_fit.hpp"

namespace expectail {

/// Everything the extrapolated LAWS estimators need from a sample:
/// the intermediate level tau_n = 1 - k/n, the extreme tail probability p_n,
/// the tail fit, and the intermediate LAWS value with the empirical survival
/// evaluated there.
struct ExtrapolationInputs {
  double tau_n = 0.0;
  double p_n = 0.0;
  TailFit fit;
  double sample_mean = 0.0;
  int n = 0;
  double intermediate_expectile = 0.0;
  double survival_at_intermediate = 0.0;  // Fbar_n(xi_hat_{tau_n}), must be > 0
};

/// Builds ExtrapolationInputs from an ascending-sorted sample and a tail fit
/// (tau_n is taken as 1 - k/n from the fit).
ExtrapolationInputs make_extrapolation_inputs(std::span<const double> sorted,
                                              const TailFit& fit, double p_n);

/// Bare extrapolation formula
/// xi_hat + sigma * (ratio^{gamma/(1-gamma)} - 1)/gamma, ratio = (1-tau_n)/p_n,
/// with the gamma -> 0 limit handled.
double extrapolate_expectile_value(double intermediate_expectile, double sigma,
                                   double gamma, double ratio);

/// Extrapolated LAWS estimator of xi_{1-p_n}. Direct refits the scale at
/// k' = round(n * Fbar_n(xi_hat)) exceedances with the fit's method; Alt
/// rescales the fitted a(n/k) by regular variation,
/// a(n/k) * ((1-tau_n)/Fbar_n(xi_hat))^gamma. The sorted sample is needed for
/// the Direct refit only.
ExpectileEstimate laws_extrapolated(std::span<const double> sorted,
                                    const ExtrapolationInputs& inputs, ScaleVariant variant);

/// Quantile-based extrapolated expectile
/// xhat* - [(xhat* - mean)(1 - 1/gamma)]^{-gamma/(1-gamma)} (xhat* - qhat*)^{1/(1-gamma)}.
ExpectileEstimate qb_extrapolated(double sample_mean, const TailFit& fit, double p_n);

struct LevelSelection {
  double pi_n = 0.0;
  bool clamped = false;
};

/// Estimated asymmetry level pi_n such that xi_{1-pi_n} ~ q_{1-p_n}:
/// pi_n = p_n (xhat* - qhat*) / ((xhat* - mean)(1 - 1/gamma)),
/// clamped into (0, 1 - 1/n].
LevelSelection expectile_level_for_quantile(double sample_mean, const TailFit& fit,
                                            double p_n);

/// Population-parameter version of the level selector (for oracle checks).
double expectile_level_for_quantile_oracle(double gamma, double endpoint, double mean,
                                           double quantile_at_level, double p_n);

/// The i.i.d. asymptotic covariance of the joint intermediate LAWS/quantile
/// limit: V11 = 2/((1-gamma)(1-2gamma)), V12 = 1/(1-gamma), V22 = 1.
struct VarianceMatrix {
  double v11 = 0.0;
  double v12 = 0.0;
  double v22 = 0.0;
};

VarianceMatrix asymptotic_variance_iid(double gamma);

}  // namespace expectail
