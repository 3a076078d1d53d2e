#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "expectail/rng.hpp"

namespace expectail {

struct BetaParams {
  double alpha;  // first shape, > 0
  double beta;   // second shape, > 0
};

/// F(x) = 1 - K (endpoint - x)^shape on [endpoint - K^(-1/shape), endpoint].
struct ShortPowerLawParams {
  double endpoint;
  double scale;  // K > 0
  double shape;  // alpha > 0
};

/// F(x) = exp(-(1 + gamma x)^(-1/gamma)), restricted here to gamma < 0.
struct GevParams {
  double gamma;
};

enum class Dependence { Iid, Ar1 };

/// A simulation model: a short-tailed marginal family, optionally wrapped
/// in an AR(1) Gaussian copula.
struct ModelSpec {
  std::variant<BetaParams, ShortPowerLawParams, GevParams> family;
  Dependence dependence = Dependence::Iid;
  double rho = 0.0;  // AR(1) correlation, in (-1,1)

  static ModelSpec beta(double alpha, double beta);
  static ModelSpec short_power_law(double endpoint, double scale, double shape);
  static ModelSpec gev(double gamma);

  /// Same marginal with an AR(1) Gaussian copula of correlation rho.
  ModelSpec with_ar1(double rho) const;

  /// Named presets: beta-iid, spl-iid, gev-iid, beta-ar1, spl-ar1, gev-ar1.
  static ModelSpec preset(const std::string& name);
  static std::vector<std::string> preset_names();

  ModelSpec marginal() const;

  double support_lower() const;
  double support_upper() const;
  /// Extreme value index of the marginal.
  double evi() const;
  /// Closed-form expectation of the marginal.
  double mean() const;

  std::string family_name() const;
};

/// Marginal quantile function F^{-1}(u), u in (0,1).
double quantile(const ModelSpec& model, double u);

/// Marginal distribution function, clamped to [0,1] outside the support.
double cdf(const ModelSpec& model, double x);

/// Marginal density (used by quadrature oracles).
double pdf(const ModelSpec& model, double x);

/// n i.i.d. inverse-transform draws from the marginal.
std::vector<double> sample_iid(const ModelSpec& model, std::size_t n, SeededStream stream);

/// AR(1) Gaussian copula series X_t = q(Phi(Y_t)) with stationary
/// initialization Y_0 ~ N(0,1); the first burn_in values are discarded.
std::vector<double> sample_ar1_copula(const ModelSpec& model, std::size_t n,
                                      std::size_t burn_in, SeededStream stream);

/// Dispatches on model.dependence (burn-in 0 for the copula sampler).
std::vector<double> sample(const ModelSpec& model, std::size_t n, SeededStream stream);

/// Standard normal CDF.
double standard_normal_cdf(double x);

}  // namespace expectail
