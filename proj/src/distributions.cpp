#include "expectail/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "expectail/errors.hpp"

namespace expectail {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_shape(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

}  // namespace

ModelSpec ModelSpec::beta(double alpha, double beta) {
  check_shape(alpha, "Beta alpha");
  check_shape(beta, "Beta beta");
  return ModelSpec{BetaParams{alpha, beta}};
}

ModelSpec ModelSpec::short_power_law(double endpoint, double scale, double shape) {
  check_shape(scale, "ShortPowerLaw scale");
  check_shape(shape, "ShortPowerLaw shape");
  if (!std::isfinite(endpoint)) throw DomainError("ShortPowerLaw endpoint must be finite");
  return ModelSpec{ShortPowerLawParams{endpoint, scale, shape}};
}

ModelSpec ModelSpec::gev(double gamma) {
  if (!(gamma < 0.0)) throw DomainError("GEV shape must be negative (short-tailed model)");
  return ModelSpec{GevParams{gamma}};
}

ModelSpec ModelSpec::with_ar1(double rho) const {
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("AR(1) correlation must lie in (-1,1)");
  ModelSpec out = *this;
  out.dependence = Dependence::Ar1;
  out.rho = rho;
  return out;
}

ModelSpec ModelSpec::preset(const std::string& name) {
  // Simulation models (i)-(vi): Beta(3, 5/2), short power law (5, 1/3, 3),
  // GEV(-1/3); AR(1) correlations 0.95, 0.5, 0.8 respectively.
  if (name == "beta-iid") return beta(3.0, 2.5);
  if (name == "spl-iid") return short_power_law(5.0, 1.0 / 3.0, 3.0);
  if (name == "gev-iid") return gev(-1.0 / 3.0);
  if (name == "beta-ar1") return beta(3.0, 2.5).with_ar1(0.95);
  if (name == "spl-ar1") return short_power_law(5.0, 1.0 / 3.0, 3.0).with_ar1(0.5);
  if (name == "gev-ar1") return gev(-1.0 / 3.0).with_ar1(0.8);
  throw DomainError("unknown model preset: " + name);
}

std::vector<std::string> ModelSpec::preset_names() {
  return {"beta-iid", "spl-iid", "gev-iid", "beta-ar1", "spl-ar1", "gev-ar1"};
}

ModelSpec ModelSpec::marginal() const {
  ModelSpec out = *this;
  out.dependence = Dependence::Iid;
  out.rho = 0.0;
  return out;
}

double ModelSpec::support_lower() const {
  return std::visit(
      overloaded{[](const BetaParams&) { return 0.0; },
                 [](const ShortPowerLawParams& p) {
                   return p.endpoint - std::pow(p.scale, -1.0 / p.shape);
                 },
                 [](const GevParams&) { return -std::numeric_limits<double>::infinity(); }},
      family);
}

double ModelSpec::support_upper() const {
  return std::visit(overloaded{[](const BetaParams&) { return 1.0; },
                               [](const ShortPowerLawParams& p) { return p.endpoint; },
                               [](const GevParams& p) { return -1.0 / p.gamma; }},
                    family);
}

double ModelSpec::evi() const {
  return std::visit(overloaded{[](const BetaParams& p) { return -1.0 / p.beta; },
                               [](const ShortPowerLawParams& p) { return -1.0 / p.shape; },
                               [](const GevParams& p) { return p.gamma; }},
                    family);
}

double ModelSpec::mean() const {
  return std::visit(
      overloaded{[](const BetaParams& p) { return p.alpha / (p.alpha + p.beta); },
                 [](const ShortPowerLawParams& p) {
                   // E(X) = endpoint - K^{-1/alpha} * alpha/(alpha+1)
                   return p.endpoint -
                          std::pow(p.scale, -1.0 / p.shape) * p.shape / (p.shape + 1.0);
                 },
                 [](const GevParams& p) {
                   return (std::tgamma(1.0 - p.gamma) - 1.0) / p.gamma;
                 }},
      family);
}

std::string ModelSpec::family_name() const {
  return std::visit(overloaded{[](const BetaParams&) { return std::string("beta"); },
                               [](const ShortPowerLawParams&) { return std::string("spl"); },
                               [](const GevParams&) { return std::string("gev"); }},
                    family);
}

double quantile(const ModelSpec& model, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie strictly in (0,1)");
  return std::visit(
      overloaded{[&](const BetaParams& p) {
                   return boost::math::ibeta_inv(p.alpha, p.beta, u);
                 },
                 [&](const ShortPowerLawParams& p) {
                   return p.endpoint - std::pow((1.0 - u) / p.scale, 1.0 / p.shape);
                 },
                 [&](const GevParams& p) {
                   return (std::pow(-std::log(u), -p.gamma) - 1.0) / p.gamma;
                 }},
      model.family);
}

double cdf(const ModelSpec& model, double x) {
  const double lo = model.support_lower();
  const double hi = model.support_upper();
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return std::visit(
      overloaded{[&](const BetaParams& p) { return boost::math::ibeta(p.alpha, p.beta, x); },
                 [&](const ShortPowerLawParams& p) {
                   return 1.0 - p.scale * std::pow(p.endpoint - x, p.shape);
                 },
                 [&](const GevParams& p) {
                   return std::exp(-std::pow(1.0 + p.gamma * x, -1.0 / p.gamma));
                 }},
      model.family);
}

double pdf(const ModelSpec& model, double x) {
  const double lo = model.support_lower();
  const double hi = model.support_upper();
  if (x <= lo || x >= hi) return 0.0;
  return std::visit(
      overloaded{[&](const BetaParams& p) {
                   return std::exp((p.alpha - 1.0) * std::log(x) +
                                   (p.beta - 1.0) * std::log1p(-x)) /
                          boost::math::beta(p.alpha, p.beta);
                 },
                 [&](const ShortPowerLawParams& p) {
                   return p.scale * p.shape * std::pow(p.endpoint - x, p.shape - 1.0);
                 },
                 [&](const GevParams& p) {
                   const double t = std::pow(1.0 + p.gamma * x, -1.0 / p.gamma);
                   return std::exp(-t) * t / (1.0 + p.gamma * x);
                 }},
      model.family);
}

std::vector<double> sample_iid(const ModelSpec& model, std::size_t n, SeededStream stream) {
  if (n == 0) throw DomainError("sample size must be positive");
  SubstreamRng rng(stream);
  std::vector<double> out(n);
  for (auto& x : out) x = quantile(model, rng.uniform01());
  return out;
}

std::vector<double> sample_ar1_copula(const ModelSpec& model, std::size_t n,
                                      std::size_t burn_in, SeededStream stream) {
  if (n == 0) throw DomainError("sample size must be positive");
  if (model.dependence != Dependence::Ar1)
    throw DomainError("sample_ar1_copula requires an AR(1) model");
  SubstreamRng rng(stream);
  const double rho = model.rho;
  const double innovation_scale = std::sqrt(1.0 - rho * rho);
  // Y_0 ~ N(0,1): the chain is stationary from the first observation,
  // so burn-in defaults to 0.
  double y = rng.normal();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t t = 0; t < burn_in; ++t) y = rho * y + innovation_scale * rng.normal();
  for (std::size_t t = 0; t < n; ++t) {
    out.push_back(quantile(model, standard_normal_cdf(y)));
    y = rho * y + innovation_scale * rng.normal();
  }
  return out;
}

std::vector<double> sample(const ModelSpec& model, std::size_t n, SeededStream stream) {
  if (model.dependence == Dependence::Ar1) return sample_ar1_copula(model, n, 0, stream);
  return sample_iid(model, n, stream);
}

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

}  // namespace expectail
