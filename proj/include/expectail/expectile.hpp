#pragma once

#include <optional>
#include <span>
#include <string>

#include "expectail/distributions.hpp"

namespace expectail {

enum class ExpectileMethod {
  EmpiricalLaws,
  ExtrapolatedLaws,
  ExtrapolatedLawsAlt,
  QuantileBased,
  Oracle,
};

enum class ScaleVariant { Direct, Alt };

std::string to_string(ExpectileMethod m);
std::string to_string(ScaleVariant v);

/// An expectile value together with its asymmetry level and provenance.
struct ExpectileEstimate {
  double level = 0.0;  // asymmetry level tau, strictly in (0,1)
  double value = 0.0;
  ExpectileMethod method = ExpectileMethod::EmpiricalLaws;
  std::optional<int> k_used;
  std::optional<ScaleVariant> scale_variant;
};

/// Empirical (LAWS) expectile: the exact minimizer of
/// sum_t eta_tau(X_t - theta). The first-order condition is piecewise linear
/// and strictly decreasing in theta, so the solver sorts once, locates the
/// bracketing pair of order statistics and solves the linear equation in
/// closed form; no iterative tolerance is involved.
ExpectileEstimate empirical_expectile(std::span<const double> sample, double tau);

/// Same solver on an already ascending-sorted sample.
double empirical_expectile_sorted(std::span<const double> sorted, double tau);

/// (1/n) sum (X_t - x)^kappa 1{X_t > x}, kappa in {1,2}.
double empirical_tail_moment(std::span<const double> sample, double x, int kappa);

/// Empirical survival function of the Jones E-distribution:
/// phi(x) / (2 phi(x) + x - mean). The expectile at level tau is the
/// (1-tau)-survival point of E.
double empirical_e_survival(std::span<const double> sample, double x);

/// Fraction of observations strictly exceeding x.
double empirical_survival(std::span<const double> sample, double x);
double empirical_survival_sorted(std::span<const double> sorted, double x);

/// True expectile of a known marginal model: solves
/// Ebar(xi) = 1 - tau with phi^(1)(x) = integral_x^{x*} (1-F(u)) du computed
/// by adaptive Gauss-Kronrod quadrature (abs tol tol/10) and the root located
/// by bracketed bisection to tolerance tol.
ExpectileEstimate oracle_expectile(const ModelSpec& model, double tau, double tol);

/// Population tail moment phi^(1)(x) of a known marginal, by quadrature.
double oracle_tail_moment(const ModelSpec& model, double x, double abs_tol);

}  // namespace expectail
