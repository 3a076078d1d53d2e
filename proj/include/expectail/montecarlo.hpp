#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "expectail/distributions.hpp"
#include "expectail/extreme_expectile.hpp"

namespace expectail {

enum class EstimatorId { Empirical, LawsDirect, LawsAlt, QuantileBased };

/// One estimator identity in a study; `method` is ignored for Empirical.
struct EstimatorSpec {
  EstimatorId id = EstimatorId::Empirical;
  FitMethod method = FitMethod::GpMaximumLikelihood;
};

std::string estimator_label(const EstimatorSpec& spec);
EstimatorSpec estimator_from_label(const std::string& label);

/// The seven estimators compared in the simulation study: empirical plus
/// {LAWS, LAWS-alt, QB} x {GPML, Moment}.
std::vector<EstimatorSpec> default_estimators();

struct MCConfig {
  ModelSpec model = ModelSpec::preset("beta-iid");
  int n = 300;
  int M = 1000;
  double p_target = 0.0;          // 0 -> 1/n
  std::vector<int> k_grid;        // empty -> every integer in [1%, 25%] of n
  std::vector<EstimatorSpec> estimators;  // empty -> default_estimators()
  std::uint64_t seed = 1;
  int workers = 1;

  MCConfig resolved() const;  // fills defaults, validates
};

/// Aggregates of the relative error e = xi_hat/xi - 1, all multiplied by 100.
struct MCCell {
  double relative_bias_x100 = 0.0;
  double variance_x100 = 0.0;
  double mse_x100 = 0.0;
  int failure_count = 0;
  int success_count = 0;
};

struct MCReport {
  MCConfig config;          // resolved
  double truth = 0.0;       // oracle expectile at 1 - p_target
  std::vector<MCCell> cells;  // estimator-major: cells[e * |k_grid| + j]

  const MCCell& cell(std::size_t estimator_index, std::size_t k_index) const;
  /// Long-format CSV: model,n,estimator,method,k,metric,value.
  void write_csv(std::ostream& out) const;
};

/// Simulates M replicates on deterministic substreams, evaluates every
/// configured estimator at level 1 - p_target for every k, and aggregates
/// relative bias/variance/MSE. Replicates where an estimator errors are
/// excluded from that cell and counted in failure_count. Results are
/// independent of the worker count.
MCReport run_mc_study(const MCConfig& config);

struct ReferenceCheck {
  double table_value = 0.0;
  double oracle_value = 0.0;
  double mc_value = 0.0;
  double mc_standard_error = 0.0;
  bool pass = false;
};

/// Reference truth for the six preset models at n in {150, 300, 500}.
double reference_expectile_value(const ModelSpec& model, int n);

/// Compares the quadrature oracle against the tabulated truth and against a
/// fresh empirical expectile on mc_draws i.i.d. draws. Passes when the oracle
/// is within tol of the table and the Monte Carlo value is within
/// max(tol, 4 standard errors) of the oracle.
ReferenceCheck reference_check(const ModelSpec& model, int n, double tol,
                         long long mc_draws = 4'000'000, std::uint64_t seed = 42);

}  // namespace expectail
