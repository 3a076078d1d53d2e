#include "expectail/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "expectail/errors.hpp"
#include "expectail/parallel.hpp"

namespace expectail {

std::string estimator_label(const EstimatorSpec& spec) {
  switch (spec.id) {
    case EstimatorId::Empirical: return "empirical";
    case EstimatorId::LawsDirect: return "laws-" + to_string(spec.method);
    case EstimatorId::LawsAlt: return "laws-alt-" + to_string(spec.method);
    case EstimatorId::QuantileBased: return "qb-" + to_string(spec.method);
  }
  return "unknown";
}

EstimatorSpec estimator_from_label(const std::string& label) {
  for (const auto& spec : default_estimators())
    if (estimator_label(spec) == label) return spec;
  throw DataError("unknown estimator label: " + label);
}

std::vector<EstimatorSpec> default_estimators() {
  const auto gpml = FitMethod::GpMaximumLikelihood;
  const auto mom = FitMethod::Moment;
  return {{EstimatorId::Empirical, gpml},  {EstimatorId::LawsDirect, gpml},
          {EstimatorId::LawsAlt, gpml},    {EstimatorId::QuantileBased, gpml},
          {EstimatorId::LawsDirect, mom},  {EstimatorId::LawsAlt, mom},
          {EstimatorId::QuantileBased, mom}};
}

MCConfig MCConfig::resolved() const {
  MCConfig out = *this;
  if (out.n < 10) throw DomainError("study sample size too small");
  if (out.M < 1) throw DomainError("M must be >= 1");
  if (out.p_target == 0.0) out.p_target = 1.0 / out.n;
  if (!(out.p_target > 0.0 && out.p_target < 1.0))
    throw DomainError("p_target must lie in (0,1)");
  if (out.k_grid.empty()) {
    const int lo = std::max(2, static_cast<int>(std::ceil(0.01 * out.n)));
    const int hi = std::min(out.n - 1, static_cast<int>(std::floor(0.25 * out.n)));
    for (int k = lo; k <= hi; ++k) out.k_grid.push_back(k);
  }
  if (out.k_grid.empty()) throw DomainError("empty k grid");
  for (std::size_t i = 0; i < out.k_grid.size(); ++i) {
    const int k = out.k_grid[i];
    if (k < 2 || k >= out.n) throw DomainError("k grid entries must lie in [2, n-1]");
    if (i > 0 && k <= out.k_grid[i - 1])
      throw DomainError("k grid must be strictly increasing");
  }
  if (out.estimators.empty()) out.estimators = default_estimators();
  if (out.workers < 1) out.workers = 1;
  return out;
}

const MCCell& MCReport::cell(std::size_t estimator_index, std::size_t k_index) const {
  return cells[estimator_index * config.k_grid.size() + k_index];
}

void MCReport::write_csv(std::ostream& out) const {
  out << "model,n,estimator,method,k,metric,value\n";
  const std::string model = config.model.family_name() +
                            (config.model.dependence == Dependence::Ar1 ? "-ar1" : "-iid");
  const char* metrics[] = {"relative_bias_x100", "variance_x100", "mse_x100",
                           "failure_count"};
  for (std::size_t e = 0; e < config.estimators.size(); ++e) {
    const auto& spec = config.estimators[e];
    const std::string method =
        spec.id == EstimatorId::Empirical ? "none" : to_string(spec.method);
    for (std::size_t j = 0; j < config.k_grid.size(); ++j) {
      const MCCell& c = cell(e, j);
      const double values[] = {c.relative_bias_x100, c.variance_x100, c.mse_x100,
                               static_cast<double>(c.failure_count)};
      for (int m = 0; m < 4; ++m) {
        out << model << ',' << config.n << ',' << estimator_label(spec) << ',' << method
            << ',' << config.k_grid[j] << ',' << metrics[m] << ',' << values[m] << '\n';
      }
    }
  }
}

namespace {

// One replicate: every configured estimator at every k. NaN marks a failure.
void evaluate_replicate(const MCConfig& cfg, std::uint64_t replicate, double tau_prime,
                        double* out /* estimators x k_grid */) {
  const auto sample = expectail::sample(cfg.model, static_cast<std::size_t>(cfg.n),
                                        SeededStream{cfg.seed, replicate});
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  const double mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(cfg.n);
  const std::size_t k_count = cfg.k_grid.size();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::fill(out, out + cfg.estimators.size() * k_count, nan);

  double empirical = nan;
  try {
    empirical = empirical_expectile_sorted(sorted, tau_prime);
  } catch (const Error&) {
  }

  for (std::size_t j = 0; j < k_count; ++j) {
    const int k = cfg.k_grid[j];
    TailFit fits[2];
    bool have_fit[2] = {false, false};
    auto fit_for = [&](FitMethod m) -> const TailFit& {
      const int idx = (m == FitMethod::GpMaximumLikelihood) ? 0 : 1;
      if (!have_fit[idx]) {
        fits[idx] = fit_tail(sorted, k, m);
        have_fit[idx] = true;
      }
      return fits[idx];
    };

    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      const auto& spec = cfg.estimators[e];
      double value = nan;
      try {
        switch (spec.id) {
          case EstimatorId::Empirical:
            value = empirical;
            break;
          case EstimatorId::LawsDirect:
          case EstimatorId::LawsAlt: {
            const auto inputs =
                make_extrapolation_inputs(sorted, fit_for(spec.method), cfg.p_target);
            value = laws_extrapolated(sorted, inputs,
                                      spec.id == EstimatorId::LawsDirect
                                          ? ScaleVariant::Direct
                                          : ScaleVariant::Alt)
                        .value;
            break;
          }
          case EstimatorId::QuantileBased:
            value = qb_extrapolated(mean, fit_for(spec.method), cfg.p_target).value;
            break;
        }
      } catch (const Error&) {
      }
      out[e * k_count + j] = value;
    }
  }
}

}  // namespace

MCReport run_mc_study(const MCConfig& raw) {
  const MCConfig cfg = raw.resolved();
  const double tau_prime = 1.0 - cfg.p_target;
  const double truth =
      oracle_expectile(cfg.model.marginal(), tau_prime, 1e-7).value;
  if (!std::isfinite(truth) || truth == 0.0)
    throw ConvergenceError("oracle expectile failed for the study model");

  const std::size_t k_count = cfg.k_grid.size();
  const std::size_t cell_count = cfg.estimators.size() * k_count;
  std::vector<double> values(static_cast<std::size_t>(cfg.M) * cell_count);

  parallel_for(static_cast<std::size_t>(cfg.M), cfg.workers, [&](std::size_t m) {
    evaluate_replicate(cfg, m, tau_prime, values.data() + m * cell_count);
  });

  // Sequential reduction in replicate order keeps results independent of the
  // worker count.
  MCReport report{cfg, truth, std::vector<MCCell>(cell_count)};
  for (std::size_t c = 0; c < cell_count; ++c) {
    double sum = 0.0, sum_sq = 0.0;
    int successes = 0;
    for (int m = 0; m < cfg.M; ++m) {
      const double v = values[static_cast<std::size_t>(m) * cell_count + c];
      if (!std::isfinite(v)) continue;
      const double e = v / truth - 1.0;
      sum += e;
      sum_sq += e * e;
      ++successes;
    }
    MCCell& cell = report.cells[c];
    cell.success_count = successes;
    cell.failure_count = cfg.M - successes;
    if (successes > 0) {
      const double mean_e = sum / successes;
      const double mean_e2 = sum_sq / successes;
      cell.relative_bias_x100 = 100.0 * mean_e;
      cell.variance_x100 = 100.0 * std::max(0.0, mean_e2 - mean_e * mean_e);
      cell.mse_x100 = 100.0 * mean_e2;
    }
  }
  return report;
}

double reference_expectile_value(const ModelSpec& model, int n) {
  const std::string family = model.family_name();
  struct Row {
    const char* family;
    int n;
    double value;
  };
  static constexpr Row rows[] = {
      {"beta", 150, 0.8571}, {"beta", 300, 0.8814}, {"beta", 500, 0.8968},
      {"spl", 150, 4.5284},  {"spl", 300, 4.5939},  {"spl", 500, 4.6372},
      {"gev", 150, 1.9523},  {"gev", 300, 2.1020},  {"gev", 500, 2.2000},
  };
  for (const auto& row : rows)
    if (family == row.family && n == row.n) return row.value;
  throw DomainError("no tabulated truth for model " + family + " at n=" + std::to_string(n));
}

ReferenceCheck reference_check(const ModelSpec& model, int n, double tol, long long mc_draws,
                         std::uint64_t seed) {
  const ModelSpec marginal = model.marginal();
  const double tau = 1.0 - 1.0 / static_cast<double>(n);
  const double table = reference_expectile_value(model, n);
  const double oracle = oracle_expectile(marginal, tau, 1e-7).value;

  const auto sample =
      sample_iid(marginal, static_cast<std::size_t>(mc_draws), SeededStream{seed, 0});
  const double mc = empirical_expectile(sample, tau).value;

  // Asymptotic standard error of the empirical expectile at this level:
  // sd = a(1/Fbar(xi)) sqrt(V11(gamma) / (N Fbar(xi))), a(s) ~ -gamma (x* - xi).
  const double gamma = marginal.evi();
  const double surv = 1.0 - cdf(marginal, oracle);
  const double scale = -gamma * (marginal.support_upper() - oracle);
  const double se = scale * std::sqrt(asymptotic_variance_iid(gamma).v11 /
                                      (static_cast<double>(mc_draws) * surv));
  const bool pass =
      std::abs(oracle - table) <= tol && std::abs(mc - oracle) <= std::max(tol, 4.0 * se);
  return ReferenceCheck{table, oracle, mc, se, pass};
}

}  // namespace expectail
