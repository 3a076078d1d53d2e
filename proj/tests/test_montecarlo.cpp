#include <doctest.h>

#include <cmath>
#include <sstream>

#include "expectail/errors.hpp"
#include "expectail/montecarlo.hpp"

using namespace expectail;

namespace {

MCConfig smoke_config() {
  MCConfig config;
  config.model = ModelSpec::preset("beta-iid");
  config.n = 200;
  config.M = 40;
  config.k_grid = {10, 20, 40};
  config.seed = 7;
  return config;
}

}  // namespace

TEST_CASE("estimator labels round-trip") {
  for (const auto& spec : default_estimators()) {
    const auto back = estimator_from_label(estimator_label(spec));
    CHECK(back.id == spec.id);
    if (spec.id != EstimatorId::Empirical) CHECK(back.method == spec.method);
  }
  CHECK(default_estimators().size() == 7);
  CHECK_THROWS_AS(estimator_from_label("bogus"), DataError);
}

TEST_CASE("config resolution fills defaults") {
  MCConfig config;
  config.n = 300;
  const auto resolved = config.resolved();
  CHECK(resolved.p_target == doctest::Approx(1.0 / 300.0));
  CHECK(resolved.estimators.size() == 7);
  CHECK(resolved.k_grid.front() == 3);   // 1% of 300
  CHECK(resolved.k_grid.back() == 75);   // 25% of 300
  CHECK(resolved.k_grid.size() == 73);
  for (std::size_t i = 1; i < resolved.k_grid.size(); ++i)
    CHECK(resolved.k_grid[i] > resolved.k_grid[i - 1]);
}

TEST_CASE("smoke study shape and the MSE decomposition") {
  const auto report = run_mc_study(smoke_config());
  CHECK(report.cells.size() == 7 * 3);
  CHECK(report.truth > 0.8);
  CHECK(report.truth < 1.0);
  for (std::size_t e = 0; e < 7; ++e) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto& c = report.cell(e, j);
      CHECK(c.failure_count + c.success_count == 40);
      if (c.success_count > 1) {
        // mse = variance + bias^2 on the x100 convention.
        const double bias2 = c.relative_bias_x100 * c.relative_bias_x100 / 100.0;
        CHECK(c.mse_x100 == doctest::Approx(c.variance_x100 + bias2).epsilon(1e-9));
        CHECK(c.mse_x100 >= c.variance_x100 - 1e-9);
      }
    }
  }
}

TEST_CASE("empirical estimator cells are constant across k") {
  const auto report = run_mc_study(smoke_config());
  std::size_t empirical = 0;
  for (std::size_t e = 0; e < report.config.estimators.size(); ++e)
    if (report.config.estimators[e].id == EstimatorId::Empirical) empirical = e;
  const auto& first = report.cell(empirical, 0);
  for (std::size_t j = 1; j < report.config.k_grid.size(); ++j) {
    CHECK(report.cell(empirical, j).relative_bias_x100 == first.relative_bias_x100);
    CHECK(report.cell(empirical, j).mse_x100 == first.mse_x100);
  }
}

TEST_CASE("single replicate has zero variance") {
  auto config = smoke_config();
  config.M = 1;
  const auto report = run_mc_study(config);
  for (std::size_t e = 0; e < 7; ++e) {
    const auto& c = report.cell(e, 0);
    if (c.success_count == 1) {
      CHECK(c.variance_x100 == 0.0);
      CHECK(c.mse_x100 ==
            doctest::Approx(c.relative_bias_x100 * c.relative_bias_x100 / 100.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("worker count does not change the report") {
  auto config = smoke_config();
  config.workers = 1;
  const auto a = run_mc_study(config);
  config.workers = 4;
  const auto b = run_mc_study(config);
  REQUIRE(a.cells.size() == b.cells.size());
  CHECK(a.truth == b.truth);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].relative_bias_x100 == b.cells[i].relative_bias_x100);
    CHECK(a.cells[i].variance_x100 == b.cells[i].variance_x100);
    CHECK(a.cells[i].mse_x100 == b.cells[i].mse_x100);
    CHECK(a.cells[i].failure_count == b.cells[i].failure_count);
  }
}

TEST_CASE("CSV export is long format and stable") {
  const auto report = run_mc_study(smoke_config());
  std::ostringstream a, b;
  report.write_csv(a);
  report.write_csv(b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("model,n,estimator,method,k,metric,value", 0) == 0);
  // 7 estimators x 3 k x 3 metrics (+ failure rows) at least:
  std::size_t lines = 0;
  for (char ch : a.str())
    if (ch == '\n') ++lines;
  CHECK(lines >= 1 + 7 * 3 * 3);
}

TEST_CASE("reference truths for all presets and sizes") {
  CHECK(reference_expectile_value(ModelSpec::preset("beta-iid"), 150) == doctest::Approx(0.8571));
  CHECK(reference_expectile_value(ModelSpec::preset("beta-iid"), 300) == doctest::Approx(0.8814));
  CHECK(reference_expectile_value(ModelSpec::preset("beta-iid"), 500) == doctest::Approx(0.8968));
  CHECK(reference_expectile_value(ModelSpec::preset("spl-iid"), 150) == doctest::Approx(4.5284));
  CHECK(reference_expectile_value(ModelSpec::preset("spl-iid"), 300) == doctest::Approx(4.5939));
  CHECK(reference_expectile_value(ModelSpec::preset("spl-iid"), 500) == doctest::Approx(4.6372));
  CHECK(reference_expectile_value(ModelSpec::preset("gev-iid"), 150) == doctest::Approx(1.9523));
  CHECK(reference_expectile_value(ModelSpec::preset("gev-iid"), 300) == doctest::Approx(2.1020));
  CHECK(reference_expectile_value(ModelSpec::preset("gev-iid"), 500) == doctest::Approx(2.2000));
  // Dependent models share the marginal truth.
  CHECK(reference_expectile_value(ModelSpec::preset("beta-ar1"), 300) ==
        reference_expectile_value(ModelSpec::preset("beta-iid"), 300));
  CHECK(reference_expectile_value(ModelSpec::preset("spl-ar1"), 150) ==
        reference_expectile_value(ModelSpec::preset("spl-iid"), 150));
  CHECK(reference_expectile_value(ModelSpec::preset("gev-ar1"), 500) ==
        reference_expectile_value(ModelSpec::preset("gev-iid"), 500));
  CHECK_THROWS_AS(reference_expectile_value(ModelSpec::preset("beta-iid"), 1000), DomainError);
}

TEST_CASE("reference_check oracle leg at one cell") {
  const auto check = reference_check(ModelSpec::preset("beta-iid"), 300, 5e-4, 400000, 11);
  CHECK(std::abs(check.oracle_value - check.table_value) < 5e-4);
  CHECK(check.pass);
}
