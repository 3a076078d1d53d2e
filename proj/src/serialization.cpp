#include "expectail/serialization.hpp"

#include <string>

#include "expectail/errors.hpp"

namespace expectail {

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const char* what) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      throw DataError(std::string("unknown key '") + item.key() + "' in " + what);
  }
}

double require_number(const json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw DataError(std::string(what) + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const ModelSpec& model) {
  json j;
  j["family"] = model.family_name();
  if (const auto* b = std::get_if<BetaParams>(&model.family)) {
    j["alpha"] = b->alpha;
    j["beta"] = b->beta;
  } else if (const auto* s = std::get_if<ShortPowerLawParams>(&model.family)) {
    j["endpoint"] = s->endpoint;
    j["scale"] = s->scale;
    j["shape"] = s->shape;
  } else {
    j["gamma"] = std::get<GevParams>(model.family).gamma;
  }
  j["dependence"] = model.dependence == Dependence::Ar1 ? "ar1" : "iid";
  if (model.dependence == Dependence::Ar1) j["rho"] = model.rho;
  return j;
}

ModelSpec model_from_json(const json& j) {
  if (!j.is_object()) throw DataError("model: expected a JSON object");
  if (!j.contains("family") || !j.at("family").is_string())
    throw DataError("model: missing string field 'family'");
  const std::string family = j.at("family").get<std::string>();

  ModelSpec model;
  if (family == "beta") {
    expect_keys(j, {"family", "alpha", "beta", "dependence", "rho"}, "model");
    model = ModelSpec::beta(require_number(j, "alpha", "model"),
                            require_number(j, "beta", "model"));
  } else if (family == "spl" || family == "short-power-law") {
    expect_keys(j, {"family", "endpoint", "scale", "shape", "dependence", "rho"},
                "model");
    model = ModelSpec::short_power_law(require_number(j, "endpoint", "model"),
                                       require_number(j, "scale", "model"),
                                       require_number(j, "shape", "model"));
  } else if (family == "gev") {
    expect_keys(j, {"family", "gamma", "dependence", "rho"}, "model");
    model = ModelSpec::gev(require_number(j, "gamma", "model"));
  } else {
    throw DataError("model: unknown family '" + family + "'");
  }

  if (j.contains("dependence")) {
    const std::string dep = j.at("dependence").get<std::string>();
    if (dep == "ar1") {
      model = model.with_ar1(require_number(j, "rho", "model"));
    } else if (dep != "iid") {
      throw DataError("model: unknown dependence '" + dep + "'");
    }
  }
  return model;
}

json to_json(const TailFit& fit) {
  return json{{"gamma_hat", fit.gamma_hat}, {"scale_hat", fit.scale_hat},
              {"k", fit.k},                 {"threshold", fit.threshold},
              {"n", fit.n},                 {"method", to_string(fit.method)},
              {"shift", fit.shift}};
}

TailFit tail_fit_from_json(const json& j) {
  if (!j.is_object()) throw DataError("tail fit: expected a JSON object");
  expect_keys(j, {"gamma_hat", "scale_hat", "k", "threshold", "n", "method", "shift"},
              "tail fit");
  TailFit fit;
  fit.gamma_hat = require_number(j, "gamma_hat", "tail fit");
  fit.scale_hat = require_number(j, "scale_hat", "tail fit");
  fit.k = static_cast<int>(require_number(j, "k", "tail fit"));
  fit.threshold = require_number(j, "threshold", "tail fit");
  fit.n = static_cast<int>(require_number(j, "n", "tail fit"));
  if (!j.contains("method") || !j.at("method").is_string())
    throw DataError("tail fit: missing string field 'method'");
  fit.method = fit_method_from_string(j.at("method").get<std::string>());
  fit.shift = j.value("shift", 0.0);
  return fit;
}

json to_json(const ExpectileEstimate& estimate) {
  json j{{"level", estimate.level},
         {"value", estimate.value},
         {"method", to_string(estimate.method)}};
  if (estimate.k_used) j["k"] = *estimate.k_used;
  if (estimate.scale_variant) j["scale_variant"] = to_string(*estimate.scale_variant);
  return j;
}

json to_json(const MCConfig& config) {
  json estimators = json::array();
  for (const auto& spec : config.estimators) estimators.push_back(estimator_label(spec));
  // The worker count is deliberately omitted: it must not influence any
  // output file, so serialized reports stay byte-identical across it.
  return json{{"model", to_json(config.model)},
              {"n", config.n},
              {"M", config.M},
              {"p_target", config.p_target},
              {"k_grid", config.k_grid},
              {"estimators", estimators},
              {"seed", config.seed}};
}

MCConfig mc_config_from_json(const json& j) {
  if (!j.is_object()) throw DataError("config: expected a JSON object");
  expect_keys(j,
              {"model", "n", "M", "p_target", "k_grid", "estimators", "seed", "workers"},
              "config");
  MCConfig config;
  if (j.contains("model")) {
    if (j.at("model").is_string())
      config.model = ModelSpec::preset(j.at("model").get<std::string>());
    else
      config.model = model_from_json(j.at("model"));
  }
  config.n = j.value("n", config.n);
  config.M = j.value("M", config.M);
  config.p_target = j.value("p_target", config.p_target);
  if (j.contains("k_grid")) config.k_grid = j.at("k_grid").get<std::vector<int>>();
  if (j.contains("estimators")) {
    for (const auto& label : j.at("estimators"))
      config.estimators.push_back(estimator_from_label(label.get<std::string>()));
  }
  config.seed = j.value("seed", config.seed);
  config.workers = j.value("workers", config.workers);
  return config;
}

json to_json(const MCReport& report) {
  json cells = json::array();
  const std::size_t k_count = report.config.k_grid.size();
  for (std::size_t e = 0; e < report.config.estimators.size(); ++e) {
    for (std::size_t i = 0; i < k_count; ++i) {
      const MCCell& c = report.cell(e, i);
      cells.push_back(json{{"estimator", estimator_label(report.config.estimators[e])},
                           {"k", report.config.k_grid[i]},
                           {"relative_bias_x100", c.relative_bias_x100},
                           {"variance_x100", c.variance_x100},
                           {"mse_x100", c.mse_x100},
                           {"failures", c.failure_count},
                           {"successes", c.success_count}});
    }
  }
  return json{{"config", to_json(report.config)}, {"truth", report.truth},
              {"cells", cells}};
}

json to_json(const ScoreReport& report) {
  json entries = json::array();
  for (std::size_t f = 0; f < report.forecasters.size(); ++f) {
    for (std::size_t l = 0; l < report.level_grid.size(); ++l) {
      const ScoreEntry& e = report.entry(f, l);
      entries.push_back(json{{"forecaster", forecaster_label(report.forecasters[f])},
                             {"level", report.level_grid[l]},
                             {"avg_loss", e.avg_loss},
                             {"opt_k", e.opt_k},
                             {"fallbacks", e.fallback_count}});
    }
  }
  return json{{"forecast_cases", report.forecast_cases},
              {"k_grid", report.k_grid},
              {"entries", entries}};
}

}  // namespace expectail
