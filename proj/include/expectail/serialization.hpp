#pragma once

#include <json.hpp>

#include "expectail/backtest.hpp"
#include "expectail/distributions.hpp"
#include "expectail/expectile.hpp"
#include "expectail/montecarlo.hpp"
#include "expectail/tail_fit.hpp"

namespace expectail {

// JSON field names are part of the CLI contract; unknown keys are rejected
// when parsing.

nlohmann::json to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TailFit& fit);
TailFit tail_fit_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExpectileEstimate& estimate);

nlohmann::json to_json(const MCConfig& config);
MCConfig mc_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MCReport& report);

nlohmann::json to_json(const ScoreReport& report);

}  // namespace expectail
