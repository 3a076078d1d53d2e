// expectail: simulation, estimation, Monte Carlo and backtesting front-end.
//
// Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical or
// estimation failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "expectail/backtest.hpp"
#include "expectail/data_io.hpp"
#include "expectail/distributions.hpp"
#include "expectail/errors.hpp"
#include "expectail/expectile.hpp"
#include "expectail/extreme_expectile.hpp"
#include "expectail/montecarlo.hpp"
#include "expectail/serialization.hpp"
#include "expectail/tail_fit.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// FNV-1a 64-bit content digest for the run manifest.
std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw expectail::DataError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const json& config, std::uint64_t seed,
                    const std::vector<std::string>& inputs, double wall_seconds) {
  json inputs_json = json::object();
  for (const auto& path : inputs) inputs_json[path] = file_digest(path);
  const json manifest{{"command", command},       {"config", config},
                      {"seed", seed},             {"version", kVersion},
                      {"wall_clock_seconds", wall_seconds},
                      {"inputs", inputs_json}};
  std::ofstream out(out_path);
  if (!out) throw expectail::DataError("cannot write " + out_path);
  out << manifest.dump(2) << '\n';
}

std::vector<double> load_value_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw expectail::DataError("cannot open " + path);
  std::vector<double> values;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t consumed = 0;
      const double v = std::stod(line, &consumed);
      if (consumed != line.size()) throw std::invalid_argument("trailing junk");
      values.push_back(v);
    } catch (const std::exception&) {
      if (line_number == 1) continue;  // header row
      throw expectail::DataError(path + ": line " + std::to_string(line_number) +
                                 ": cannot parse value '" + line + "'");
    }
  }
  if (values.empty()) throw expectail::DataError(path + ": no numeric values");
  return values;
}

void write_value_csv(const std::string& path, const std::vector<double>& values,
                     const char* header) {
  std::ofstream out(path);
  if (!out) throw expectail::DataError("cannot write " + path);
  out << header << '\n' << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

std::vector<double> parse_level_grid(const std::string& text) {
  if (text == "default") return expectail::default_level_grid();
  std::vector<double> levels;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field.empty()) continue;
    levels.push_back(std::stod(field));
  }
  for (double l : levels)
    if (!(l > 0.0 && l < 1.0))
      throw CLI::ValidationError("--level-grid", "levels must lie strictly in (0,1)");
  if (levels.empty()) throw CLI::ValidationError("--level-grid", "no levels given");
  return levels;
}

std::vector<int> make_k_grid(int k, int k_min, int k_max, int k_step) {
  if (k > 0) return {k};
  if (k_min <= 0 || k_max <= k_min)
    throw CLI::ValidationError("--k-min/--k-max", "need 0 < k-min < k-max");
  std::vector<int> grid;
  for (int v = k_min; v <= k_max; v += k_step) grid.push_back(v);
  return grid;
}

int run(int argc, char** argv) {
  CLI::App app{"Extreme expectile estimation for short-tailed distributions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- simulate ----
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from a preset model");
  std::string sim_model = "beta-iid";
  int sim_n = 300;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "sample.csv";
  simulate->add_option("--model", sim_model, "Model preset")->capture_default_str();
  simulate->add_option("--n", sim_n, "Sample size")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--out", sim_out, "Output CSV path")->capture_default_str();

  // ---- estimate ----
  auto* estimate = app.add_subcommand("estimate", "Estimate an extreme expectile from a CSV");
  std::string est_input, est_out;
  double est_p = 0.0;
  int est_k = 0, est_k_min = 0, est_k_max = 0;
  bool est_auto_k = false;
  std::string est_method = "gpml", est_estimator = "laws";
  estimate->add_option("--input", est_input, "Input value CSV")->required();
  estimate->add_option("--p", est_p, "Extreme tail probability p_n")->required();
  estimate->add_option("--k", est_k, "Number of top order statistics");
  estimate->add_flag("--auto-k", est_auto_k, "Select k by path stability");
  estimate->add_option("--k-min", est_k_min, "Lower k bound for --auto-k");
  estimate->add_option("--k-max", est_k_max, "Upper k bound for --auto-k");
  estimate->add_option("--method", est_method, "Tail fit method")
      ->check(CLI::IsMember({"gpml", "moment"}));
  estimate->add_option("--estimator", est_estimator, "Estimator")
      ->check(CLI::IsMember({"empirical", "laws", "laws-alt", "qb"}));
  estimate->add_option("--out", est_out, "Optional JSON output path");

  // ---- mc-study ----
  auto* mc = app.add_subcommand("mc-study", "Monte Carlo bias/variance/MSE study");
  std::string mc_model = "beta-iid", mc_config_path, mc_out = ".";
  int mc_n = 300, mc_m = 1000, mc_k_min = 0, mc_k_max = 0, mc_workers = 1;
  double mc_p = 0.0;
  std::uint64_t mc_seed = 1;
  mc->add_option("--model", mc_model, "Model preset")->capture_default_str();
  mc->add_option("--n", mc_n, "Sample size")->check(CLI::PositiveNumber);
  mc->add_option("--M", mc_m, "Number of replicates")->check(CLI::PositiveNumber);
  mc->add_option("--p", mc_p, "Target tail probability (default 1/n)");
  mc->add_option("--k-min", mc_k_min, "Lower k bound (default 1% of n)");
  mc->add_option("--k-max", mc_k_max, "Upper k bound (default 25% of n)");
  mc->add_option("--seed", mc_seed, "RNG seed");
  mc->add_option("--workers", mc_workers, "Worker threads")->check(CLI::PositiveNumber);
  mc->add_option("--config", mc_config_path, "JSON config (overrides flags)");
  mc->add_option("--out", mc_out, "Output directory")->capture_default_str();

  // ---- backtest ----
  auto* bt = app.add_subcommand("backtest", "Rolling-window forecast backtest");
  std::string bt_input, bt_mode = "expectile", bt_levels = "default", bt_out = ".";
  int bt_n = 300, bt_k = 0, bt_k_min = 0, bt_k_max = 0, bt_k_step = 1, bt_workers = 1;
  bt->add_option("--input", bt_input, "Input loss-return CSV")->required();
  bt->add_option("--n", bt_n, "Rolling window length")->check(CLI::PositiveNumber);
  bt->add_option("--mode", bt_mode, "Forecast target")
      ->check(CLI::IsMember({"expectile", "quantile"}));
  bt->add_option("--level-grid", bt_levels,
                 "Comma-separated levels, or 'default' for 101 on [0.99, 0.9999]");
  bt->add_option("--k", bt_k, "Single k value");
  bt->add_option("--k-min", bt_k_min, "Lower k bound");
  bt->add_option("--k-max", bt_k_max, "Upper k bound");
  bt->add_option("--k-step", bt_k_step, "k grid step")->check(CLI::PositiveNumber);
  bt->add_option("--workers", bt_workers, "Worker threads")->check(CLI::PositiveNumber);
  bt->add_option("--out", bt_out, "Output directory")->capture_default_str();

  // ---- check-reference ----
  auto* t1 = app.add_subcommand("check-reference", "Check reference expectile truths");
  double t1_tol = 5e-4;
  long long t1_draws = 4000000;
  std::uint64_t t1_seed = 42;
  t1->add_option("--tol", t1_tol, "Tolerance")->capture_default_str();
  t1->add_option("--draws", t1_draws, "Monte Carlo cross-check draws")->capture_default_str();
  t1->add_option("--seed", t1_seed, "RNG seed");

  // ---- weekly-returns ----
  auto* wr = app.add_subcommand("weekly-returns", "Weekly loss returns from daily prices");
  std::string wr_input, wr_out = "losses.csv";
  std::string wr_date_col = "date", wr_price_col = "price", wr_fmt = "%Y-%m-%d";
  std::string wr_convention = "sunday";
  wr->add_option("--input", wr_input, "Daily price CSV")->required();
  wr->add_option("--date-column", wr_date_col)->capture_default_str();
  wr->add_option("--price-column", wr_price_col)->capture_default_str();
  wr->add_option("--date-format", wr_fmt)->capture_default_str();
  wr->add_option("--convention", wr_convention, "Week convention")
      ->check(CLI::IsMember({"sunday", "iso"}));
  wr->add_option("--out", wr_out, "Output CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (*simulate) {
    const auto model = expectail::ModelSpec::preset(sim_model);
    const auto xs = expectail::sample(model, static_cast<std::size_t>(sim_n),
                                      expectail::SeededStream{sim_seed, 0});
    write_value_csv(sim_out, xs, "value");
    write_manifest(sim_out + ".manifest.json", "simulate",
                   json{{"model", expectail::to_json(model)}, {"n", sim_n}}, sim_seed, {},
                   elapsed());
    std::cout << "wrote " << sim_out << " (" << sim_n << " values)\n";
    return 0;
  }

  if (*estimate) {
    if (!(est_p > 0.0 && est_p < 1.0))
      throw CLI::ValidationError("--p", "must lie strictly in (0,1)");
    const auto values = load_value_csv(est_input);
    const auto sorted = expectail::order_statistics(values);
    const int n = static_cast<int>(sorted.size());
    const auto method = expectail::fit_method_from_string(est_method);

    json result;
    result["n"] = n;
    result["p"] = est_p;
    if (est_estimator == "empirical") {
      const auto est = expectail::empirical_expectile(values, 1.0 - est_p);
      result["estimate"] = expectail::to_json(est);
    } else {
      int k = est_k;
      if (est_auto_k) {
        const int k_min = est_k_min > 0 ? est_k_min : std::max(2, n / 100);
        const int k_max = est_k_max > 0 ? est_k_max : n / 4;
        const auto sel = expectail::select_k_path_stability(sorted, k_min, k_max, method);
        k = sel.k;
        result["auto_k"] = json{{"k", sel.k},
                                {"gamma_hat", sel.gamma_hat},
                                {"fallback", sel.fallback},
                                {"k_min", k_min},
                                {"k_max", k_max}};
      }
      if (k < 2) throw CLI::ValidationError("--k", "need --k >= 2 or --auto-k");
      const auto fit = expectail::fit_tail(sorted, k, method);
      result["fit"] = expectail::to_json(fit);
      expectail::ExpectileEstimate est;
      if (est_estimator == "qb") {
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(n);
        est = expectail::qb_extrapolated(mean, fit, est_p);
      } else {
        const auto inputs = expectail::make_extrapolation_inputs(sorted, fit, est_p);
        est = expectail::laws_extrapolated(sorted, inputs,
                                           est_estimator == "laws"
                                               ? expectail::ScaleVariant::Direct
                                               : expectail::ScaleVariant::Alt);
      }
      result["estimate"] = expectail::to_json(est);
    }
    std::cout << result.dump(2) << '\n';
    if (!est_out.empty()) {
      std::ofstream out(est_out);
      if (!out) throw expectail::DataError("cannot write " + est_out);
      out << result.dump(2) << '\n';
      write_manifest(est_out + ".manifest.json", "estimate",
                     json{{"input", est_input},
                          {"p", est_p},
                          {"estimator", est_estimator},
                          {"method", est_method},
                          {"k", est_k},
                          {"auto_k", est_auto_k}},
                     0, {est_input}, elapsed());
    }
    return 0;
  }

  if (*mc) {
    expectail::MCConfig config;
    if (!mc_config_path.empty()) {
      std::ifstream in(mc_config_path);
      if (!in) throw expectail::DataError("cannot open " + mc_config_path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw expectail::DataError(mc_config_path + ": " + e.what());
      }
      config = expectail::mc_config_from_json(j);
    } else {
      config.model = expectail::ModelSpec::preset(mc_model);
      config.n = mc_n;
      config.M = mc_m;
      config.p_target = mc_p;
      config.seed = mc_seed;
      config.workers = mc_workers;
      if (mc_k_min > 0 && mc_k_max > mc_k_min) {
        for (int k = mc_k_min; k <= mc_k_max; ++k) config.k_grid.push_back(k);
      }
    }
    const auto report = expectail::run_mc_study(config);
    std::filesystem::create_directories(mc_out);
    const auto csv_path = (std::filesystem::path(mc_out) / "mc_report.csv").string();
    const auto json_path = (std::filesystem::path(mc_out) / "mc_report.json").string();
    {
      std::ofstream out(csv_path);
      if (!out) throw expectail::DataError("cannot write " + csv_path);
      report.write_csv(out);
    }
    {
      std::ofstream out(json_path);
      if (!out) throw expectail::DataError("cannot write " + json_path);
      out << expectail::to_json(report).dump(2) << '\n';
    }
    std::vector<std::string> inputs;
    if (!mc_config_path.empty()) inputs.push_back(mc_config_path);
    write_manifest((std::filesystem::path(mc_out) / "manifest.json").string(), "mc-study",
                   expectail::to_json(report.config), report.config.seed, inputs, elapsed());
    std::cout << "truth " << std::setprecision(10) << report.truth << ", wrote " << csv_path
              << '\n';
    return 0;
  }

  if (*bt) {
    const auto losses = load_value_csv(bt_input);
    expectail::RollingScheme scheme;
    scheme.series = losses;
    scheme.window_length = bt_n;
    if (static_cast<int>(losses.size()) <= bt_n)
      throw expectail::DataError("series shorter than the window: no forecast cases");
    if (scheme.stationarity_warning())
      std::cerr << "warning: series fails the split-sample mean-stability check\n";
    const auto levels = parse_level_grid(bt_levels);
    if (bt_k == 0 && bt_k_min == 0) {
      bt_k_min = std::max(2, bt_n / 100);
      bt_k_max = bt_n / 4;
      bt_k_step = std::max(1, (bt_k_max - bt_k_min) / 20);
    }
    const auto k_grid = make_k_grid(bt_k, bt_k_min, bt_k_max, bt_k_step);
    const auto report =
        bt_mode == "expectile"
            ? expectail::run_expectile_backtest(scheme, levels,
                                                expectail::default_expectile_forecasters(),
                                                k_grid, bt_workers)
            : expectail::run_quantile_backtest(scheme, levels,
                                               expectail::default_quantile_forecasters(),
                                               k_grid, bt_workers);
    std::filesystem::create_directories(bt_out);
    const auto csv_path = (std::filesystem::path(bt_out) / "scores.csv").string();
    const auto json_path = (std::filesystem::path(bt_out) / "scores.json").string();
    {
      std::ofstream out(csv_path);
      if (!out) throw expectail::DataError("cannot write " + csv_path);
      report.write_csv(out);
    }
    {
      std::ofstream out(json_path);
      if (!out) throw expectail::DataError("cannot write " + json_path);
      out << expectail::to_json(report).dump(2) << '\n';
    }
    write_manifest((std::filesystem::path(bt_out) / "manifest.json").string(), "backtest",
                   json{{"input", bt_input},
                        {"n", bt_n},
                        {"mode", bt_mode},
                        {"levels", levels},
                        {"k_grid", k_grid}},
                   0, {bt_input}, elapsed());
    std::cout << report.forecast_cases << " forecast cases, wrote " << csv_path << '\n';
    return 0;
  }

  if (*t1) {
    bool all_pass = true;
    for (const char* name : {"beta-iid", "spl-iid", "gev-iid"}) {
      for (int n : {150, 300, 500}) {
        const auto model = expectail::ModelSpec::preset(name);
        const auto check = expectail::reference_check(model, n, t1_tol, t1_draws, t1_seed);
        all_pass = all_pass && check.pass;
        std::cout << name << " n=" << n << " table=" << std::setprecision(6)
                  << check.table_value << " oracle=" << check.oracle_value
                  << " mc=" << check.mc_value << (check.pass ? " PASS" : " FAIL") << '\n';
      }
    }
    return all_pass ? 0 : 4;
  }

  if (*wr) {
    expectail::CsvSchema schema;
    schema.date_column = wr_date_col;
    schema.price_column = wr_price_col;
    schema.date_format = wr_fmt;
    const auto prices = expectail::load_price_csv(wr_input, schema);
    const auto losses = expectail::weekly_loss_returns(
        prices, wr_convention == "iso" ? expectail::WeekConvention::IsoWeek
                                       : expectail::WeekConvention::AnchoredSunday);
    std::ofstream out(wr_out);
    if (!out) throw expectail::DataError("cannot write " + wr_out);
    losses.write_csv(out);
    write_manifest(wr_out + ".manifest.json", "weekly-returns",
                   json{{"input", wr_input},
                        {"date_column", wr_date_col},
                        {"price_column", wr_price_col},
                        {"convention", wr_convention}},
                   0, {wr_input}, elapsed());
    std::cout << "wrote " << wr_out << " (" << losses.losses.size() << " losses)\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const expectail::DataError& e) {
    std::cerr << json{{"error", "data"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  } catch (const expectail::Error& e) {
    std::cerr << json{{"error", "numerical"}, {"message", e.what()}}.dump() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 4;
  }
}
