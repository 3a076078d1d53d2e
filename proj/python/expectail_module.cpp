// Python bindings for the expectail core: sampling, expectile estimation,
// tail fitting, extrapolation, the Monte Carlo harness and backtests.
// Report-producing functions exchange JSON strings so Python and the CLI
// share one serialization.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expectail/backtest.hpp"
#include "expectail/data_io.hpp"
#include "expectail/distributions.hpp"
#include "expectail/errors.hpp"
#include "expectail/expectile.hpp"
#include "expectail/extreme_expectile.hpp"
#include "expectail/montecarlo.hpp"
#include "expectail/rng.hpp"
#include "expectail/serialization.hpp"
#include "expectail/tail_fit.hpp"

namespace py = pybind11;
using namespace expectail;

namespace {

ModelSpec model_from_arg(const std::string& text) {
  // Accepts a preset name or a JSON model object.
  if (!text.empty() && text.front() == '{')
    return model_from_json(nlohmann::json::parse(text));
  return ModelSpec::preset(text);
}

std::vector<double> sorted_copy(const std::vector<double>& values) {
  return order_statistics(values);
}

ExtrapolationInputs inputs_for(const std::vector<double>& sorted, int k, double p,
                               FitMethod method) {
  return make_extrapolation_inputs(sorted, fit_tail(sorted, k, method), p);
}

}  // namespace

PYBIND11_MODULE(_expectail, m) {
  m.doc() = "Extreme expectile estimation for short-tailed distributions";
  m.attr("__version__") = "0.1.0";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  static py::exception<Error> base_error(m, "ExpectailError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError&) {
      throw;  // handled by the registered subclass
    } catch (const DomainError&) {
      throw;
    } catch (const Error& e) {
      py::set_error(base_error, e.what());
    }
  });

  m.def("preset_names", &ModelSpec::preset_names,
        "Names of the built-in simulation models");

  m.def(
      "sample",
      [](const std::string& model, std::size_t n, std::uint64_t seed,
         std::uint64_t replicate) { return sample(model_from_arg(model), n,
                                                  SeededStream{seed, replicate}); },
      py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("replicate") = 0,
      "Deterministic draws from a preset or JSON model spec");

  m.def(
      "quantile",
      [](const std::string& model, double u) { return quantile(model_from_arg(model), u); },
      py::arg("model"), py::arg("u"), "Marginal quantile function");

  m.def(
      "cdf", [](const std::string& model, double x) { return cdf(model_from_arg(model), x); },
      py::arg("model"), py::arg("x"), "Marginal distribution function");

  m.def(
      "model_mean", [](const std::string& model) { return model_from_arg(model).mean(); },
      py::arg("model"), "Closed-form mean of the marginal");

  m.def(
      "empirical_expectile",
      [](const std::vector<double>& values, double tau) {
        return empirical_expectile(values, tau).value;
      },
      py::arg("values"), py::arg("tau"), "Exact LAWS expectile of a sample");

  m.def(
      "oracle_expectile",
      [](const std::string& model, double tau, double tol) {
        return oracle_expectile(model_from_arg(model), tau, tol).value;
      },
      py::arg("model"), py::arg("tau"), py::arg("tol") = 1e-8,
      "True expectile of a known model, by quadrature and bisection");

  py::class_<TailFit>(m, "TailFit")
      .def_readonly("gamma_hat", &TailFit::gamma_hat)
      .def_readonly("scale_hat", &TailFit::scale_hat)
      .def_readonly("k", &TailFit::k)
      .def_readonly("threshold", &TailFit::threshold)
      .def_readonly("n", &TailFit::n)
      .def_readonly("shift", &TailFit::shift)
      .def_property_readonly("method",
                             [](const TailFit& f) { return to_string(f.method); })
      .def("__repr__", [](const TailFit& f) {
        std::ostringstream out;
        out << "TailFit(gamma_hat=" << f.gamma_hat << ", scale_hat=" << f.scale_hat
            << ", k=" << f.k << ", method=" << to_string(f.method) << ")";
        return out.str();
      });

  m.def(
      "fit_tail",
      [](const std::vector<double>& values, int k, const std::string& method) {
        return fit_tail(sorted_copy(values), k, fit_method_from_string(method));
      },
      py::arg("values"), py::arg("k"), py::arg("method") = "gpml",
      "Fit (gamma, scale) from the top-k order statistics");

  m.def("extreme_quantile", &extreme_quantile, py::arg("fit"), py::arg("p"),
        "Extrapolated quantile at exceedance probability p");
  m.def("endpoint", &endpoint, py::arg("fit"), "Estimated right endpoint");

  m.def(
      "laws_extrapolated",
      [](const std::vector<double>& values, int k, double p, const std::string& method,
         const std::string& variant) {
        const auto sorted = sorted_copy(values);
        const auto inputs = inputs_for(sorted, k, p, fit_method_from_string(method));
        const auto v = (variant == "direct") ? ScaleVariant::Direct
                       : (variant == "alt")  ? ScaleVariant::Alt
                                             : throw DomainError(
                                                   "scale variant must be 'direct' or 'alt'");
        return laws_extrapolated(sorted, inputs, v).value;
      },
      py::arg("values"), py::arg("k"), py::arg("p"), py::arg("method") = "gpml",
      py::arg("variant") = "direct", "Extrapolated LAWS expectile at level 1 - p");

  m.def(
      "qb_extrapolated",
      [](const std::vector<double>& values, int k, double p, const std::string& method) {
        const auto sorted = sorted_copy(values);
        const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                            static_cast<double>(sorted.size());
        return qb_extrapolated(mean, fit_tail(sorted, k, fit_method_from_string(method)), p)
            .value;
      },
      py::arg("values"), py::arg("k"), py::arg("p"), py::arg("method") = "gpml",
      "Quantile-based extrapolated expectile at level 1 - p");

  m.def(
      "expectile_level_for_quantile",
      [](const std::vector<double>& values, int k, double p, const std::string& method) {
        const auto sorted = sorted_copy(values);
        const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                            static_cast<double>(sorted.size());
        const auto sel = expectile_level_for_quantile(
            mean, fit_tail(sorted, k, fit_method_from_string(method)), p);
        return py::make_tuple(sel.pi_n, sel.clamped);
      },
      py::arg("values"), py::arg("k"), py::arg("p"), py::arg("method") = "gpml",
      "Asymmetry level pi_n with xi_{1-pi_n} ~ q_{1-p}; returns (pi_n, clamped)");

  m.def(
      "asymptotic_variance_iid",
      [](double gamma) {
        const auto v = asymptotic_variance_iid(gamma);
        return py::make_tuple(v.v11, v.v12, v.v22);
      },
      py::arg("gamma"), "I.i.d. asymptotic covariance (V11, V12, V22)");

  m.def(
      "select_k_path_stability",
      [](const std::vector<double>& values, int k_min, int k_max, const std::string& method,
         int window, double band) {
        const auto sel = select_k_path_stability(values, k_min, k_max,
                                                 fit_method_from_string(method), window, band);
        return py::make_tuple(sel.k, sel.gamma_hat, sel.fallback);
      },
      py::arg("values"), py::arg("k_min"), py::arg("k_max"), py::arg("method") = "gpml",
      py::arg("window") = 10, py::arg("band") = 0.4,
      "Path-stability choice of k; returns (k, gamma_hat, fallback)");

  m.def(
      "run_mc_study",
      [](const std::string& config_json) {
        const auto config = mc_config_from_json(nlohmann::json::parse(config_json));
        return to_json(run_mc_study(config)).dump();
      },
      py::arg("config_json"),
      "Monte Carlo bias/variance/MSE study; JSON config in, JSON report out");

  m.def(
      "run_expectile_backtest",
      [](const std::vector<double>& series, int window_length,
         const std::vector<double>& levels, const std::vector<int>& k_grid, int workers) {
        RollingScheme scheme;
        scheme.series = series;
        scheme.window_length = window_length;
        return to_json(run_expectile_backtest(scheme, levels, default_expectile_forecasters(),
                                              k_grid, workers))
            .dump();
      },
      py::arg("series"), py::arg("window_length"), py::arg("levels"), py::arg("k_grid"),
      py::arg("workers") = 1, "Rolling expectile backtest; returns a JSON score report");

  m.def(
      "run_quantile_backtest",
      [](const std::vector<double>& series, int window_length,
         const std::vector<double>& alphas, const std::vector<int>& k_grid, int workers) {
        RollingScheme scheme;
        scheme.series = series;
        scheme.window_length = window_length;
        return to_json(run_quantile_backtest(scheme, alphas, default_quantile_forecasters(),
                                             k_grid, workers))
            .dump();
      },
      py::arg("series"), py::arg("window_length"), py::arg("alphas"), py::arg("k_grid"),
      py::arg("workers") = 1, "Rolling quantile (VaR) backtest; returns a JSON score report");

  m.def(
      "weekly_loss_returns",
      [](const std::vector<std::string>& dates, const std::vector<double>& prices,
         const std::string& convention) {
        if (dates.size() != prices.size())
          throw DataError("dates and prices must have the same length");
        PriceSeries series;
        for (const auto& d : dates) series.dates.push_back(parse_date(d));
        series.prices = prices;
        const auto conv = (convention == "sunday") ? WeekConvention::AnchoredSunday
                          : (convention == "iso")
                              ? WeekConvention::IsoWeek
                              : throw DomainError("convention must be 'sunday' or 'iso'");
        const auto losses = weekly_loss_returns(series, conv);
        std::vector<std::string> weeks;
        for (const auto& w : losses.week_starts) weeks.push_back(w.iso());
        std::vector<bool> gaps(losses.spans_gap.begin(), losses.spans_gap.end());
        return py::make_tuple(weeks, losses.losses, gaps);
      },
      py::arg("dates"), py::arg("prices"), py::arg("convention") = "sunday",
      "Weekly loss returns from daily prices; returns (week_starts, losses, spans_gap)");
}
