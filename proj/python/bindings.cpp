#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snreg/baselines.hpp"
#include "snreg/dq.hpp"
#include "snreg/esr.hpp"
#include "snreg/harness.hpp"
#include "snreg/sn.hpp"
#include "snreg/stats.hpp"

namespace py = pybind11;
using namespace snreg;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-normalized inference for time-series quantile and "
            "expected-shortfall regressions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::class_<TimeSeriesDataset>(m, "Dataset")
      .def(py::init<Eigen::VectorXd, Eigen::MatrixXd,
                    std::vector<std::string>>(),
           py::arg("y"), py::arg("x"), py::arg("names"))
      .def_property_readonly("y", &TimeSeriesDataset::y)
      .def_property_readonly("x", &TimeSeriesDataset::x)
      .def_property_readonly("names", &TimeSeriesDataset::names)
      .def_property_readonly("n", &TimeSeriesDataset::n)
      .def_property_readonly("k", &TimeSeriesDataset::k);

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("response"),
        py::arg("covariates"), py::arg("intercept") = false,
        py::arg("lag") = 0);
  m.def("write_csv", &write_csv, py::arg("path"), py::arg("data"),
        py::arg("response_name") = "y");

  m.def("tick_loss",
        [](double u, double tau) { return tick_loss(u, QuantileLevel(tau)); },
        py::arg("u"), py::arg("tau"));
  m.def("psi",
        [](double u, double tau) { return psi(u, QuantileLevel(tau)); },
        py::arg("u"), py::arg("tau"));

  py::class_<QrFit>(m, "QrFit")
      .def_readonly("alpha_hat", &QrFit::alpha_hat)
      .def_readonly("tau", &QrFit::tau)
      .def_readonly("objective", &QrFit::objective)
      .def_readonly("window", &QrFit::window)
      .def_readonly("iterations", &QrFit::iterations);

  m.def("fit_qr",
        [](const TimeSeriesDataset& data, double tau,
           std::optional<Eigen::Index> window) {
          return window ? fit_qr(data, QuantileLevel(tau), *window)
                        : fit_qr(data, QuantileLevel(tau));
        },
        py::arg("data"), py::arg("tau"), py::arg("window") = py::none());

  py::class_<EstimatePath>(m, "EstimatePath")
      .def_readonly("j_start", &EstimatePath::j_start)
      .def_readonly("n", &EstimatePath::n)
      .def_readonly("tau", &EstimatePath::tau)
      .def_readonly("epsilon", &EstimatePath::epsilon)
      .def_readonly("coefficients", &EstimatePath::coefficients)
      .def("at", &EstimatePath::at, py::arg("j"))
      .def("full_sample", &EstimatePath::full_sample);

  m.def("expanding_qr_path",
        [](const TimeSeriesDataset& data, double tau, double epsilon) {
          return expanding_qr_path(data, QuantileLevel(tau),
                                   TrimFraction(epsilon));
        },
        py::arg("data"), py::arg("tau"), py::arg("epsilon"));

  py::enum_<TailSide>(m, "TailSide")
      .value("upper", TailSide::upper)
      .value("lower", TailSide::lower);

  py::class_<EsFit>(m, "EsFit")
      .def_readonly("beta_hat", &EsFit::beta_hat)
      .def_readonly("alpha_hat", &EsFit::alpha_hat)
      .def_readonly("tau", &EsFit::tau)
      .def_readonly("side", &EsFit::side)
      .def_readonly("n_exceed", &EsFit::n_exceed)
      .def_readonly("window", &EsFit::window);

  m.def("fit_es",
        [](const TimeSeriesDataset& data, double tau,
           const Eigen::VectorXd& alpha_hat, TailSide side,
           std::optional<Eigen::Index> window) {
          return fit_es(data, QuantileLevel(tau), alpha_hat, side,
                        window ? *window : data.n());
        },
        py::arg("data"), py::arg("tau"), py::arg("alpha_hat"),
        py::arg("side") = TailSide::upper, py::arg("window") = py::none());

  m.def("expanding_es_path",
        [](const TimeSeriesDataset& data, double tau, double epsilon,
           TailSide side) {
          return expanding_es_path(data, QuantileLevel(tau),
                                   TrimFraction(epsilon), side);
        },
        py::arg("data"), py::arg("tau"), py::arg("epsilon"),
        py::arg("side") = TailSide::upper);

  py::class_<CriticalValueTable>(m, "CriticalValueTable")
      .def_readonly("ell", &CriticalValueTable::ell)
      .def_readonly("epsilon", &CriticalValueTable::epsilon)
      .def_readonly("grid_steps", &CriticalValueTable::grid_steps)
      .def_readonly("replications", &CriticalValueTable::replications)
      .def_readonly("seed", &CriticalValueTable::seed)
      .def_readonly("quantiles", &CriticalValueTable::quantiles)
      .def("quantile", &CriticalValueTable::quantile, py::arg("p"));

  m.def("simulate_w_samples", &simulate_w_samples, py::arg("ell"),
        py::arg("epsilon"), py::arg("grid_steps"), py::arg("replications"),
        py::arg("seed"), py::arg("threads") = 0);
  m.def("critical_value_table",
        [](int ell, double epsilon, int grid_steps, int replications,
           std::uint64_t seed, const std::string& cache_dir, int threads) {
          return get_or_build_table(cache_dir, ell, epsilon, grid_steps,
                                    replications, seed, threads);
        },
        py::arg("ell") = 1, py::arg("epsilon") = 0.1,
        py::arg("grid_steps") = kDefaultCvGridSteps,
        py::arg("replications") = kDefaultCvReplications,
        py::arg("seed") = kDefaultCvSeed,
        py::arg("cache_dir") = default_cache_dir(), py::arg("threads") = 0);
  m.def("critical_value", &critical_value, py::arg("table"), py::arg("nu"));

  py::class_<Contrast>(m, "Contrast")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, double>(),
           py::arg("a"), py::arg("null_value"), py::arg("rank_tol") = 1e-10)
      .def_static("coefficient", &Contrast::coefficient, py::arg("index"),
                  py::arg("k"), py::arg("null_value"))
      .def_readonly("a", &Contrast::a)
      .def_readonly("null_value", &Contrast::null_value);

  py::class_<SnTestResult>(m, "SnTestResult")
      .def_readonly("t_n", &SnTestResult::t_n)
      .def_readonly("s_n", &SnTestResult::s_n)
      .def_readonly("critical_value", &SnTestResult::critical_value)
      .def_readonly("reject", &SnTestResult::reject)
      .def_readonly("nu", &SnTestResult::nu)
      .def_readonly("ci", &SnTestResult::ci)
      .def_readonly("p_value", &SnTestResult::p_value)
      .def_readonly("p_value_half_width", &SnTestResult::p_value_half_width);

  m.def("sn_matrix", &sn_matrix, py::arg("path"), py::arg("contrast"));
  m.def("sn_test", &sn_test, py::arg("path"), py::arg("contrast"),
        py::arg("nu"), py::arg("critical"));
  m.def("sn_confidence_interval", &sn_confidence_interval, py::arg("path"),
        py::arg("coefficient_index"), py::arg("nu"), py::arg("critical"));

  py::class_<DgpConfig>(m, "DgpConfig")
      .def(py::init([](Eigen::Index n, double rho_x, double rho,
                       Eigen::Vector2d delta, Eigen::Vector2d eta,
                       Eigen::Index burn_in) {
             DgpConfig cfg;
             cfg.n = n;
             cfg.rho_x = rho_x;
             cfg.rho = rho;
             cfg.delta = delta;
             cfg.eta = eta;
             cfg.burn_in = burn_in;
             cfg.validate();
             return cfg;
           }),
           py::arg("n"), py::arg("rho_x") = 0.8, py::arg("rho") = 0.0,
           py::arg("delta") = Eigen::Vector2d(0.0, 1.0),
           py::arg("eta") = Eigen::Vector2d(2.0, 0.5),
           py::arg("burn_in") = 0)
      .def_readwrite("n", &DgpConfig::n)
      .def_readwrite("rho_x", &DgpConfig::rho_x)
      .def_readwrite("rho", &DgpConfig::rho)
      .def_readwrite("delta", &DgpConfig::delta)
      .def_readwrite("eta", &DgpConfig::eta)
      .def_readwrite("burn_in", &DgpConfig::burn_in);

  py::enum_<TargetKind>(m, "TargetKind")
      .value("quantile", TargetKind::quantile)
      .value("es", TargetKind::es);

  m.def("generate", &generate, py::arg("config"), py::arg("seed"));
  m.def("true_coefficients",
        [](const DgpConfig& cfg, double tau) {
          const auto t = true_coefficients(cfg, QuantileLevel(tau));
          return py::make_tuple(t.alpha0, t.beta0_upper);
        },
        py::arg("config"), py::arg("tau"));
  m.def("null_hypothesis_value",
        [](const DgpConfig& cfg, double tau, double delta2_circ,
           TargetKind target) {
          return null_hypothesis_value(cfg, QuantileLevel(tau), delta2_circ,
                                       target);
        },
        py::arg("config"), py::arg("tau"), py::arg("delta2_circ"),
        py::arg("target") = TargetKind::quantile);
  m.def("default_epsilon", &default_epsilon, py::arg("target"), py::arg("n"),
        py::arg("tau"));

  py::class_<HitSequence>(m, "HitSequence")
      .def_readonly("hits", &HitSequence::hits)
      .def_readonly("tau", &HitSequence::tau);
  py::class_<DqResult>(m, "DqResult")
      .def_readonly("statistic", &DqResult::statistic)
      .def_readonly("p_value", &DqResult::p_value)
      .def_readonly("df", &DqResult::df);
  m.def("compute_hits",
        [](const TimeSeriesDataset& data, double tau,
           const Eigen::VectorXd& alpha) {
          return compute_hits(data, QuantileLevel(tau), alpha);
        },
        py::arg("data"), py::arg("tau"), py::arg("alpha_hat"));
  m.def("dq_test", &dq_test, py::arg("hits"), py::arg("lags") = 10);

  py::enum_<MeatMode>(m, "MeatMode")
      .value("iid", MeatMode::iid)
      .value("hac", MeatMode::hac);
  py::class_<BaselineTestResult>(m, "BaselineTestResult")
      .def_readonly("statistic", &BaselineTestResult::statistic)
      .def_readonly("p_value", &BaselineTestResult::p_value)
      .def_readonly("reject", &BaselineTestResult::reject)
      .def_readonly("se", &BaselineTestResult::se);
  m.def("baseline_t_test",
        [](const TimeSeriesDataset& data, double tau, Eigen::Index index,
           double null_value, MeatMode mode, double nu) {
          return baseline_t_test(data, QuantileLevel(tau), index, null_value,
                                 mode, nu);
        },
        py::arg("data"), py::arg("tau"), py::arg("coefficient_index"),
        py::arg("null_value"), py::arg("mode") = MeatMode::iid,
        py::arg("nu") = 0.05);

  m.def("normal_quantile", &normal_quantile, py::arg("p"));
  m.def("normal_es_upper", &normal_es_upper, py::arg("tau"));
}
