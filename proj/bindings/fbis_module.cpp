#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fbis/io.hpp"
#include "fbis/parallel.hpp"
#include "fbis/rng.hpp"
#include "fbis/smoothing.hpp"

namespace py = pybind11;
using namespace fbis;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::InvalidDimension, "expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
    return m;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
    return a;
}

std::vector<Bandwidth> bandwidths_from(const std::vector<std::optional<double>>& hs) {
    std::vector<Bandwidth> out;
    out.reserve(hs.size());
    for (const auto& h : hs)
        out.push_back(h ? Bandwidth::finite(*h) : Bandwidth::infinite());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Favored-bandwidth independence screening: kernel smoothing, marginal and "
              "iterative screening, constrained-bandwidth refinement, simulation designs and "
              "benchmark tables. Serialized reports index variables 1..p; in-memory indices "
              "are 0-based.";

    py::register_exception<Error>(m, "FbisError");

    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("Gaussian", KernelFamily::Gaussian)
        .value("Epanechnikov", KernelFamily::Epanechnikov);
    py::enum_<RateDimension>(m, "RateDimension")
        .value("UseP", RateDimension::UseP)
        .value("UseLogN", RateDimension::UseLogN);
    py::enum_<SurrogateScale>(m, "SurrogateScale")
        .value("Raw", SurrogateScale::Raw)
        .value("MinMax", SurrogateScale::MinMax);
    py::enum_<ConditionalRule>(m, "ConditionalRule")
        .value("PermutationMax", ConditionalRule::PermutationMax)
        .value("TopK", ConditionalRule::TopK);
    py::enum_<StopReason>(m, "StopReason")
        .value("Converged", StopReason::Converged)
        .value("SizeCap", StopReason::SizeCap)
        .value("IterationCap", StopReason::IterationCap)
        .value("EmptyAddition", StopReason::EmptyAddition);
    py::enum_<BenchMethod>(m, "BenchMethod")
        .value("FBIS", BenchMethod::FBIS)
        .value("SIS", BenchMethod::SIS);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init<>())
        .def(py::init([](KernelFamily f) { return KernelSpec{f}; }))
        .def_readwrite("family", &KernelSpec::family);

    py::class_<Bandwidth>(m, "Bandwidth")
        .def_static("finite", &Bandwidth::finite)
        .def_static("infinite", &Bandwidth::infinite)
        .def_property_readonly("is_infinite", &Bandwidth::is_infinite)
        .def_property_readonly("inverse", &Bandwidth::inverse);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](const std::vector<double>& y, const py::array_t<double>& X,
                         const std::vector<std::string>& names,
                         const std::vector<std::size_t>& truth) {
                 return Dataset(y, matrix_from_numpy(X), names, truth);
             }),
             py::arg("y"), py::arg("X"), py::arg("names") = std::vector<std::string>{},
             py::arg("truth") = std::vector<std::size_t>{})
        .def_property_readonly("y", [](const Dataset& d) { return d.y; })
        .def_property_readonly("X", [](const Dataset& d) { return numpy_from_matrix(d.X); })
        .def_readonly("names", &Dataset::names)
        .def_readonly("truth", &Dataset::truth)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("p", &Dataset::p);

    py::class_<ScreeningConfig>(m, "ScreeningConfig")
        .def(py::init<>())
        .def_readwrite("tau", &ScreeningConfig::tau)
        .def_readwrite("q", &ScreeningConfig::q)
        .def_readwrite("n_permutations", &ScreeningConfig::n_permutations)
        .def_readwrite("seed", &ScreeningConfig::seed)
        .def_readwrite("rate", &ScreeningConfig::rate)
        .def_readwrite("kernel", &ScreeningConfig::kernel)
        .def_readwrite("rescale", &ScreeningConfig::rescale);

    py::class_<VariableScore>(m, "VariableScore")
        .def_readonly("ic_hstar", &VariableScore::ic_hstar)
        .def_readonly("im", &VariableScore::im)
        .def_readonly("favored_hstar", &VariableScore::favored_hstar)
        .def_readonly("constant", &VariableScore::constant);

    py::class_<ScreeningReport>(m, "ScreeningReport")
        .def_readonly("h_star", &ScreeningReport::h_star)
        .def_readonly("ic_inf", &ScreeningReport::ic_inf)
        .def_readonly("variables", &ScreeningReport::variables)
        .def_readonly("omega_q", &ScreeningReport::omega_q)
        .def_readonly("selected", &ScreeningReport::selected)
        .def_readonly("permutation_ims", &ScreeningReport::permutation_ims)
        .def_readonly("ranking", &ScreeningReport::ranking)
        .def("top_k", &ScreeningReport::top_k)
        .def("to_json", [](const ScreeningReport& r) { return nlohmann::json(r).dump(); })
        .def(py::self == py::self);

    py::class_<MekroConfig>(m, "MekroConfig")
        .def(py::init<>())
        .def_readwrite("xi_grid", &MekroConfig::xi_grid)
        .def_readwrite("max_iterations", &MekroConfig::max_iterations)
        .def_readwrite("rel_tolerance", &MekroConfig::rel_tolerance)
        .def_readwrite("restarts", &MekroConfig::restarts)
        .def_readwrite("lambda_min", &MekroConfig::lambda_min)
        .def_readwrite("seed", &MekroConfig::seed);

    py::class_<MekroModel>(m, "MekroModel")
        .def_readonly("lambda_", &MekroModel::lambda)
        .def_readonly("xi", &MekroModel::xi)
        .def_readonly("objective", &MekroModel::objective)
        .def_readonly("fitted", &MekroModel::fitted)
        .def_readonly("trace", &MekroModel::trace)
        .def_readonly("bic", &MekroModel::bic)
        .def_readonly("selected", &MekroModel::selected)
        .def_readonly("converged", &MekroModel::converged)
        .def("to_json", [](const MekroModel& v) { return nlohmann::json(v).dump(); });

    py::class_<MekroPath>(m, "MekroPath")
        .def_readonly("best", &MekroPath::best)
        .def_readonly("path", &MekroPath::path);

    py::class_<IfbisConfig>(m, "IfbisConfig")
        .def(py::init<>())
        .def_readwrite("screening", &IfbisConfig::screening)
        .def_readwrite("mekro", &IfbisConfig::mekro)
        .def_readwrite("s0", &IfbisConfig::s0)
        .def_readwrite("k_max", &IfbisConfig::k_max)
        .def_readwrite("max_iterations", &IfbisConfig::max_iterations)
        .def_readwrite("rule", &IfbisConfig::rule)
        .def_readwrite("top_k", &IfbisConfig::top_k)
        .def_readwrite("surrogate_scale", &IfbisConfig::surrogate_scale);

    py::class_<ConditionalImportance>(m, "ConditionalImportance")
        .def_readonly("value", &ConditionalImportance::value)
        .def_readonly("degenerate", &ConditionalImportance::degenerate);

    py::class_<RescaleInfo>(m, "RescaleInfo")
        .def_readonly("mins", &RescaleInfo::mins)
        .def_readonly("ranges", &RescaleInfo::ranges);

    py::class_<IfbisIteration>(m, "IfbisIteration")
        .def_readonly("candidate_set", &IfbisIteration::candidate_set)
        .def_readonly("mekro_candidates", &IfbisIteration::mekro_candidates)
        .def_readonly("model", &IfbisIteration::model)
        .def_readonly("selected_set", &IfbisIteration::selected_set)
        .def_readonly("conditional_ims", &IfbisIteration::conditional_ims)
        .def_readonly("surrogate_fallback", &IfbisIteration::surrogate_fallback);

    py::class_<IfbisTrace>(m, "IfbisTrace")
        .def_readonly("iterations", &IfbisTrace::iterations)
        .def_readonly("final_set", &IfbisTrace::final_set)
        .def_readonly("stop_reason", &IfbisTrace::stop_reason)
        .def_readonly("h_star", &IfbisTrace::h_star)
        .def_readonly("rescale", &IfbisTrace::rescale)
        .def_readonly("screening", &IfbisTrace::screening)
        .def("to_json", [](const IfbisTrace& v) { return nlohmann::json(v).dump(); })
        .def(py::self == py::self);

    py::class_<SimSpec>(m, "SimSpec")
        .def(py::init<>())
        .def(py::init([](int example, std::size_t n, std::size_t p, double rho, double sigma2,
                         std::uint64_t seed) {
                 return SimSpec{example, n, p, rho, sigma2, seed};
             }),
             py::arg("example"), py::arg("n"), py::arg("p"), py::arg("rho") = 0.0,
             py::arg("sigma2") = 1.0, py::arg("seed") = 0)
        .def_readwrite("example", &SimSpec::example)
        .def_readwrite("n", &SimSpec::n)
        .def_readwrite("p", &SimSpec::p)
        .def_readwrite("rho", &SimSpec::rho)
        .def_readwrite("sigma2", &SimSpec::sigma2)
        .def_readwrite("seed", &SimSpec::seed);

    py::class_<SelectionCounts>(m, "SelectionCounts")
        .def_readonly("fp", &SelectionCounts::fp)
        .def_readonly("fn", &SelectionCounts::fn)
        .def_readonly("captured", &SelectionCounts::captured);

    py::class_<BenchCell>(m, "BenchCell")
        .def_readonly("example", &BenchCell::example)
        .def_readonly("rho", &BenchCell::rho)
        .def_readonly("sigma2", &BenchCell::sigma2)
        .def_readonly("method", &BenchCell::method)
        .def_readonly("metric", &BenchCell::metric)
        .def_readonly("mean", &BenchCell::mean)
        .def_readonly("se", &BenchCell::se)
        .def_readonly("se_degenerate", &BenchCell::se_degenerate)
        .def_readonly("values", &BenchCell::values);

    py::class_<BenchResult>(m, "BenchResult")
        .def_readonly("cells", &BenchResult::cells)
        .def_readonly("replicates", &BenchResult::replicates)
        .def_readonly("fingerprint", &BenchResult::fingerprint)
        .def("to_json", [](const BenchResult& v) { return nlohmann::json(v).dump(); });

    // kernel smoothing
    m.def("kernel_eval", &kernel_eval, py::arg("u"), py::arg("spec") = KernelSpec{});
    m.def(
        "nw_fit",
        [](const std::vector<double>& x, const std::vector<double>& y, std::optional<double> h,
           const std::vector<double>& evals, KernelSpec spec) {
            return nw_fit(x, y, h ? Bandwidth::finite(*h) : Bandwidth::infinite(), spec, evals);
        },
        py::arg("x"), py::arg("y"), py::arg("h"), py::arg("eval_points"),
        py::arg("kernel") = KernelSpec{},
        "Univariate Nadaraya-Watson fit; h=None is the infinite bandwidth");
    m.def(
        "smoother_summary",
        [](const std::vector<double>& x, const std::vector<double>& y, std::optional<double> h,
           KernelSpec spec) {
            const auto s =
                smoother_summary(x, y, h ? Bandwidth::finite(*h) : Bandwidth::infinite(), spec);
            return py::make_tuple(s.fitted, s.trace, s.degenerate_rows);
        },
        py::arg("x"), py::arg("y"), py::arg("h"), py::arg("kernel") = KernelSpec{},
        "Returns (fitted, trace, degenerate_rows)");
    m.def(
        "nw_fit_product",
        [](const py::array_t<double>& X, const std::vector<double>& y,
           const std::vector<std::optional<double>>& h, const py::array_t<double>& evals,
           KernelSpec spec) {
            return nw_fit_product(matrix_from_numpy(X), y, bandwidths_from(h), spec,
                                  matrix_from_numpy(evals));
        },
        py::arg("X"), py::arg("y"), py::arg("h"), py::arg("eval_points"),
        py::arg("kernel") = KernelSpec{});
    m.def(
        "smoother_trace_product",
        [](const py::array_t<double>& X, const std::vector<std::optional<double>>& h,
           KernelSpec spec) {
            return smoother_trace_product(matrix_from_numpy(X), bandwidths_from(h), spec);
        },
        py::arg("X"), py::arg("h"), py::arg("kernel") = KernelSpec{});

    // screening
    m.def("h_star", &h_star, py::arg("n"), py::arg("p"),
          py::arg("rate") = RateDimension::UseP);
    m.def("ic_infinity",
          [](const std::vector<double>& y) { return ic_infinity(y); }, py::arg("y"));
    m.def(
        "ic",
        [](const std::vector<double>& x, const std::vector<double>& y, std::optional<double> h,
           const ScreeningConfig& cfg, std::size_t p) {
            return ic(x, y, h ? Bandwidth::finite(*h) : Bandwidth::infinite(), cfg, p);
        },
        py::arg("x_j"), py::arg("y"), py::arg("h"), py::arg("cfg") = ScreeningConfig{},
        py::arg("p") = 2);
    m.def(
        "importance_measure",
        [](const std::vector<double>& x, const std::vector<double>& y, double hstar,
           std::size_t p, const ScreeningConfig& cfg) {
            return importance_measure(x, y, hstar, p, cfg);
        },
        py::arg("x_j"), py::arg("y"), py::arg("h_star"), py::arg("p"),
        py::arg("cfg") = ScreeningConfig{});
    m.def("fbis_hard_select", &fbis_hard_select, py::arg("data"),
          py::arg("cfg") = ScreeningConfig{});
    m.def("permutation_threshold", &permutation_threshold, py::arg("data"),
          py::arg("cfg") = ScreeningConfig{});
    m.def("fbis_screen", &fbis_screen, py::arg("data"), py::arg("cfg") = ScreeningConfig{});
    m.def(
        "fbis_rank",
        [](const Dataset& data, const ScreeningConfig& cfg) {
            std::vector<double> ims;
            auto order = fbis_rank(data, cfg, &ims);
            return py::make_tuple(order, ims);
        },
        py::arg("data"), py::arg("cfg") = ScreeningConfig{},
        "Returns (ranking, per-variable IMs)");
    m.def("sis_rank", &sis_rank, py::arg("data"));

    // mekro
    m.def(
        "mekro_objective",
        [](const std::vector<double>& lambda, const py::array_t<double>& X,
           const std::vector<double>& y, KernelSpec spec) {
            return mekro_objective(lambda, matrix_from_numpy(X), y, spec);
        },
        py::arg("lambda_"), py::arg("X"), py::arg("y"), py::arg("kernel") = KernelSpec{});
    m.def(
        "mekro_gradient",
        [](const std::vector<double>& lambda, const py::array_t<double>& X,
           const std::vector<double>& y, KernelSpec spec) {
            return mekro_gradient(lambda, matrix_from_numpy(X), y, spec);
        },
        py::arg("lambda_"), py::arg("X"), py::arg("y"), py::arg("kernel") = KernelSpec{});
    m.def("project_feasible", &project_feasible, py::arg("lambda_"), py::arg("xi"));
    m.def("mekro_bic", &mekro_bic, py::arg("n"), py::arg("objective"), py::arg("trace"));
    m.def(
        "mekro_fit",
        [](const py::array_t<double>& X, const std::vector<double>& y, double xi,
           const MekroConfig& cfg, KernelSpec spec) {
            return mekro_fit(matrix_from_numpy(X), y, xi, cfg, spec);
        },
        py::arg("X"), py::arg("y"), py::arg("xi"), py::arg("cfg") = MekroConfig{},
        py::arg("kernel") = KernelSpec{});
    m.def(
        "mekro_bic_path",
        [](const py::array_t<double>& X, const std::vector<double>& y, const MekroConfig& cfg,
           KernelSpec spec) {
            return mekro_bic_path(matrix_from_numpy(X), y, cfg, spec);
        },
        py::arg("X"), py::arg("y"), py::arg("cfg") = MekroConfig{},
        py::arg("kernel") = KernelSpec{});
    m.def(
        "mekro_predict",
        [](const MekroModel& model, const py::array_t<double>& Xtr,
           const std::vector<double>& ytr, const py::array_t<double>& Xnew, KernelSpec spec) {
            return mekro_predict(model, matrix_from_numpy(Xtr), ytr, matrix_from_numpy(Xnew),
                                 spec);
        },
        py::arg("model"), py::arg("X_train"), py::arg("y_train"), py::arg("X_new"),
        py::arg("kernel") = KernelSpec{});

    // ifbis
    m.def("surrogate", &surrogate, py::arg("model"),
          py::arg("scale") = SurrogateScale::Raw);
    m.def(
        "conditional_importance",
        [](const std::vector<double>& z, const std::vector<double>& x,
           const std::vector<double>& y, double hstar, std::size_t p,
           const ScreeningConfig& cfg) {
            return conditional_importance(z, x, y, hstar, p, cfg);
        },
        py::arg("z"), py::arg("x_j"), py::arg("y"), py::arg("h_star"), py::arg("p"),
        py::arg("cfg") = ScreeningConfig{});
    m.def("ifbis_run", &ifbis_run, py::arg("data"), py::arg("cfg") = IfbisConfig{});
    m.def(
        "ifbis_predict",
        [](const IfbisTrace& trace, const Dataset& train, const py::array_t<double>& Xnew,
           KernelSpec spec) {
            return ifbis_predict(trace, train, matrix_from_numpy(Xnew), spec);
        },
        py::arg("trace"), py::arg("train"), py::arg("X_new"), py::arg("kernel") = KernelSpec{});

    // datagen
    m.def("g1", &g1);
    m.def("g2", &g2);
    m.def("g3", &g3);
    m.def(
        "gen_correlated_uniforms",
        [](std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
            return numpy_from_matrix(gen_correlated_uniforms(n, p, rho, seed));
        },
        py::arg("n"), py::arg("p"), py::arg("rho"), py::arg("seed"));
    m.def("gen_example", &gen_example, py::arg("spec"));

    // bench
    m.def("evaluate_selection", &evaluate_selection, py::arg("selected"), py::arg("truth"),
          py::arg("p"));
    m.def("run_table1", &run_table1, py::arg("methods"), py::arg("grid"), py::arg("reps"),
          py::arg("top_k"), py::arg("seed_base"), py::arg("screening") = ScreeningConfig{});
    m.def("run_table2", &run_table2, py::arg("grid"), py::arg("reps"), py::arg("test_n"),
          py::arg("seed_base"), py::arg("cfg") = IfbisConfig{});

    // io + misc
    m.def("read_dataset", &read_dataset, py::arg("path"), py::arg("response"));
    m.def("write_dataset_csv", &write_dataset_csv, py::arg("path"), py::arg("data"),
          py::arg("response_name") = std::string("y"));
    m.def("write_bench_csv", &write_bench_csv, py::arg("path"), py::arg("result"));
    m.def("parse_screening_report", [](const std::string& s) {
        return nlohmann::json::parse(s).get<ScreeningReport>();
    });
    m.def("parse_ifbis_trace",
          [](const std::string& s) { return nlohmann::json::parse(s).get<IfbisTrace>(); });
    m.def("set_max_threads", &set_max_threads, py::arg("n"));
    m.def("norm_cdf", &norm_cdf);
    m.def("norm_quantile", &norm_quantile);

    m.attr("__version__") = "0.1.0";
}
