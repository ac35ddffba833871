#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>

#include "csph/conditional.hpp"
#include "csph/errors.hpp"
#include "csph/fit.hpp"
#include "csph/io.hpp"
#include "csph/master.hpp"
#include "csph/model.hpp"
#include "csph/risk.hpp"
#include "csph/simulate.hpp"

namespace py = pybind11;
using namespace csph;

namespace {

MasterQuery make_query(const std::array<int, 3>& n, const std::array<double, 3>& theta,
                       const std::array<double, 3>& y) {
    MasterQuery q;
    q.n = n;
    q.theta = theta;
    q.y = y;
    return q;
}

py::array_t<double> dataset_array(const std::vector<SampleRecord>& records) {
    py::array_t<double> out({records.size(), std::size_t(6)});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < records.size(); ++i) {
        view(i, 0) = records[i].x1;
        view(i, 1) = records[i].x2;
        view(i, 2) = records[i].tau12;
        view(i, 3) = static_cast<double>(records[i].k);
        view(i, 4) = records[i].resid1;
        view(i, 5) = records[i].resid2;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_csph, m) {
    m.doc() = "Bivariate common-shock phase-type distributions";

    py::register_exception<ValidationError>(m, "ModelValidationError",
                                            PyExc_ValueError);
    py::register_exception<DomainError>(m, "EvaluationDomainError",
                                        PyExc_ValueError);

    py::class_<CSPHModel>(m, "CSPHModel")
        .def(py::init([](const RowVector& alpha, const Matrix& T, const Matrix& U,
                         const Matrix& Q1, const Matrix& Q2, double a1, double a2) {
                 CSPHModel model{alpha, T, U, Q1, Q2, a1, a2};
                 validate(model);
                 return model;
             }),
             py::arg("alpha"), py::arg("T"), py::arg("U"), py::arg("Q1"),
             py::arg("Q2"), py::arg("a1") = 1.0, py::arg("a2") = 1.0)
        .def_readonly("alpha", &CSPHModel::alpha)
        .def_readonly("T", &CSPHModel::T)
        .def_readonly("U", &CSPHModel::U)
        .def_readonly("Q1", &CSPHModel::Q1)
        .def_readonly("Q2", &CSPHModel::Q2)
        .def_readonly("a1", &CSPHModel::a1)
        .def_readonly("a2", &CSPHModel::a2)
        .def("__repr__", [](const CSPHModel& model) {
            return "<CSPHModel p0=" + std::to_string(model.num_pre()) +
                   " p1=" + std::to_string(model.num_post()) + ">";
        });

    py::class_<MPHModel>(m, "MPHModel")
        .def(py::init([](const RowVector& pi, const Matrix& S1, const Matrix& S2) {
                 MPHModel model{pi, S1, S2};
                 validate(model);
                 return model;
             }),
             py::arg("pi"), py::arg("S1"), py::arg("S2"));

    py::class_<MomentSet>(m, "MomentSet")
        .def_readonly("e_x1", &MomentSet::e_x1)
        .def_readonly("e_x2", &MomentSet::e_x2)
        .def_readonly("e_x1_sq", &MomentSet::e_x1_sq)
        .def_readonly("e_x2_sq", &MomentSet::e_x2_sq)
        .def_readonly("e_x1x2", &MomentSet::e_x1x2)
        .def_readonly("e_tau", &MomentSet::e_tau)
        .def("var1", &MomentSet::var1)
        .def("var2", &MomentSet::var2)
        .def("cov", &MomentSet::cov);

    m.def("marginal_pdf", &marginal_pdf, py::arg("model"), py::arg("margin"),
          py::arg("x"));
    m.def("marginal_cdf", &marginal_cdf, py::arg("model"), py::arg("margin"),
          py::arg("x"));
    m.def("joint_pdf", &joint_pdf, py::arg("model"), py::arg("z1"), py::arg("z2"));
    m.def("joint_cdf", &joint_cdf, py::arg("model"), py::arg("z1"), py::arg("z2"));
    m.def("joint_mgf", &joint_mgf, py::arg("model"), py::arg("s1"), py::arg("s2"));
    m.def("trivariate_density", &trivariate_density, py::arg("model"), py::arg("t"),
          py::arg("y1"), py::arg("y2"));
    m.def("shock_density", &shock_density, py::arg("model"), py::arg("t"));
    m.def(
        "master_moment",
        [](const CSPHModel& model, const std::array<int, 3>& n,
           const std::array<double, 3>& theta, const std::array<double, 3>& y) {
            return master_moment(model, make_query(n, theta, y));
        },
        py::arg("model"), py::arg("n") = std::array<int, 3>{0, 0, 0},
        py::arg("theta") = std::array<double, 3>{0.0, 0.0, 0.0},
        py::arg("y") = std::array<double, 3>{0.0, 0.0, 0.0});

    m.def("moment_set", &moment_set, py::arg("model"));
    m.def("pearson", &pearson, py::arg("model"));
    m.def("value_at_risk", &value_at_risk, py::arg("model"), py::arg("margin"),
          py::arg("level"));
    m.def("entropic_risk", &entropic_risk, py::arg("model"), py::arg("margin"),
          py::arg("vartheta"), py::arg("a") = 0.0);
    m.def("cvar_cs", &cvar_cs, py::arg("model"), py::arg("margin"), py::arg("a"));
    m.def("mtce_cs", &mtce_cs, py::arg("model"), py::arg("a"));
    m.def("mtcov_cs", &mtcov_cs, py::arg("model"), py::arg("a"));
    m.def("regular_variation_index", &regular_variation_index, py::arg("model"),
          py::arg("margin"));

    m.def(
        "entry_weights",
        [](const CSPHModel& model, double t) { return entry_weights(model, t).weights; },
        py::arg("model"), py::arg("t"));
    m.def("cond_mean", &cond_mean, py::arg("model"), py::arg("margin"), py::arg("t"));
    m.def("cond_var", &cond_var, py::arg("model"), py::arg("margin"), py::arg("t"));
    m.def("cond_pearson", &cond_pearson, py::arg("model"), py::arg("t"));
    m.def("cond_kendall", &cond_kendall, py::arg("model"), py::arg("t"));
    m.def("cond_spearman", &cond_spearman, py::arg("model"), py::arg("t"));

    m.def("csph_from_mph", &csph_from_mph, py::arg("mph"), py::arg("lam"),
          py::arg("a1") = 1.0, py::arg("a2") = 1.0);
    m.def("mph_joint_cdf", &mph_joint_cdf, py::arg("mph"), py::arg("y1"),
          py::arg("y2"));

    m.def(
        "sample",
        [](const CSPHModel& model, std::size_t n, std::uint64_t seed) {
            return dataset_array(sample_dataset(model, n, seed));
        },
        py::arg("model"), py::arg("n"), py::arg("seed") = 1,
        "Columns: x1, x2, tau12, k, resid1, resid2.");

    py::class_<ReducedModel>(m, "ReducedModel")
        .def_readonly("alpha", &ReducedModel::alpha)
        .def_readonly("T", &ReducedModel::T)
        .def_readonly("U", &ReducedModel::U)
        .def_readonly("Q1", &ReducedModel::Q1)
        .def_readonly("Q2", &ReducedModel::Q2)
        .def_readonly("beta", &ReducedModel::beta)
        .def("to_csph", &ReducedModel::to_csph);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("model", &FitResult::model)
        .def_readonly("loglik", &FitResult::loglik)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("gradient_norm", &FitResult::gradient_norm)
        .def_readonly("trace", &FitResult::trace);

    m.def(
        "fit",
        [](const std::vector<double>& x1, const std::vector<double>& x2, int p0,
           int p1, int n_starts, int max_iter, std::uint64_t seed, int threads) {
            BivariateDataset data;
            data.x1 = x1;
            data.x2 = x2;
            ModelStructure s;
            s.p0 = p0;
            s.p1 = p1;
            FitOptions opt;
            opt.n_starts = n_starts;
            opt.max_iter = max_iter;
            opt.seed = seed;
            opt.threads = threads;
            return fit(data, s, std::nullopt, opt);
        },
        py::arg("x1"), py::arg("x2"), py::arg("p0") = 3, py::arg("p1") = 2,
        py::arg("starts") = 5, py::arg("max_iter") = 2000, py::arg("seed") = 1,
        py::arg("threads") = 1);

    m.def("load_model", &load_model, py::arg("path"));
    m.def(
        "save_model",
        [](const CSPHModel& model, const std::string& path) { save_model(model, path); },
        py::arg("model"), py::arg("path"));
}
