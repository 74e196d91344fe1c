// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "haflab/errors.hpp"
#include "haflab/fock.hpp"
#include "haflab/kernels.hpp"
#include "haflab/matfun.hpp"
#include "haflab/sampling.hpp"

namespace py = pybind11;
using namespace haflab;

namespace {

py::dict report_dict(const MomentReport& r) {
    py::dict d;
    d["label"] = r.label;
    d["value"] = r.value;
    d["std_error"] = r.std_error ? py::cast(*r.std_error) : py::none();
    d["n_samples"] = r.n_samples ? py::cast(*r.n_samples) : py::none();
    return d;
}

GaussianFieldModel make_builtin(const std::string& name, int cells, int frequencies, double length_scale,
                                double variance) {
    BuiltinParams p;
    p.frequencies = frequencies;
    p.length_scale = length_scale;
    p.variance = variance;
    return builtin_model(name, Grid::uniform(0.0, 1.0, cells), p);
}

}  // namespace

PYBIND11_MODULE(_haflab, m) {
    m.doc() = "Hafnians, Gaussian-field Cox processes and truncated Fock-space checks";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<DimensionError>(m, "DimensionError", error);
    py::register_exception<CapacityError>(m, "CapacityError", error);
    py::register_exception<RangeError>(m, "RangeError", error);
    py::register_exception<ConfigError>(m, "ConfigError", error);
    py::register_exception<ModelError>(m, "ModelError", error);
    py::register_exception<PreconditionError>(m, "PreconditionError", error);

    m.def(
        "hafnian",
        [](const ComplexMatrix& a, const std::string& algorithm) {
            const SymmetricMatrix c(a);
            if (algorithm == "enum") return hafnian_enum(c);
            if (algorithm == "dp") return hafnian_dp(c);
            throw ConfigError("algorithm must be 'enum' or 'dp'");
        },
        py::arg("a"), py::arg("algorithm") = "dp", "Hafnian of an exactly symmetric complex matrix.");
    m.def("permanent", [](const ComplexMatrix& a) { return permanent(a); }, py::arg("a"));
    m.def("determinant", [](const ComplexMatrix& a) { return determinant(a); }, py::arg("a"));
    m.def("alpha_det", [](const ComplexMatrix& a, double alpha) { return alpha_det(a, alpha); }, py::arg("a"),
          py::arg("alpha"));
    m.def("pairing_count", &pairing_count, py::arg("dim"), "Number of perfect pairings of dim points.");

    py::class_<GaussianFieldModel>(m, "GaussianFieldModel")
        .def_static(
            "from_features",
            [](int cells, const ComplexMatrix& l1, const ComplexMatrix& l2) {
                return GaussianFieldModel::from_features(Grid::uniform(0.0, 1.0, cells), l1, l2);
            },
            py::arg("cells"), py::arg("L1"), py::arg("L2"), "Model on `cells` equal cells of [0, 1].")
        .def_static("builtin", &make_builtin, py::arg("name"), py::arg("cells") = 4, py::arg("frequencies") = 1,
                    py::arg("length_scale") = 0.2, py::arg("variance") = 1.0)
        .def_property_readonly("cells", &GaussianFieldModel::cells)
        .def_property_readonly("feature_dim", &GaussianFieldModel::feature_dim)
        .def_property_readonly("L1", [](const GaussianFieldModel& g) { return g.L1(); })
        .def_property_readonly("L2", [](const GaussianFieldModel& g) { return g.L2(); })
        .def_property_readonly("K1", [](const GaussianFieldModel& g) { return g.K1(); })
        .def_property_readonly("K2", [](const GaussianFieldModel& g) { return g.K2(); })
        .def_property_readonly("volumes", [](const GaussianFieldModel& g) {
            const auto v = g.grid().volumes();
            return std::vector<double>(v.begin(), v.end());
        });

    m.def("builtin_model_names", &builtin_model_names);
    m.def(
        "block_kernel",
        [](const GaussianFieldModel& model, const std::vector<int>& points) {
            return block_kernel(model, points).entries();
        },
        py::arg("model"), py::arg("points"));
    m.def("intensity_integral", [](const GaussianFieldModel& model, const std::vector<int>& cells) {
        return intensity_integral(model, make_cell_set(cells));
    });

    m.def(
        "sample_field",
        [](const GaussianFieldModel& model, std::uint64_t seed) { return sample_field(model, seed).values; },
        py::arg("model"), py::arg("seed"));
    m.def(
        "sample_cox",
        [](const GaussianFieldModel& model, std::int64_t replicates, std::uint64_t seed) {
            const auto patterns = sample_cox_replicates(model, replicates, seed);
            Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> counts(patterns.size(),
                                                                                      model.cells());
            for (std::size_t r = 0; r < patterns.size(); ++r)
                for (int m = 0; m < model.cells(); ++m) counts(static_cast<Eigen::Index>(r), m) = patterns[r].counts[m];
            return counts;
        },
        py::arg("model"), py::arg("replicates"), py::arg("seed"), "Per-cell counts, one row per replicate.");
    m.def(
        "field_moment_mc",
        [](const GaussianFieldModel& model, const std::vector<int>& points, std::int64_t samples,
           std::uint64_t seed) { return report_dict(field_moment_mc(model, points, samples, seed)); },
        py::arg("model"), py::arg("points"), py::arg("samples"), py::arg("seed"));
    m.def(
        "quadrature_haf_moment",
        [](const GaussianFieldModel& model, const std::vector<std::vector<int>>& boxes) {
            std::vector<CellSet> b;
            for (const auto& x : boxes) b.push_back(make_cell_set(x));
            return quadrature_haf_moment(model, b).value;
        },
        py::arg("model"), py::arg("boxes"));
    m.def(
        "growth_bound",
        [](const GaussianFieldModel& model, const std::vector<int>& box, int order) {
            const GrowthBound g = growth_bound(model, make_cell_set(box), order);
            py::dict d;
            d["order"] = g.order;
            d["intensity"] = g.intensity;
            d["moment"] = g.moment;
            d["strict_bound"] = g.strict_bound;
            d["factorial_bound"] = g.factorial_bound;
            return d;
        },
        py::arg("model"), py::arg("box"), py::arg("order"));

    m.def(
        "fock_theta",
        [](const GaussianFieldModel& model, const std::vector<std::vector<int>>& boxes, int truncation) {
            std::vector<CellSet> b;
            for (const auto& x : boxes) b.push_back(make_cell_set(x));
            const int n = truncation > 0 ? truncation : 2 * static_cast<int>(b.size());
            return theta(Representation::cox(model, n), b);
        },
        py::arg("model"), py::arg("boxes"), py::arg("truncation") = 0,
        "theta of the Cox representation; truncation 0 means 2n.");
    m.def(
        "fock_moment",
        [](const GaussianFieldModel& model, const std::vector<std::vector<int>>& boxes, int truncation) {
            std::vector<CellSet> b;
            for (const auto& x : boxes) b.push_back(make_cell_set(x));
            const int n = truncation > 0 ? truncation : 2 * static_cast<int>(b.size());
            return moment(Representation::cox(model, n), b);
        },
        py::arg("model"), py::arg("boxes"), py::arg("truncation") = 0,
        "Vacuum expectation of rho(D_1)...rho(D_n); truncation 0 means 2n.");
}
