// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "haflab/errors.hpp"
#include "haflab/fock.hpp"
#include "haflab/matfun.hpp"
#include "haflab/rng.hpp"
#include "haflab/sampling.hpp"

namespace haflab {

int ExperimentConfig::effective_truncation() const {
    if (truncation) return *truncation;
    const int max_order = orders.empty() ? 1 : *std::max_element(orders.begin(), orders.end());
    return std::max(4, 2 * max_order);
}

Json ExperimentConfig::to_json() const {
    Json m;
    switch (model.kind) {
        case ModelSource::Kind::builtin:
            m["builtin"] = {{"name", model.builtin},
                            {"params",
                             {{"frequencies", model.params.frequencies},
                              {"length_scale", model.params.length_scale},
                              {"variance", model.params.variance}}}};
            break;
        case ModelSource::Kind::file:
            m["file"] = {{"path", model.file.string()}, {"sha256", sha256_file(model.file)}};
            break;
        case ModelSource::Kind::zero:
            m["zero"] = {{"feature_dim", model.zero_feature_dim}};
            break;
        case ModelSource::Kind::poisson: {
            Json lam = Json::array();
            for (const Complex& z : model.lambda) lam.push_back({z.real(), z.imag()});
            m["poisson"] = {{"lambda", lam}};
            break;
        }
    }
    Json j;
    j["model"] = m;
    j["grid"] = grid;
    j["seed"] = seed;
    j["replicates"] = replicates;
    j["samples"] = samples;
    j["boxes"] = boxes;
    j["orders"] = orders;
    j["truncation"] = effective_truncation();
    return j;
}

std::string ExperimentConfig::hash() const {
    return sha256_hex(to_json().dump());
}

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("config: field \"") + key + "\" has the wrong type");
    }
}

Complex complex_from_json(const Json& z) {
    if (z.is_number()) return z.get<double>();
    if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        return {z[0].get<double>(), z[1].get<double>()};
    }
    throw ConfigError("config: expected a number or [re, im] pair");
}

}  // namespace

ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    if (j.contains("model")) {
        const Json& m = j.at("model");
        if (!m.is_object() || m.size() != 1) throw ConfigError("config.model must have exactly one key");
        if (m.contains("builtin")) {
            const Json& b = m.at("builtin");
            c.model.kind = ModelSource::Kind::builtin;
            if (b.is_string()) {
                c.model.builtin = b.get<std::string>();
            } else {
                c.model.builtin = get_or<std::string>(b, "name", c.model.builtin);
                const Json p = b.value("params", Json::object());
                c.model.params.frequencies = get_or(p, "frequencies", c.model.params.frequencies);
                c.model.params.length_scale = get_or(p, "length_scale", c.model.params.length_scale);
                c.model.params.variance = get_or(p, "variance", c.model.params.variance);
            }
        } else if (m.contains("file")) {
            c.model.kind = ModelSource::Kind::file;
            std::filesystem::path p = m.at("file").get<std::string>();
            c.model.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        } else if (m.contains("zero")) {
            c.model.kind = ModelSource::Kind::zero;
            c.model.zero_feature_dim = get_or(m.at("zero"), "feature_dim", 1);
        } else if (m.contains("poisson")) {
            c.model.kind = ModelSource::Kind::poisson;
            const Json& lam = m.at("poisson").at("lambda");
            if (lam.is_array()) {
                if (lam.empty()) throw ConfigError("config.model.poisson.lambda must not be empty");
                for (const auto& z : lam) c.model.lambda.push_back(complex_from_json(z));
            } else {
                c.model.lambda.push_back(complex_from_json(lam));
            }
        } else {
            throw ConfigError("config.model: expected one of builtin, file, zero, poisson");
        }
    }
    if (j.contains("grid")) c.grid = j.at("grid");
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.replicates = get_or<std::int64_t>(j, "replicates", c.replicates);
    c.samples = get_or<std::int64_t>(j, "samples", c.samples);
    if (j.contains("boxes")) {
        for (const auto& b : j.at("boxes")) c.boxes.push_back(make_cell_set(b.get<std::vector<int>>()));
    }
    c.orders = get_or(j, "orders", c.orders);
    if (j.contains("truncation")) c.truncation = j.at("truncation").get<int>();
    c.output = get_or<std::string>(j, "output", "");
    if (c.replicates < 0) throw ConfigError("config: replicates must be nonnegative");
    if (c.samples < 1) throw ConfigError("config: samples must be positive");
    for (int n : c.orders) {
        if (n < 1) throw ConfigError("config: orders must be positive");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const Json j = read_json_file(path);
    try {
        return parse_config(j, path.parent_path());
    } catch (const Json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<CellSet> default_boxes(const Grid& grid) {
    const int m = grid.cells();
    if (m == 1) return {{0}};
    if (m == 2) return {{0}, {1}};
    CellSet a, b;
    for (int i = 0; i < m; ++i) (i < m / 2 ? a : b).push_back(i);
    return {a, b};
}

Grid config_grid(const ExperimentConfig& config) {
    if (config.model.kind == ModelSource::Kind::file) return load_model(config.model.file).grid();
    return grid_from_json(config.grid);
}

GaussianFieldModel config_model(const ExperimentConfig& config) {
    switch (config.model.kind) {
        case ModelSource::Kind::builtin:
            return builtin_model(config.model.builtin, grid_from_json(config.grid), config.model.params);
        case ModelSource::Kind::file:
            return load_model(config.model.file);
        case ModelSource::Kind::zero: {
            Grid grid = grid_from_json(config.grid);
            const int d = config.model.zero_feature_dim;
            if (d < 1) throw ConfigError("zero model: feature_dim must be >= 1");
            ComplexMatrix z = ComplexMatrix::Zero(d, grid.cells());
            return GaussianFieldModel::from_features(std::move(grid), z, z);
        }
        case ModelSource::Kind::poisson:
            break;
    }
    throw PreconditionError("config describes a Poisson process, not a Gaussian field model");
}

IntensityProfile config_profile(const ExperimentConfig& config) {
    if (config.model.kind != ModelSource::Kind::poisson) {
        throw PreconditionError("config does not describe a Poisson process");
    }
    Grid grid = grid_from_json(config.grid);
    if (config.model.lambda.size() == 1) return IntensityProfile::constant(std::move(grid), config.model.lambda[0]);
    return IntensityProfile(std::move(grid), config.model.lambda);
}

Json to_json(const CheckRecord& r) {
    Json j;
    j["check"] = r.check;
    j["residual"] = r.residual;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    j["std_error"] = r.std_error ? Json(*r.std_error) : Json(nullptr);
    j["n_samples"] = r.n_samples ? Json(*r.n_samples) : Json(nullptr);
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double relative(Complex a, Complex b) {
    const double diff = std::abs(a - b);
    const double scale = std::abs(b);
    return scale > 0.0 ? diff / scale : diff;
}

std::string tag(const std::string& name, int n) {
    return name + "[" + std::to_string(n) + "]";
}

class Battery {
public:
    void exact(const std::string& name, double tolerance, const std::function<double()>& residual) {
        run(name, [&] {
            CheckRecord r;
            r.residual = residual();
            r.tolerance = tolerance;
            r.passed = r.residual <= tolerance;
            return r;
        });
    }

    /// |estimate - target| <= 4 SE.
    void statistical(const std::string& name, const std::function<std::pair<MomentReport, Complex>()>& pair) {
        run(name, [&] {
            const auto [est, target] = pair();
            CheckRecord r;
            r.residual = std::abs(est.value - target);
            r.std_error = est.std_error.value_or(0.0);
            r.n_samples = est.n_samples;
            r.tolerance = 4.0 * *r.std_error;
            r.passed = r.residual <= r.tolerance;
            return r;
        });
    }

    /// value <= bound.
    void bound(const std::string& name, const std::function<std::pair<double, double>()>& pair) {
        run(name, [&] {
            const auto [value, limit] = pair();
            CheckRecord r;
            r.residual = value;
            r.tolerance = limit;
            r.passed = value <= limit;
            return r;
        });
    }

    std::vector<CheckRecord> take() { return std::move(records_); }

private:
    void run(const std::string& name, const std::function<CheckRecord()>& body) {
        CheckRecord r;
        try {
            r = body();
        } catch (const std::exception& e) {
            r = CheckRecord{};
            r.passed = false;
            r.residual = std::nan("");
            r.detail = e.what();
        }
        r.check = name;
        records_.push_back(std::move(r));
    }

    std::vector<CheckRecord> records_;
};

std::vector<ComplexVector> random_functions(int count, int cells, std::uint64_t seed) {
    Rng rng = stream(seed, 0x7e57);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ComplexVector> out;
    for (int k = 0; k < count; ++k) {
        ComplexVector h(cells);
        for (int m = 0; m < cells; ++m) h[m] = Complex(u(rng), u(rng));
        out.push_back(h);
    }
    return out;
}

// Checks shared by both representations: hermiticity, commutation, B commutator, quasi-free structure.
void representation_checks(Battery& bat, const Representation& rep, const std::vector<CellSet>& boxes,
                           const ExperimentConfig& config) {
    const int n_trunc = rep.truncation();
    const Grid& grid = rep.grid();
    const CellSet all = grid.all_cells();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        bat.exact(tag("rho_hermitian", static_cast<int>(i)), 1e-13, [&] {
            const FockOperator r = rep.rho(boxes[i]);
            return (r - r.adjoint()).block_norm(n_trunc - 2);
        });
        bat.exact(tag("rho_commutator", static_cast<int>(i)), 1e-10, [&] {
            return commutator(rep.rho(boxes[i]), rep.rho(all)).column_norm(n_trunc - 4);
        });
    }

    const auto h = random_functions(4, grid.cells(), config.seed);
    auto inner = [&](const ComplexVector& a, const ComplexVector& b) {
        Complex s = 0.0;
        for (int m = 0; m < grid.cells(); ++m) s += grid.volume(m) * a[m] * std::conj(b[m]);
        return s;
    };
    auto span_of = [](const ComplexVector& v) { return std::span<const Complex>(v.data(), v.size()); };
    bat.exact("b_commutator", 1e-10, [&] {
        const FockOperator c = commutator(rep.B(span_of(h[0])), rep.B(span_of(h[1])));
        const Complex expected = Complex(0.0, 2.0 * inner(h[1], h[0]).imag());
        return (c - FockOperator::identity(rep.basis()) * expected).column_norm(n_trunc - 2);
    });
    bat.exact("quasifree_T3", 1e-10, [&] {
        const std::vector<ComplexVector> hs{h[0], h[1], h[2]};
        return std::abs(quasifree_T(rep, hs));
    });
    bat.exact("quasifree_T4", 1e-9, [&] {
        auto T2 = [&](int a, int b) {
            const std::vector<ComplexVector> hs{h[a], h[b]};
            return quasifree_T(rep, hs);
        };
        const Complex pairs = T2(0, 1) * T2(2, 3) + T2(0, 2) * T2(1, 3) + T2(0, 3) * T2(1, 2);
        return relative(quasifree_T(rep, h), pairs);
    });
    bat.exact("wick_reordering", 1e-10, [&] {
        const std::vector<CellSet> pair{boxes[0], all};
        const Complex lhs = moment(rep, pair) - wick_vacuum(rep, pair)[0];
        const std::vector<CellSet> one{intersect(boxes[0], all)};
        return std::abs(lhs - moment(rep, one));
    });
}

void cox_checks(Battery& bat, const GaussianFieldModel& model, const std::vector<CellSet>& boxes,
                const ExperimentConfig& config) {
    const int n_trunc = config.effective_truncation();
    const Representation rep = Representation::cox(model, n_trunc);
    const std::vector<PointPattern> patterns = sample_cox_replicates(model, config.replicates, config.seed);
    const CellSet all = model.grid().all_cells();

    for (int n : config.orders) {
        if (n > static_cast<int>(boxes.size())) {
            throw ConfigError("order " + std::to_string(n) + " needs at least that many boxes");
        }
        const std::span<const CellSet> sub(boxes.data(), n);
        std::vector<int> points;
        for (int i = 0; i < n; ++i) points.push_back(boxes[i].front());
        const SymmetricMatrix kernel = block_kernel(model, points);

        bat.exact(tag("hafnian_oracle", n), 1e-10,
                  [&] { return relative(hafnian_enum(kernel), hafnian_dp(kernel)); });
        bat.exact(tag("gaussian_bridge", n), 1e-10,
                  [&] { return relative(gaussian_bridge(rep, points), hafnian_dp(kernel)); });
        bat.exact(tag("theta_quadrature", n), 1e-9, [&] {
            return relative(factorial(n) * theta(rep, sub), quadrature_haf_moment(model, sub).value);
        });
        if (n <= 3) {
            bat.statistical(tag("field_moment_mc", n), [&] {
                return std::pair{field_moment_mc(model, points, config.samples, config.seed), hafnian_dp(kernel)};
            });
            bat.bound(tag("growth_bound", n), [&] {
                const GrowthBound g = growth_bound(model, boxes[0], n);
                return std::pair{g.moment, g.factorial_bound};
            });
            bat.bound(tag("growth_bound_window", n), [&] {
                const GrowthBound g = growth_bound(model, all, n);
                return std::pair{g.moment, g.strict_bound};
            });
        }
        if (n <= 2 && config.replicates > 0) {
            bat.statistical(tag("cox_product_moment", n), [&] {
                return std::pair{empirical_product_moment(patterns, sub), quadrature_haf_moment(model, sub).value};
            });
            bat.statistical(tag("cox_fock_moment", n), [&] {
                return std::pair{empirical_product_moment(patterns, sub), moment(rep, sub)};
            });
            bat.statistical(tag("cox_factorial_moment", n), [&] {
                QuadratureOptions opts;
                opts.require_disjoint = false;
                const std::vector<CellSet> rep_box(n, boxes[0]);
                return std::pair{empirical_factorial_moment(patterns, boxes[0], n),
                                 quadrature_haf_moment(model, rep_box, opts).value};
            });
        }
    }

    bat.exact("ccr_A", 1e-12, [&] {
        double worst = 0.0;
        for (int a : {boxes[0].front(), boxes.back().front()}) {
            for (int b : {boxes[0].front(), boxes.back().front()}) {
                const Complex expected = a == b ? 1.0 / model.grid().volume(a) : 0.0;
                const FockOperator c = commutator(rep.A_minus(a), rep.A_plus(b));
                worst = std::max(worst,
                                 (c - FockOperator::identity(rep.basis()) * expected).column_norm(n_trunc - 1));
            }
        }
        return worst;
    });
    bat.exact("quasifree_T1", 1e-10, [&] {
        const auto h = random_functions(1, model.cells(), config.seed);
        return std::abs(quasifree_T(rep, h));
    });
    representation_checks(bat, rep, boxes, config);
}

void poisson_checks(Battery& bat, const IntensityProfile& profile, const std::vector<CellSet>& boxes,
                    const ExperimentConfig& config) {
    const int n_trunc = config.effective_truncation();
    const Representation rep = Representation::poisson(profile, n_trunc);
    const std::vector<PointPattern> patterns = sample_poisson_replicates(profile, config.replicates, config.seed);

    for (int n : config.orders) {
        if (n > static_cast<int>(boxes.size())) {
            throw ConfigError("order " + std::to_string(n) + " needs at least that many boxes");
        }
        const std::span<const CellSet> sub(boxes.data(), n);
        bat.exact(tag("poisson_theta", n), 1e-10, [&] {
            double expected = 1.0 / factorial(n);
            for (const auto& b : sub) expected *= profile.mass(b);
            return std::abs(theta(rep, sub) - expected);
        });
        if (config.replicates > 0) {
            bat.statistical(tag("poisson_factorial_moment", n), [&] {
                return std::pair{empirical_factorial_moment(patterns, boxes[0], n),
                                 Complex(std::pow(profile.mass(boxes[0]), n))};
            });
        }
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        bat.exact(tag("poisson_rho_closed_form", static_cast<int>(i)), 1e-12, [&] {
            return (rep.rho(boxes[i]) - poisson_rho_closed_form(rep, profile, boxes[i])).column_norm(n_trunc - 2);
        });
        bat.exact(tag("poisson_tau_rho", static_cast<int>(i)), 1e-12,
                  [&] { return std::abs(rep.rho(boxes[i]).vacuum_expectation() - profile.mass(boxes[i])); });
        if (config.replicates > 0) {
            bat.statistical(tag("poisson_mean", static_cast<int>(i)), [&] {
                const std::vector<CellSet> one{boxes[i]};
                return std::pair{empirical_product_moment(patterns, one), Complex(profile.mass(boxes[i]))};
            });
        }
    }
    representation_checks(bat, rep, boxes, config);
}

}  // namespace

std::vector<CheckRecord> run_verify(const ExperimentConfig& config) {
    Battery bat;
    if (config.model.kind == ModelSource::Kind::poisson) {
        const IntensityProfile profile = config_profile(config);
        std::vector<CellSet> boxes = config.boxes.empty() ? default_boxes(profile.grid()) : config.boxes;
        for (const auto& b : boxes) profile.grid().check_cells(b);
        if (!pairwise_disjoint(boxes)) throw ConfigError("config: boxes must be pairwise disjoint");
        poisson_checks(bat, profile, boxes, config);
    } else {
        const GaussianFieldModel model = config_model(config);
        std::vector<CellSet> boxes = config.boxes.empty() ? default_boxes(model.grid()) : config.boxes;
        for (const auto& b : boxes) {
            if (b.empty()) throw ConfigError("config: boxes must be nonempty");
            model.grid().check_cells(b);
        }
        if (!pairwise_disjoint(boxes)) throw ConfigError("config: boxes must be pairwise disjoint");
        bat.exact("features_valid", 0.0, [&] {
            double worst = 0.0;
            for (const auto& v : validate_features(model.L1(), model.L2())) worst = std::max(worst, v.residual);
            return worst;
        });
        cox_checks(bat, model, boxes, config);
    }
    return bat.take();
}

}  // namespace haflab
