// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "haflab/errors.hpp"

namespace haflab {

long long PointPattern::count(const CellSet& cells) const {
    long long n = 0;
    for (int m : cells) n += counts.at(m);
    return n;
}

long long PointPattern::total() const {
    return std::accumulate(counts.begin(), counts.end(), 0LL);
}

BatchEstimate batch_estimate(std::span<const double> values, int batches) {
    BatchEstimate est;
    const auto n = static_cast<std::int64_t>(values.size());
    if (n == 0) return est;
    est.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    const std::int64_t b = std::min<std::int64_t>(batches, n);
    if (b < 2) return est;
    std::vector<double> means(b);
    for (std::int64_t k = 0; k < b; ++k) {
        const std::int64_t lo = k * n / b, hi = (k + 1) * n / b;
        means[k] = std::accumulate(values.begin() + lo, values.begin() + hi, 0.0) / static_cast<double>(hi - lo);
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    est.std_error = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
    return est;
}

Eigen::MatrixXd augmented_covariance(const GaussianFieldModel& model) {
    const int m = model.cells();
    const ComplexMatrix& k1 = model.K1();
    const ComplexMatrix& k2 = model.K2();
    Eigen::MatrixXd c(2 * m, 2 * m);
    c.topLeftCorner(m, m) = 0.5 * (k1 + k2).real();
    c.bottomRightCorner(m, m) = 0.5 * (k1 - k2).real();
    c.topRightCorner(m, m) = 0.5 * (k2.imag() - k1.imag());
    c.bottomLeftCorner(m, m) = 0.5 * (k2.imag() + k1.imag());
    // Symmetrize away rounding in K2 so the eigensolver sees an exactly symmetric input.
    const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());

    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
        const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
        if (eig.eigenvalues().minCoeff() < -1e-8 * scale) {
            throw ModelError("augmented covariance has eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) +
                             "; the (K1, K2) pair is not a Gaussian covariance");
        }
    }
    return sym;
}

FieldSampler::FieldSampler(const GaussianFieldModel& model) : cells_(model.cells()) {
    const Eigen::MatrixXd cov = augmented_covariance(model);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = eig.eigenvectors() * root.asDiagonal();
}

FieldSample FieldSampler::draw(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd xi(2 * cells_);
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
    const Eigen::VectorXd z = factor_ * xi;
    FieldSample s;
    s.values.resize(cells_);
    for (int m = 0; m < cells_; ++m) s.values[m] = Complex(z[m], z[cells_ + m]);
    return s;
}

FieldSample sample_field(const GaussianFieldModel& model, std::uint64_t seed) {
    Rng rng(seed);
    return FieldSampler(model).draw(rng);
}

FieldSample draw_field_direct(const ComplexMatrix& alpha, const ComplexMatrix& beta, Rng& rng) {
    if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols()) {
        throw DimensionError("alpha and beta must have the same shape");
    }
    std::normal_distribution<double> normal;
    Eigen::VectorXd xi(alpha.rows()), eta(beta.rows());
    for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = normal(rng);
    for (Eigen::Index j = 0; j < eta.size(); ++j) eta[j] = normal(rng);
    FieldSample s;
    s.values = M_SQRT1_2 * (alpha.transpose() * xi.cast<Complex>() +
                            Complex(0.0, 1.0) * (beta.transpose() * eta.cast<Complex>()));
    return s;
}

FieldSample sample_field_direct(const ComplexMatrix& alpha, const ComplexMatrix& beta, std::uint64_t seed) {
    Rng rng(seed);
    return draw_field_direct(alpha, beta, rng);
}

namespace {

int poisson_count(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    return std::poisson_distribution<int>(mean)(rng);
}

}  // namespace

PointPattern draw_poisson(const IntensityProfile& profile, Rng& rng) {
    PointPattern p;
    p.counts.resize(profile.cells());
    for (int m = 0; m < profile.cells(); ++m) {
        p.counts[m] = poisson_count(std::norm(profile.lambda(m)) * profile.grid().volume(m), rng);
    }
    return p;
}

PointPattern sample_poisson(const IntensityProfile& profile, std::uint64_t seed) {
    Rng rng(seed);
    return draw_poisson(profile, rng);
}

PointPattern draw_cox(const FieldSampler& sampler, const Grid& grid, Rng& rng) {
    const FieldSample g = sampler.draw(rng);
    PointPattern p;
    p.counts.resize(grid.cells());
    for (int m = 0; m < grid.cells(); ++m) p.counts[m] = poisson_count(std::norm(g.values[m]) * grid.volume(m), rng);
    return p;
}

PointPattern sample_cox(const GaussianFieldModel& model, std::uint64_t seed) {
    Rng rng(seed);
    return draw_cox(FieldSampler(model), model.grid(), rng);
}

std::vector<PointPattern> sample_poisson_replicates(const IntensityProfile& profile, std::int64_t replicates,
                                                    std::uint64_t seed) {
    std::vector<PointPattern> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(replicates, 0)));
    for (std::int64_t r = 0; r < replicates; ++r) {
        Rng rng = stream(seed, static_cast<std::uint64_t>(r));
        out.push_back(draw_poisson(profile, rng));
    }
    return out;
}

std::vector<PointPattern> sample_cox_replicates(const GaussianFieldModel& model, std::int64_t replicates,
                                                std::uint64_t seed) {
    const FieldSampler sampler(model);
    std::vector<PointPattern> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(replicates, 0)));
    for (std::int64_t r = 0; r < replicates; ++r) {
        Rng rng = stream(seed, static_cast<std::uint64_t>(r));
        out.push_back(draw_cox(sampler, model.grid(), rng));
    }
    return out;
}

MomentReport field_moment_mc(const GaussianFieldModel& model, std::span<const int> points, std::int64_t n_samples,
                             std::uint64_t seed, int max_points) {
    model.grid().check_cells(points);
    if (static_cast<int>(points.size()) > max_points) {
        throw CapacityError("field_moment_mc: at most " + std::to_string(max_points) + " points");
    }
    if (n_samples < 1) throw PreconditionError("field_moment_mc: need at least one sample");
    const FieldSampler sampler(model);
    std::vector<double> values(static_cast<std::size_t>(n_samples));
    for (std::int64_t s = 0; s < n_samples; ++s) {
        Rng rng = stream(seed, static_cast<std::uint64_t>(s));
        const FieldSample g = sampler.draw(rng);
        double prod = 1.0;
        for (int m : points) prod *= std::norm(g.values[m]);
        values[s] = prod;
    }
    const BatchEstimate est = batch_estimate(values);
    MomentReport r;
    r.label = "field_moment_mc";
    r.value = est.mean;
    r.std_error = est.std_error;
    r.n_samples = n_samples;
    return r;
}

Complex quadrature(const Grid& grid, std::span<const CellSet> boxes, const TupleFunction& f,
                   const QuadratureOptions& options) {
    const int n = static_cast<int>(boxes.size());
    if (n > options.max_boxes) {
        throw CapacityError("quadrature: at most " + std::to_string(options.max_boxes) + " boxes");
    }
    for (const auto& box : boxes) grid.check_cells(box);
    if (options.require_disjoint && !pairwise_disjoint(boxes)) {
        throw PreconditionError("quadrature: boxes must be pairwise disjoint");
    }
    std::uint64_t tuples = 1;
    for (const auto& box : boxes) {
        if (box.empty()) return 0.0;
        tuples *= box.size();
        if (tuples > options.max_tuples) {
            throw CapacityError("quadrature: tuple count exceeds budget " + std::to_string(options.max_tuples));
        }
    }

    std::vector<std::size_t> idx(n, 0);
    std::vector<int> point(n);
    Complex total = 0.0;
    for (std::uint64_t t = 0; t < tuples; ++t) {
        double weight = 1.0;
        for (int i = 0; i < n; ++i) {
            point[i] = boxes[i][idx[i]];
            weight *= grid.volume(point[i]);
        }
        total += weight * f(point);
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[i] < boxes[i].size()) break;
            idx[i] = 0;
        }
    }
    return total;
}

MomentReport quadrature_haf_moment(const GaussianFieldModel& model, std::span<const CellSet> boxes,
                                   const QuadratureOptions& options) {
    MomentReport r;
    r.label = "quadrature_haf_moment";
    r.value = quadrature(
        model.grid(), boxes, [&](std::span<const int> pts) { return hafnian_dp(block_kernel(model, pts)); },
        options);
    return r;
}

namespace {

MomentReport mean_report(std::string label, std::span<const double> values) {
    const BatchEstimate est = batch_estimate(values);
    MomentReport r;
    r.label = std::move(label);
    r.value = est.mean;
    r.std_error = est.std_error;
    r.n_samples = static_cast<long long>(values.size());
    return r;
}

}  // namespace

MomentReport empirical_product_moment(std::span<const PointPattern> patterns, std::span<const CellSet> boxes) {
    if (patterns.empty()) throw PreconditionError("empirical_product_moment: no patterns");
    if (!pairwise_disjoint(boxes)) throw PreconditionError("empirical_product_moment: boxes must be disjoint");
    std::vector<double> values;
    values.reserve(patterns.size());
    for (const auto& p : patterns) {
        double prod = 1.0;
        for (const auto& box : boxes) prod *= static_cast<double>(p.count(box));
        values.push_back(prod);
    }
    return mean_report("empirical_product_moment", values);
}

MomentReport empirical_factorial_moment(std::span<const PointPattern> patterns, const CellSet& box, int n) {
    if (n < 1) throw PreconditionError("empirical_factorial_moment: order must be >= 1");
    if (patterns.empty()) throw PreconditionError("empirical_factorial_moment: no patterns");
    std::vector<double> values;
    values.reserve(patterns.size());
    for (const auto& p : patterns) {
        const long long c = p.count(box);
        double prod = 1.0;
        for (int k = 0; k < n; ++k) prod *= static_cast<double>(c - k);
        values.push_back(prod);
    }
    return mean_report("empirical_factorial_moment", values);
}

GrowthBound growth_bound(const GaussianFieldModel& model, const CellSet& box, int order) {
    GrowthBound g;
    g.order = order;
    g.intensity = intensity_integral(model, box);
    const std::vector<CellSet> boxes(order, box);
    QuadratureOptions opts;
    opts.require_disjoint = false;
    g.moment = quadrature_haf_moment(model, boxes, opts).value.real();
    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    g.strict_bound = std::pow(2.0 * g.intensity, order);
    g.factorial_bound = factorial * g.strict_bound;
    return g;
}

void write_patterns_csv_header(std::ostream& out) {
    out << "replicate,cell_index,count\n";
}

void write_patterns_csv(std::ostream& out, std::span<const PointPattern> patterns, std::int64_t first_replicate) {
    for (std::size_t r = 0; r < patterns.size(); ++r) {
        const auto& counts = patterns[r].counts;
        for (std::size_t m = 0; m < counts.size(); ++m) {
            if (counts[m] != 0) out << first_replicate + static_cast<std::int64_t>(r) << ',' << m << ',' << counts[m] << '\n';
        }
    }
}

void write_report_jsonl(std::ostream& out, const MomentReport& report) {
    nlohmann::json j;
    j["label"] = report.label;
    if (report.value.imag() == 0.0) {
        j["value"] = report.value.real();
    } else {
        j["value"] = {report.value.real(), report.value.imag()};
    }
    j["std_error"] = report.std_error ? nlohmann::json(*report.std_error) : nlohmann::json(nullptr);
    j["n_samples"] = report.n_samples ? nlohmann::json(*report.n_samples) : nlohmann::json(nullptr);
    out << j.dump() << '\n';
}

}  // namespace haflab
