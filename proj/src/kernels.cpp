// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "haflab/errors.hpp"

namespace haflab {

CellSet make_cell_set(std::vector<int> cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

CellSet intersect(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool pairwise_disjoint(std::span<const CellSet> sets) {
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            if (!intersect(sets[i], sets[j]).empty()) return false;
    return true;
}

double Window::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
    return v;
}

Grid::Grid(Window window, std::vector<Point> centers, std::vector<double> volumes, std::vector<int> per_axis)
    : window_(std::move(window)),
      centers_(std::move(centers)),
      volumes_(std::move(volumes)),
      cells_per_axis_(std::move(per_axis)) {}

Grid Grid::uniform(double lo, double hi, int cells) {
    return uniform(Window{{lo}, {hi}}, {cells});
}

Grid Grid::uniform(const Window& window, const std::vector<int>& cells_per_axis) {
    const int dim = window.space_dim();
    if (dim < 1 || window.hi.size() != window.lo.size() ||
        cells_per_axis.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("grid: window bounds and cells_per_axis must have the same dimension");
    }
    for (int k = 0; k < dim; ++k) {
        if (!(window.hi[k] > window.lo[k])) throw ConfigError("grid: window must have positive extent");
        if (cells_per_axis[k] < 1) throw ConfigError("grid: need at least one cell per axis");
    }
    int total = 1;
    for (int c : cells_per_axis) total *= c;

    std::vector<Point> centers;
    std::vector<double> volumes;
    centers.reserve(total);
    double cell_volume = 1.0;
    for (int k = 0; k < dim; ++k) cell_volume *= (window.hi[k] - window.lo[k]) / cells_per_axis[k];

    // Row-major over axes: the last axis varies fastest.
    std::vector<int> idx(dim, 0);
    for (int m = 0; m < total; ++m) {
        Point x(dim);
        for (int k = 0; k < dim; ++k) {
            const double h = (window.hi[k] - window.lo[k]) / cells_per_axis[k];
            x[k] = window.lo[k] + (idx[k] + 0.5) * h;
        }
        centers.push_back(std::move(x));
        volumes.push_back(cell_volume);
        for (int k = dim - 1; k >= 0; --k) {
            if (++idx[k] < cells_per_axis[k]) break;
            idx[k] = 0;
        }
    }
    return Grid(window, std::move(centers), std::move(volumes), cells_per_axis);
}

Grid Grid::from_cells(Window window, std::vector<Point> centers, std::vector<double> volumes) {
    if (centers.empty()) throw ConfigError("grid: need at least one cell");
    if (centers.size() != volumes.size()) throw ConfigError("grid: centers and volumes differ in length");
    for (const auto& c : centers) {
        if (static_cast<int>(c.size()) != window.space_dim()) throw ConfigError("grid: center has wrong dimension");
    }
    for (double v : volumes) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("grid: cell volumes must be positive");
    }
    const double total = std::accumulate(volumes.begin(), volumes.end(), 0.0);
    const double wv = window.volume();
    if (std::abs(total - wv) > 1e-12 * std::abs(wv)) {
        throw ConfigError("grid: cell volumes do not sum to the window volume");
    }
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (centers[i] == centers[j]) throw ConfigError("grid: duplicate cell center");
    return Grid(std::move(window), std::move(centers), std::move(volumes), {});
}

void Grid::check_cells(std::span<const int> cells) const {
    for (int m : cells) {
        if (m < 0 || m >= this->cells()) {
            throw RangeError("cell index " + std::to_string(m) + " outside grid of " +
                             std::to_string(this->cells()) + " cells");
        }
    }
}

CellSet Grid::all_cells() const {
    CellSet all(cells());
    std::iota(all.begin(), all.end(), 0);
    return all;
}

std::string describe(const FeatureViolation& v) {
    std::ostringstream out;
    out << (v.kind == FeatureViolation::Kind::pseudo_covariance_symmetry ? "pseudo-covariance symmetry"
                                                                         : "norm equality")
        << " violated at cells (" << v.cell_a << ", " << v.cell_b << "), residual " << v.residual;
    return out.str();
}

std::vector<FeatureViolation> validate_features(const ComplexMatrix& l1, const ComplexMatrix& l2) {
    if (l1.rows() != l2.rows() || l1.cols() != l2.cols()) {
        throw DimensionError("feature maps L1 and L2 must have the same shape");
    }
    double max_norm2 = 0.0;
    for (Eigen::Index m = 0; m < l1.cols(); ++m) {
        max_norm2 = std::max({max_norm2, l1.col(m).squaredNorm(), l2.col(m).squaredNorm()});
    }
    const double tol = 1e-10 * (1.0 + max_norm2);

    // pseudo[m][m'] = sum_j L1(j,m) L2(j,m'); gram_i[m][m'] = sum_j Li(j,m) conj(Li(j,m'))
    const ComplexMatrix pseudo = l1.transpose() * l2;
    const ComplexMatrix gram1 = l1.transpose() * l1.conjugate();
    const ComplexMatrix gram2 = l2.transpose() * l2.conjugate();

    std::vector<FeatureViolation> out;
    const int cells = static_cast<int>(l1.cols());
    for (int a = 0; a < cells; ++a) {
        for (int b = a; b < cells; ++b) {
            const double sym = std::abs(pseudo(a, b) - pseudo(b, a));
            if (sym > tol) out.push_back({FeatureViolation::Kind::pseudo_covariance_symmetry, a, b, sym});
        }
        for (int b = 0; b < cells; ++b) {
            const double norm = std::abs(gram1(a, b) - gram2(a, b));
            if (norm > tol) out.push_back({FeatureViolation::Kind::norm_equality, a, b, norm});
        }
    }
    return out;
}

GaussianFieldModel::GaussianFieldModel(Grid grid, ComplexMatrix l1, ComplexMatrix l2)
    : grid_(std::move(grid)), l1_(std::move(l1)), l2_(std::move(l2)) {
    k1_ = l1_.transpose() * l1_.conjugate();
    // Hermitian exactly: mirror the upper triangle.
    for (Eigen::Index i = 0; i < k1_.rows(); ++i) {
        k1_(i, i) = Complex(k1_(i, i).real(), 0.0);
        for (Eigen::Index j = 0; j < i; ++j) k1_(i, j) = std::conj(k1_(j, i));
    }
    k2_ = l1_.transpose() * l2_;
}

GaussianFieldModel GaussianFieldModel::from_features(Grid grid, ComplexMatrix l1, ComplexMatrix l2) {
    if (l1.cols() != grid.cells()) {
        throw DimensionError("feature maps have " + std::to_string(l1.cols()) + " columns, grid has " +
                             std::to_string(grid.cells()) + " cells");
    }
    if (l1.rows() < 1) throw DimensionError("feature dimension must be at least 1");
    const auto violations = validate_features(l1, l2);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "feature maps violate the admissibility conditions (" << violations.size() << " violations)";
        for (const auto& v : violations) msg << "\n  " << describe(v);
        throw ModelError(msg.str());
    }
    return GaussianFieldModel(std::move(grid), std::move(l1), std::move(l2));
}

GaussianFieldModel from_alpha_beta(const ComplexMatrix& alpha, const ComplexMatrix& beta, Grid grid) {
    if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols()) {
        throw DimensionError("alpha and beta must have the same shape");
    }
    const Eigen::Index d = alpha.rows();
    const Eigen::Index m = alpha.cols();
    ComplexMatrix l1(2 * d, m), l2(2 * d, m);
    l1.topRows(d) = 0.5 * (alpha + beta);
    l1.bottomRows(d) = 0.5 * (alpha - beta);
    l2.topRows(d) = 0.5 * (alpha - beta);
    l2.bottomRows(d) = 0.5 * (alpha + beta);
    return GaussianFieldModel::from_features(std::move(grid), std::move(l1), std::move(l2));
}

SymmetricMatrix block_kernel(const GaussianFieldModel& model, std::span<const int> points) {
    model.grid().check_cells(points);
    const auto n = static_cast<Eigen::Index>(points.size());
    const ComplexMatrix& k1 = model.K1();
    const ComplexMatrix& k2 = model.K2();
    ComplexMatrix c(2 * n, 2 * n);
    // Fill the upper triangle from the block formula and mirror it, so the result is exactly symmetric
    // even when K2 is symmetric only to rounding.
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const int a = points[i], b = points[j];
            c(2 * i, 2 * j) = k2(a, b);
            c(2 * i, 2 * j + 1) = k1(a, b);
            c(2 * i + 1, 2 * j) = std::conj(k1(a, b));
            c(2 * i + 1, 2 * j + 1) = std::conj(k2(a, b));
        }
    }
    return SymmetricMatrix::from_upper(c);
}

SymmetricMatrix permanental_embedding(const ComplexMatrix& k) {
    if (k.rows() != k.cols()) throw DimensionError("kernel matrix must be square");
    const Eigen::Index n = k.rows();
    ComplexMatrix c = ComplexMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            c(2 * i, 2 * j + 1) = k(i, j);
            c(2 * i + 1, 2 * j) = k(j, i);
        }
    }
    return SymmetricMatrix(std::move(c));
}

SymmetricMatrix two_permanental_embedding(const ComplexMatrix& k) {
    if (k.rows() != k.cols()) throw DimensionError("kernel matrix must be square");
    const Eigen::Index n = k.rows();
    ComplexMatrix c(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            c.block<2, 2>(2 * i, 2 * j).setConstant(k(i, j));
    return SymmetricMatrix::from_upper(c);
}

std::vector<std::string> builtin_model_names() {
    return {"proper-fourier", "real-gauss", "alpha-beta-demo"};
}

namespace {

struct Spectrum {
    std::vector<double> omega;
    std::vector<double> weight2;  // sums to 1
};

// Harmonics of the window, weighted by a squared-exponential spectral density.
Spectrum harmonic_spectrum(const Grid& grid, const BuiltinParams& p) {
    if (p.frequencies < 1) throw ConfigError("builtin model: frequencies must be >= 1");
    if (!(p.length_scale > 0.0)) throw ConfigError("builtin model: length_scale must be positive");
    if (!(p.variance >= 0.0)) throw ConfigError("builtin model: variance must be nonnegative");
    double extent = 0.0;
    for (int k = 0; k < grid.space_dim(); ++k) extent += grid.window().hi[k] - grid.window().lo[k];
    Spectrum s;
    double total = 0.0;
    for (int j = 0; j < p.frequencies; ++j) {
        const double omega = 2.0 * std::numbers::pi * (j + 1) / extent;
        const double w2 = std::exp(-0.5 * omega * omega * p.length_scale * p.length_scale);
        s.omega.push_back(omega);
        s.weight2.push_back(w2);
        total += w2;
    }
    for (double& w : s.weight2) w /= total;
    return s;
}

double coord_sum(const Point& x) {
    return std::accumulate(x.begin(), x.end(), 0.0);
}

}  // namespace

GaussianFieldModel builtin_model(std::string_view name, const Grid& grid, const BuiltinParams& params) {
    const int cells = grid.cells();
    if (name == "proper-fourier") {
        const Spectrum s = harmonic_spectrum(grid, params);
        const int q = params.frequencies;
        ComplexMatrix l = ComplexMatrix::Zero(q, cells);
        for (int j = 0; j < q; ++j) {
            const double w = std::sqrt(params.variance * s.weight2[j]);
            for (int m = 0; m < cells; ++m) l(j, m) = std::polar(w, s.omega[j] * coord_sum(grid.center(m)));
        }
        ComplexMatrix l1 = ComplexMatrix::Zero(2 * q, cells), l2 = ComplexMatrix::Zero(2 * q, cells);
        l1.topRows(q) = l;
        l2.bottomRows(q) = l;
        return GaussianFieldModel::from_features(grid, std::move(l1), std::move(l2));
    }
    if (name == "real-gauss") {
        const Spectrum s = harmonic_spectrum(grid, params);
        const int q = params.frequencies;
        ComplexMatrix l = ComplexMatrix::Zero(2 * q, cells);
        for (int j = 0; j < q; ++j) {
            const double w = std::sqrt(params.variance * s.weight2[j]);
            for (int m = 0; m < cells; ++m) {
                const double phase = s.omega[j] * coord_sum(grid.center(m));
                l(2 * j, m) = w * std::cos(phase);
                l(2 * j + 1, m) = w * std::sin(phase);
            }
        }
        return GaussianFieldModel::from_features(grid, l, l);
    }
    if (name == "alpha-beta-demo") {
        const Spectrum s = harmonic_spectrum(grid, params);
        const int q = params.frequencies;
        constexpr double beta_ratio = 0.8;
        // K1(x,x) = (|alpha|^2 + |beta|^2) / 2 summed over features.
        const double scale = std::sqrt(2.0 * params.variance / (1.0 + beta_ratio * beta_ratio));
        ComplexMatrix alpha(q, cells), beta(q, cells);
        for (int j = 0; j < q; ++j) {
            const double w = scale * std::sqrt(s.weight2[j]);
            for (int m = 0; m < cells; ++m) {
                const double t = coord_sum(grid.center(m));
                alpha(j, m) = std::polar(w, s.omega[j] * t);
                beta(j, m) = std::polar(beta_ratio * w, -s.omega[j] * t + std::numbers::pi / 5.0);
            }
        }
        return from_alpha_beta(alpha, beta, grid);
    }
    throw ConfigError("unknown builtin model '" + std::string(name) + "'");
}

double intensity_integral(const GaussianFieldModel& model, const CellSet& cells, FeatureSide side) {
    model.grid().check_cells(cells);
    const ComplexMatrix& l = side == FeatureSide::first ? model.L1() : model.L2();
    double total = 0.0;
    for (int m : cells) total += model.grid().volume(m) * l.col(m).squaredNorm();
    return total;
}

IntensityProfile::IntensityProfile(Grid grid, std::vector<Complex> lambda)
    : grid_(std::move(grid)), lambda_(std::move(lambda)) {
    if (static_cast<int>(lambda_.size()) != grid_.cells()) {
        throw ConfigError("intensity profile: expected " + std::to_string(grid_.cells()) + " values");
    }
    for (const Complex& v : lambda_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw ConfigError("intensity profile: values must be finite");
        }
    }
}

IntensityProfile IntensityProfile::constant(Grid grid, Complex value) {
    const int cells = grid.cells();
    return IntensityProfile(std::move(grid), std::vector<Complex>(cells, value));
}

double IntensityProfile::mass(const CellSet& cells) const {
    grid_.check_cells(cells);
    double total = 0.0;
    for (int m : cells) total += std::norm(lambda_[m]) * grid_.volume(m);
    return total;
}

}  // namespace haflab
