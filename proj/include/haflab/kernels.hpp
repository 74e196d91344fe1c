// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file kernels.hpp
 * @brief Gridded window, feature-map Gaussian field models and the 2x2-block correlation kernel.
 *
 * The feature space is C^d with the involution given by componentwise complex
 * conjugation. Inner products are linear in the first argument:
 *   (f, g) = sum_j f_j * conj(g_j).
 * A model is given by two feature matrices L1, L2 (d x M, one column per grid
 * cell). Its covariance and pseudo-covariance Gram matrices are
 *   K1(m, m') = sum_j L1(j, m) * conj(L1(j, m')),
 *   K2(m, m') = sum_j L1(j, m) * L2(j, m').
 */

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "haflab/matfun.hpp"

namespace haflab {

using Point = std::vector<double>;

/// Sorted, duplicate-free list of grid cell indices. Stands in for a bounded Borel set.
using CellSet = std::vector<int>;

CellSet make_cell_set(std::vector<int> cells);
CellSet intersect(const CellSet& a, const CellSet& b);
bool pairwise_disjoint(std::span<const CellSet> sets);

/// Axis-aligned box.
struct Window {
    Point lo;
    Point hi;

    [[nodiscard]] int space_dim() const noexcept { return static_cast<int>(lo.size()); }
    [[nodiscard]] double volume() const;
};

/// Finite partition of a window into cells, each with a center and a reference-measure volume.
class Grid {
public:
    /// Equal-volume cells on [lo, hi].
    static Grid uniform(double lo, double hi, int cells);
    /// Tensor-product grid with `cells_per_axis[k]` equal cells along axis k.
    static Grid uniform(const Window& window, const std::vector<int>& cells_per_axis);
    /// Arbitrary cells. Volumes must be positive and sum to the window volume; centers distinct.
    static Grid from_cells(Window window, std::vector<Point> centers, std::vector<double> volumes);

    [[nodiscard]] int cells() const noexcept { return static_cast<int>(centers_.size()); }
    [[nodiscard]] int space_dim() const noexcept { return window_.space_dim(); }
    [[nodiscard]] const Window& window() const noexcept { return window_; }
    [[nodiscard]] const Point& center(int m) const { return centers_.at(m); }
    [[nodiscard]] double volume(int m) const { return volumes_.at(m); }
    [[nodiscard]] std::span<const double> volumes() const noexcept { return volumes_; }
    [[nodiscard]] const std::vector<int>& cells_per_axis() const noexcept { return cells_per_axis_; }

    /// Throws RangeError unless every index is a valid cell.
    void check_cells(std::span<const int> cells) const;
    [[nodiscard]] CellSet all_cells() const;

private:
    Grid(Window window, std::vector<Point> centers, std::vector<double> volumes, std::vector<int> per_axis);

    Window window_;
    std::vector<Point> centers_;
    std::vector<double> volumes_;
    std::vector<int> cells_per_axis_;
};

struct FeatureViolation {
    enum class Kind {
        pseudo_covariance_symmetry,  // (L1(x), J L2(y)) != (L1(y), J L2(x))
        norm_equality,               // (L1(x), L1(y)) != (L2(x), L2(y))
    };
    Kind kind;
    int cell_a;
    int cell_b;
    double residual;
};

std::string describe(const FeatureViolation& v);

/// Checks both bilinear conditions on every cell pair with tolerance 1e-10 * (1 + max squared column norm).
/// Throws DimensionError on shape mismatch.
std::vector<FeatureViolation> validate_features(const ComplexMatrix& l1, const ComplexMatrix& l2);

/// Complex Gaussian field model defined through feature maps on a grid. Immutable.
class GaussianFieldModel {
public:
    /// Validates the features and precomputes K1 and K2. Throws ModelError listing every violation.
    static GaussianFieldModel from_features(Grid grid, ComplexMatrix l1, ComplexMatrix l2);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int cells() const noexcept { return grid_.cells(); }
    [[nodiscard]] int feature_dim() const noexcept { return static_cast<int>(l1_.rows()); }
    [[nodiscard]] const ComplexMatrix& L1() const noexcept { return l1_; }
    [[nodiscard]] const ComplexMatrix& L2() const noexcept { return l2_; }
    /// Covariance E[G(x) conj G(y)].
    [[nodiscard]] const ComplexMatrix& K1() const noexcept { return k1_; }
    /// Pseudo-covariance E[G(x) G(y)].
    [[nodiscard]] const ComplexMatrix& K2() const noexcept { return k2_; }

private:
    GaussianFieldModel(Grid grid, ComplexMatrix l1, ComplexMatrix l2);

    Grid grid_;
    ComplexMatrix l1_, l2_, k1_, k2_;
};

/// Feature pair from two maps alpha, beta (d x M each) in stacked feature dimension 2d:
///   L1 = ((alpha+beta)/2 ; (alpha-beta)/2),  L2 = ((alpha-beta)/2 ; (alpha+beta)/2),
/// so that K1 = (<alpha,alpha> + <beta,beta>)/2 and K2 = (alpha.alpha - beta.beta)/2.
GaussianFieldModel from_alpha_beta(const ComplexMatrix& alpha, const ComplexMatrix& beta, Grid grid);

/// Interleaved 2n x 2n matrix with 2x2 blocks [[K2, K1], [conj K1, conj K2]] at (x_i, x_j).
/// Rows 2i and 2i+1 belong to point i. Repeated cells are allowed.
SymmetricMatrix block_kernel(const GaussianFieldModel& model, std::span<const int> points);

/// Block kernel [[0, K(i,j)], [K(j,i), 0]] whose hafnian is per[K].
SymmetricMatrix permanental_embedding(const ComplexMatrix& k);
/// Block kernel with all four entries K(i,j); for symmetric K its hafnian is the 2-determinant of K.
SymmetricMatrix two_permanental_embedding(const ComplexMatrix& k);

struct BuiltinParams {
    /// Number of Fourier frequencies (harmonics of the window) per model.
    int frequencies = 1;
    /// Length scale of the squared-exponential spectral weights.
    double length_scale = 0.2;
    /// Pointwise variance K1(x, x).
    double variance = 1.0;
};

/// Names accepted by builtin_model.
std::vector<std::string> builtin_model_names();

/**
 * Ready-made validated models.
 *
 * - "proper-fourier": L1 = (L, 0), L2 = (0, L) with complex Fourier features
 *   L_j(x) = w_j exp(i omega_j s(x)), omega_j the j-th harmonic of the window and
 *   w_j^2 squared-exponential spectral weights. Proper field: K2 = 0.
 * - "real-gauss": L1 = L2 = L with real (cos, sin) feature pairs per frequency;
 *   K1 = K2 = sum_j w_j^2 cos(omega_j (s(x) - s(y))).
 * - "alpha-beta-demo": from_alpha_beta with fixed complex alpha, beta; K2 != 0, complex K1.
 *
 * s(x) is the coordinate sum of x. Throws ConfigError for unknown names.
 */
GaussianFieldModel builtin_model(std::string_view name, const Grid& grid, const BuiltinParams& params = {});

enum class FeatureSide { first, second };

/// sum_{m in cells} vol_m * ||L_m||^2 using L1 (default) or L2.
double intensity_integral(const GaussianFieldModel& model, const CellSet& cells,
                          FeatureSide side = FeatureSide::first);

/// Deterministic intensity lambda(x_m) for the shifted (Poisson) representation.
class IntensityProfile {
public:
    /// Throws ConfigError on size mismatch or non-finite values.
    IntensityProfile(Grid grid, std::vector<Complex> lambda);
    static IntensityProfile constant(Grid grid, Complex value);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int cells() const noexcept { return grid_.cells(); }
    [[nodiscard]] Complex lambda(int m) const { return lambda_.at(m); }
    [[nodiscard]] std::span<const Complex> values() const noexcept { return lambda_; }
    /// sum_{m in cells} |lambda_m|^2 vol_m
    [[nodiscard]] double mass(const CellSet& cells) const;

private:
    Grid grid_;
    std::vector<Complex> lambda_;
};

}  // namespace haflab
