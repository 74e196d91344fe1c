// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file sampling.hpp
 * @brief Gaussian field, Poisson and Cox samplers on a grid, with exact and Monte Carlo moments.
 *
 * The sampled process lives on the finite measure space ({x_m}, vol_m): a
 * pattern is a vector of per-cell counts, multiplicities allowed.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "haflab/kernels.hpp"
#include "haflab/rng.hpp"

namespace haflab {

struct FieldSample {
    ComplexVector values;
};

struct PointPattern {
    std::vector<int> counts;

    /// gamma(cells)
    [[nodiscard]] long long count(const CellSet& cells) const;
    [[nodiscard]] long long total() const;
};

/// A named value. std_error and n_samples are set exactly for Monte Carlo estimates.
struct MomentReport {
    std::string label;
    Complex value{};
    std::optional<double> std_error;
    std::optional<long long> n_samples;

    [[nodiscard]] bool is_estimate() const noexcept { return std_error.has_value(); }
};

/// Mean and standard error from `batches` equal contiguous batches (fewer if there are fewer values).
struct BatchEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
BatchEstimate batch_estimate(std::span<const double> values, int batches = 100);

/// Covariance of (Re G(x_1..x_M), Im G(x_1..x_M)) as a real 2M x 2M matrix.
/// Throws ModelError if an eigenvalue lies below -1e-8 * (largest |eigenvalue|).
Eigen::MatrixXd augmented_covariance(const GaussianFieldModel& model);

/// Precomputes a symmetric square root of the augmented covariance; draws are then a matrix-vector product.
class FieldSampler {
public:
    explicit FieldSampler(const GaussianFieldModel& model);

    [[nodiscard]] FieldSample draw(Rng& rng) const;
    [[nodiscard]] int cells() const noexcept { return cells_; }
    /// Real factor F with F F^T equal to the (clipped) augmented covariance.
    [[nodiscard]] const Eigen::MatrixXd& factor() const noexcept { return factor_; }

private:
    int cells_;
    Eigen::MatrixXd factor_;
};

FieldSample sample_field(const GaussianFieldModel& model, std::uint64_t seed);

/// G(x_m) = 2^{-1/2} (sum_j xi_j alpha(j,m) + i sum_j eta_j beta(j,m)), xi and eta standard normal.
FieldSample sample_field_direct(const ComplexMatrix& alpha, const ComplexMatrix& beta, std::uint64_t seed);
FieldSample draw_field_direct(const ComplexMatrix& alpha, const ComplexMatrix& beta, Rng& rng);

PointPattern sample_poisson(const IntensityProfile& profile, std::uint64_t seed);
PointPattern draw_poisson(const IntensityProfile& profile, Rng& rng);

PointPattern sample_cox(const GaussianFieldModel& model, std::uint64_t seed);
PointPattern draw_cox(const FieldSampler& sampler, const Grid& grid, Rng& rng);

/// Replicate r is drawn from stream(seed, r).
std::vector<PointPattern> sample_poisson_replicates(const IntensityProfile& profile, std::int64_t replicates,
                                                    std::uint64_t seed);
std::vector<PointPattern> sample_cox_replicates(const GaussianFieldModel& model, std::int64_t replicates,
                                                std::uint64_t seed);

/// Monte Carlo average of prod_i |G(x_{m_i})|^2, sample s drawn from stream(seed, s).
MomentReport field_moment_mc(const GaussianFieldModel& model, std::span<const int> points, std::int64_t n_samples,
                             std::uint64_t seed, int max_points = 4);

struct QuadratureOptions {
    /// Reject boxes that share a cell. Turn off for factorial moments, which sum over Delta^n.
    bool require_disjoint = true;
    int max_boxes = 4;
    std::uint64_t max_tuples = 2'000'000;
};

using TupleFunction = std::function<Complex(std::span<const int>)>;

/// sum over m_1 in boxes[0], ..., m_n in boxes[n-1] of f(m_1..m_n) * prod vol_{m_i}.
Complex quadrature(const Grid& grid, std::span<const CellSet> boxes, const TupleFunction& f,
                   const QuadratureOptions& options = {});

/// Quadrature of haf(block_kernel(m_1..m_n)). Equals E[prod gamma(Delta_i)] for disjoint boxes and
/// E[gamma(Delta)_n] (falling factorial) when every box is Delta.
MomentReport quadrature_haf_moment(const GaussianFieldModel& model, std::span<const CellSet> boxes,
                                   const QuadratureOptions& options = {});

/// Mean and standard error of prod_i gamma(Delta_i) over the patterns.
MomentReport empirical_product_moment(std::span<const PointPattern> patterns, std::span<const CellSet> boxes);

/// Mean and standard error of gamma(Delta)(gamma(Delta)-1)...(gamma(Delta)-n+1).
MomentReport empirical_factorial_moment(std::span<const PointPattern> patterns, const CellSet& box, int n);

/// Quantities for the moment growth bound on a repeated box.
struct GrowthBound {
    int order = 0;
    double intensity = 0.0;         // integral of ||L1||^2 over the box
    double moment = 0.0;            // E[gamma(Delta)_n], i.e. n! theta(Delta^n)
    double strict_bound = 0.0;      // (2 * intensity)^n
    double factorial_bound = 0.0;   // n! (2 * intensity)^n
};
GrowthBound growth_bound(const GaussianFieldModel& model, const CellSet& box, int order);

// Pattern dumps: header "replicate,cell_index,count", one row per nonzero count.
void write_patterns_csv(std::ostream& out, std::span<const PointPattern> patterns, std::int64_t first_replicate = 0);
void write_patterns_csv_header(std::ostream& out);
/// One JSON object per line: {"label", "value", "std_error", "n_samples"}; absent fields are null.
void write_report_jsonl(std::ostream& out, const MomentReport& report);

}  // namespace haflab
