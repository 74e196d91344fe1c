// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fock.hpp
 * @brief Truncated symmetric Fock space in the occupation-number basis and the operators built on it.
 *
 * One-particle modes are the grid cells 0..M-1 followed by the feature modes
 * M..M+d-1. States are occupation vectors with total occupation <= N. Ladder
 * transitions that would leave this set are dropped, so operator identities are
 * exact only on the safe sub-basis (total <= N - degree of the expression).
 */

#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "haflab/kernels.hpp"

namespace haflab {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

class FockBasis {
public:
    FockBasis(int modes, int truncation);

    [[nodiscard]] int modes() const noexcept { return modes_; }
    [[nodiscard]] int truncation() const noexcept { return truncation_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(states_.size()); }
    [[nodiscard]] const std::vector<int>& state(int index) const { return states_.at(index); }
    [[nodiscard]] int total(int index) const { return totals_.at(index); }
    /// Index of an occupation vector, or -1 if it is outside the truncated basis.
    [[nodiscard]] int index_of(std::span<const int> occupation) const;
    /// Number of basis states with total occupation <= max_total.
    [[nodiscard]] int count_up_to(int max_total) const;

    /// a^+_j as a sparse matrix. a_j is its transpose.
    [[nodiscard]] const SparseMatrix& raising(int mode) const { return raising_.at(mode); }

    /// sum_{k=0}^{N} C(modes + k - 1, k)
    static long long expected_size(int modes, int truncation);

private:
    int modes_;
    int truncation_;
    std::vector<std::vector<int>> states_;  // ordered by total, then lexicographically descending
    std::vector<int> totals_;
    std::map<std::vector<int>, int> index_;
    std::vector<SparseMatrix> raising_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// Sparse operator on a truncated Fock basis. Value type; arithmetic requires a shared basis.
class FockOperator {
public:
    FockOperator(BasisPtr basis, SparseMatrix matrix);

    static FockOperator identity(BasisPtr basis);
    static FockOperator zero(BasisPtr basis);

    [[nodiscard]] const FockBasis& basis() const noexcept { return *basis_; }
    [[nodiscard]] const BasisPtr& basis_ptr() const noexcept { return basis_; }
    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return matrix_; }

    FockOperator operator+(const FockOperator& o) const;
    FockOperator operator-(const FockOperator& o) const;
    FockOperator operator*(const FockOperator& o) const;
    FockOperator operator*(Complex s) const;
    friend FockOperator operator*(Complex s, const FockOperator& op) { return op * s; }
    [[nodiscard]] FockOperator adjoint() const;

    [[nodiscard]] ComplexVector apply(const ComplexVector& v) const;
    /// <A Omega, Omega>
    [[nodiscard]] Complex vacuum_expectation() const;

    /// Frobenius norm of the columns whose state has total <= max_total (all rows kept).
    [[nodiscard]] double column_norm(int max_total) const;
    /// Frobenius norm of the block with both row and column totals <= max_total.
    [[nodiscard]] double block_norm(int max_total) const;
    /// Smallest and largest change of total occupation over the stored nonzeros; (0, 0) if empty.
    [[nodiscard]] std::pair<int, int> occupation_shift() const;
    /// Largest singular value of the map from the k-particle sector to the (k+shift)-particle sector.
    [[nodiscard]] double sector_norm(int k, int shift) const;

private:
    void require_same_basis(const FockOperator& o) const;

    BasisPtr basis_;
    SparseMatrix matrix_;
};

FockOperator commutator(const FockOperator& a, const FockOperator& b);

/// Vacuum state Omega as a coefficient vector.
ComplexVector vacuum(const FockBasis& basis);

/// a^+(g) = sum_j g_j a^+_j. Throws DimensionError if g has the wrong length.
FockOperator create(const BasisPtr& basis, const ComplexVector& g);
/// a^-(f) = sum_j f_j a_j, so [a^-(f), a^+(g)] = sum_j f_j g_j.
FockOperator annihilate(const BasisPtr& basis, const ComplexVector& f);
/// Diagonal operator counting the particles in the listed modes.
FockOperator neutral(const BasisPtr& basis, const CellSet& modes);

/**
 * Grid-indexed CCR representation: A^+(x_m), A^-(x_m) for every cell.
 *
 * - Cox: modes are M grid cells plus the d feature modes of the model,
 *     A^+(x_m) = a_1^+(e_m)/sqrt(vol_m) + a_2^+(J L2(x_m)) + a_2^-(J L1(x_m)),
 *     A^-(x_m) = a_1^-(e_m)/sqrt(vol_m) + a_2^+(L1(x_m)) + a_2^-(L2(x_m)).
 * - Poisson: grid modes only,
 *     A^+(x_m) = a^+(e_m)/sqrt(vol_m) + conj(lambda_m),  A^-(x_m) = a^-(e_m)/sqrt(vol_m) + lambda_m.
 */
class Representation {
public:
    static Representation cox(const GaussianFieldModel& model, int truncation);
    static Representation poisson(const IntensityProfile& profile, int truncation);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const BasisPtr& basis() const noexcept { return basis_; }
    [[nodiscard]] int truncation() const noexcept { return basis_->truncation(); }
    [[nodiscard]] bool is_poisson() const noexcept { return !model_; }

    [[nodiscard]] const FockOperator& A_plus(int m) const;
    [[nodiscard]] const FockOperator& A_minus(int m) const;

    /// Phi(x_m) = a_2^+(L1(x_m)) + a_2^-(L2(x_m)); Cox representation only.
    [[nodiscard]] FockOperator phi(int m) const;
    /// Psi(x_m) = a_2^+(J L2(x_m)) + a_2^-(J L1(x_m)); Cox representation only.
    [[nodiscard]] FockOperator psi(int m) const;

    /// rho(Delta) = sum_{m in Delta} vol_m A^+(x_m) A^-(x_m)
    [[nodiscard]] FockOperator rho(const CellSet& cells) const;

    /// B(h) = sum_m vol_m (h_m A^+(x_m) + conj(h_m) A^-(x_m))
    [[nodiscard]] FockOperator B(std::span<const Complex> h) const;

private:
    Representation(Grid grid, BasisPtr basis, std::shared_ptr<const GaussianFieldModel> model);

    Grid grid_;
    BasisPtr basis_;
    std::shared_ptr<const GaussianFieldModel> model_;
    std::vector<FockOperator> a_plus_, a_minus_;
};

/// Poisson case of rho(Delta) in closed form:
/// a^+(chi_Delta lambda) + a^-(chi_Delta conj lambda) + a^0(chi_Delta) + sum_{m in Delta} |lambda_m|^2 vol_m,
/// with the smeared ladder operators written in the cell basis (weights sqrt(vol_m)).
FockOperator poisson_rho_closed_form(const Representation& rep, const IntensityProfile& profile,
                                     const CellSet& cells);

struct WickLimits {
    int max_factors = 4;
};

/// :rho(Delta_1)...rho(Delta_n): by the recursion
///   :rho(D_1)...rho(D_{n+1}): = rho(D_{n+1}) :rho(D_1)...rho(D_n): - sum_i :...rho(D_i & D_{n+1})...:
/// Throws CapacityError if n exceeds the limit or the truncation is below 2n.
FockOperator wick(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits = {});

/// Same recursion applied to Omega; returns the vector :rho(D_1)...rho(D_n): Omega.
ComplexVector wick_vacuum(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits = {});

/// theta^(n)(D_1 x ... x D_n) = tau(:rho(D_1)...rho(D_n):) / n!
Complex theta(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits = {});

/// tau(rho(D_order[0]) ... rho(D_order[n-1])); an empty order means 0..n-1.
Complex moment(const Representation& rep, std::span<const CellSet> boxes, std::span<const int> order = {},
               const WickLimits& limits = {});

/// T^(1)(h) = tau(B(h)) for a single function; for k >= 2, tau of the product of centered B(h_i) - T^(1)(h_i).
/// Requires truncation >= k.
Complex quasifree_T(const Representation& rep, std::span<const ComplexVector> h);

/// <Psi(x_n)...Psi(x_1) Phi(x_1)...Phi(x_n) Omega, Omega>
Complex gaussian_bridge(const Representation& rep, std::span<const int> points);

/// Residuals and two-point values for a Bogoliubov pair K1, K2 : C^h -> C^e.
struct BogoliubovReport {
    double symmetry_residual = 0.0;  // || K2^T K1 - K1^T K2 ||
    double norm_residual = 0.0;      // || K2^* K2 - K1^* K1 - 1 ||
    bool conditions_pass = false;
    /// Each entry: closed form ((K1 + J K2) f, (K1 + J K2) h) against tau(B(f) B(h)).
    struct TwoPoint {
        Complex closed_form;
        Complex fock;
    };
    std::vector<TwoPoint> two_point;
};

/**
 * Representation on F(C^e): A^+(h) = a^+(K2 h) + a^-(K1 h), A^-(h) = a^-(conj(K2) h) + a^+(conj(K1) h),
 * B(h) = A^+(h) + A^-(J h). The two-point values are computed for every ordered pair of `tests`
 * when both residuals are below `tolerance`.
 */
BogoliubovReport bogoliubov_check(const ComplexMatrix& k1, const ComplexMatrix& k2,
                                  std::span<const ComplexVector> tests, int truncation = 2,
                                  double tolerance = 1e-10);

}  // namespace haflab
