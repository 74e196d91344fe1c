// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file matfun.hpp
 * @brief Exact matrix functions: hafnian, permanent, determinant, alpha-determinant.
 *
 * Two hafnian algorithms are provided so that each can serve as an oracle for
 * the other: plain enumeration of perfect pairings, and a memoized recursion
 * over index subsets. All arithmetic is double-precision complex.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace haflab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Square complex matrix with c(i,j) == c(j,i) exactly. Immutable after construction.
class SymmetricMatrix {
public:
    /// Throws DimensionError if `entries` is not square or not exactly symmetric.
    explicit SymmetricMatrix(ComplexMatrix entries);

    /// Builds the symmetric matrix from the upper triangle of `entries`.
    static SymmetricMatrix from_upper(const ComplexMatrix& entries);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(entries_.rows()); }
    [[nodiscard]] const ComplexMatrix& entries() const noexcept { return entries_; }
    [[nodiscard]] Complex operator()(int i, int j) const { return entries_(i, j); }

private:
    ComplexMatrix entries_;
};

/// Size caps for the exponential-time routines. These are settings, not hard limits of the code.
struct MatfunLimits {
    int hafnian_enum_max_dim = 16;
    int hafnian_dp_max_dim = 24;
    int permanent_max_dim = 20;
    int alpha_det_max_dim = 10;
};

struct HafnianOptions {
    MatfunLimits limits{};
    /// Worker threads for the top-level pairing branches of hafnian_enum.
    /// Branch sums are reduced in index order, so the result does not depend on this value.
    unsigned workers = 1;
};

enum class HafnianAlgorithm { enumerate, subset_dp };

/// Sum over all perfect pairings of {0..2n-1} of the product of paired entries.
/// Never reads the diagonal. If `terms` is given, it receives the number of pairings summed.
Complex hafnian_enum(const SymmetricMatrix& c, const HafnianOptions& options = {},
                     std::uint64_t* terms = nullptr);

/// haf(S) = sum_{j in S, j != min S} c(min S, j) * haf(S \ {min S, j}), memoized by bitmask.
Complex hafnian_dp(const SymmetricMatrix& c, const MatfunLimits& limits = {});

Complex hafnian(const SymmetricMatrix& c, HafnianAlgorithm algorithm = HafnianAlgorithm::subset_dp,
                const HafnianOptions& options = {});

/// Number of perfect pairings of 2n points, (2n)!/(n! 2^n). `dim` must be even.
std::uint64_t pairing_count(int dim);

/// Ryser inclusion-exclusion with Gray-code row-sum updates.
Complex permanent(const ComplexMatrix& b, const MatfunLimits& limits = {});

Complex determinant(const ComplexMatrix& b);

/// sum over permutations pi of alpha^(n - cycles(pi)) * prod_i b(i, pi(i)).
Complex alpha_det(const ComplexMatrix& b, double alpha, const MatfunLimits& limits = {});

struct BenchRow {
    std::string algorithm;  // "enum" or "dp"
    int size = 0;
    int repetitions = 0;
    double median_seconds = 0.0;
};

/// Times hafnian_enum and hafnian_dp on random complex symmetric matrices of each size.
std::vector<BenchRow> bench_hafnian(std::span<const int> sizes, int repetitions,
                                    std::uint64_t seed = 1, const MatfunLimits& limits = {});

// Plain-text matrix format: first line "dim", then one row per line of
// whitespace-separated "re,im" pairs.
ComplexMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const ComplexMatrix& m);
ComplexMatrix load_matrix(const std::filesystem::path& path);

}  // namespace haflab
