// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "haflab/errors.hpp"
#include "haflab/matfun.hpp"

using namespace haflab;

namespace {

ComplexMatrix random_matrix(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

SymmetricMatrix random_symmetric(int n, std::mt19937_64& rng) {
    return SymmetricMatrix::from_upper(random_matrix(n, rng));
}

double rel(Complex a, Complex b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

// Literal definition: (1 / (n! 2^n)) * sum over all permutations of prod c(pi(2i), pi(2i+1)).
Complex hafnian_by_permutations(const ComplexMatrix& c) {
    const int dim = static_cast<int>(c.rows());
    std::vector<int> p(dim);
    std::iota(p.begin(), p.end(), 0);
    Complex total = 0.0;
    do {
        Complex prod = 1.0;
        for (int i = 0; i < dim; i += 2) prod *= c(p[i], p[i + 1]);
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    double norm = 1.0;
    for (int k = 2; k <= dim / 2; ++k) norm *= k;
    return total / (norm * std::pow(2.0, dim / 2));
}

Complex permanent_by_permutations(const ComplexMatrix& b) {
    const int n = static_cast<int>(b.rows());
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    Complex total = 0.0;
    do {
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= b(i, p[i]);
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

}  // namespace

TEST(SymmetricMatrix, RejectsAsymmetricInput) {
    ComplexMatrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    EXPECT_THROW(SymmetricMatrix{m}, DimensionError);
    EXPECT_THROW(SymmetricMatrix{ComplexMatrix(2, 3)}, DimensionError);
    const SymmetricMatrix s = SymmetricMatrix::from_upper(m);
    EXPECT_EQ(s(1, 0), Complex(2.0));
}

TEST(Hafnian, TwoByTwoPicksTheOffDiagonal) {
    ComplexMatrix m(2, 2);
    m << Complex(5, 1), Complex(0.5, -2), Complex(0.5, -2), Complex(-7, 3);
    const SymmetricMatrix c(m);
    EXPECT_EQ(hafnian_enum(c), Complex(0.5, -2));
    EXPECT_EQ(hafnian_dp(c), Complex(0.5, -2));
}

TEST(Hafnian, AllOnesFourByFour) {
    const SymmetricMatrix c(ComplexMatrix::Ones(4, 4));
    EXPECT_EQ(hafnian_enum(c), Complex(3.0));
    EXPECT_EQ(hafnian_dp(c), Complex(3.0));
}

TEST(Hafnian, EmptyMatrixIsOne) {
    const SymmetricMatrix c(ComplexMatrix(0, 0));
    EXPECT_EQ(hafnian_enum(c), Complex(1.0));
    EXPECT_EQ(hafnian_dp(c), Complex(1.0));
}

TEST(Hafnian, BlockDiagonalFactorizes) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    const Complex b1(2, 1), b2(-1, 3);
    m(0, 1) = m(1, 0) = b1;
    m(2, 3) = m(3, 2) = b2;
    m(0, 0) = 9.0;
    EXPECT_NEAR(std::abs(hafnian_dp(SymmetricMatrix(m)) - b1 * b2), 0.0, 1e-15);
}

TEST(Hafnian, FrozenSixBySixValue) {
    ComplexMatrix m(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = Complex(i + j + 1, (i * j) % 3);
    const Complex expected(2574.0, 828.0);
    EXPECT_LT(rel(hafnian_enum(SymmetricMatrix(m)), expected), 1e-14);
    EXPECT_LT(rel(hafnian_dp(SymmetricMatrix(m)), expected), 1e-14);
}

TEST(Hafnian, MatchesPermutationDefinition) {
    std::mt19937_64 rng(11);
    for (int dim : {2, 4, 6, 8}) {
        const SymmetricMatrix c = random_symmetric(dim, rng);
        const Complex expected = hafnian_by_permutations(c.entries());
        EXPECT_LT(rel(hafnian_enum(c), expected), 1e-12) << dim;
        EXPECT_LT(rel(hafnian_dp(c), expected), 1e-12) << dim;
    }
}

TEST(Hafnian, EnumAndDpAgreeOnRandomMatrices) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const SymmetricMatrix c = random_symmetric(12, rng);
        EXPECT_LT(rel(hafnian_enum(c), hafnian_dp(c)), 1e-10);
    }
    const SymmetricMatrix c8 = random_symmetric(8, rng);
    EXPECT_LT(rel(hafnian_enum(c8), hafnian_dp(c8)), 1e-10);
}

TEST(Hafnian, PairingCountMatchesTermsSummed) {
    std::mt19937_64 rng(5);
    for (int dim = 0; dim <= 12; dim += 2) {
        std::uint64_t terms = 0;
        hafnian_enum(random_symmetric(dim, rng), {}, &terms);
        EXPECT_EQ(terms, pairing_count(dim)) << dim;
    }
    EXPECT_EQ(pairing_count(16), 2027025u);
}

TEST(Hafnian, IgnoresTheDiagonal) {
    std::mt19937_64 rng(8);
    const SymmetricMatrix c = random_symmetric(8, rng);
    ComplexMatrix changed = c.entries();
    for (int i = 0; i < 8; ++i) changed(i, i) = Complex(100.0 * i, -3.0);
    const SymmetricMatrix d(changed);
    EXPECT_EQ(hafnian_enum(c), hafnian_enum(d));
    EXPECT_EQ(hafnian_dp(c), hafnian_dp(d));
}

TEST(Hafnian, InvariantUnderSimultaneousPermutation) {
    std::mt19937_64 rng(9);
    const SymmetricMatrix c = random_symmetric(10, rng);
    std::vector<int> p(10);
    std::iota(p.begin(), p.end(), 0);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(p.begin(), p.end(), rng);
        ComplexMatrix q(10, 10);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j) q(i, j) = c(p[i], p[j]);
        EXPECT_LT(rel(hafnian_dp(SymmetricMatrix(q)), hafnian_dp(c)), 1e-12);
    }
}

TEST(Hafnian, WorkerCountDoesNotChangeTheBits) {
    std::mt19937_64 rng(10);
    const SymmetricMatrix c = random_symmetric(12, rng);
    HafnianOptions one, four;
    four.workers = 4;
    EXPECT_EQ(hafnian_enum(c, one), hafnian_enum(c, four));
    EXPECT_EQ(hafnian(c, HafnianAlgorithm::enumerate, four), hafnian_enum(c, one));
}

TEST(Hafnian, DimensionAndCapacityErrors) {
    const SymmetricMatrix odd(ComplexMatrix::Ones(3, 3));
    EXPECT_THROW(hafnian_enum(odd), DimensionError);
    EXPECT_THROW(hafnian_dp(odd), DimensionError);
    std::mt19937_64 rng(1);
    const SymmetricMatrix big = random_symmetric(18, rng);
    EXPECT_THROW(hafnian_enum(big), CapacityError);
    HafnianOptions loose;
    loose.limits.hafnian_enum_max_dim = 4;
    EXPECT_THROW(hafnian_enum(random_symmetric(6, rng), loose), CapacityError);
    MatfunLimits tight;
    tight.hafnian_dp_max_dim = 4;
    EXPECT_THROW(hafnian_dp(random_symmetric(6, rng), tight), CapacityError);
}

TEST(Permanent, SmallCases) {
    EXPECT_EQ(permanent(ComplexMatrix::Identity(3, 3)), Complex(1.0));
    EXPECT_EQ(permanent(ComplexMatrix::Ones(2, 2)), Complex(2.0));
    EXPECT_EQ(permanent(ComplexMatrix(0, 0)), Complex(1.0));
}

TEST(Permanent, FrozenValueAndNaiveSum) {
    ComplexMatrix b(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) b(i, j) = Complex((i + 2 * j) % 5 - 2, ((i - j) % 3 + 3) % 3);
    EXPECT_LT(rel(permanent(b), Complex(-41, 72)), 1e-13);
    EXPECT_LT(rel(determinant(b), Complex(-365, -600)), 1e-13);
    EXPECT_LT(rel(alpha_det(b, 0.5), Complex(4, -21.5625)), 1e-13);

    std::mt19937_64 rng(3);
    for (int n = 1; n <= 8; ++n) {
        const ComplexMatrix m = random_matrix(n, rng);
        EXPECT_LT(rel(permanent(m), permanent_by_permutations(m)), 1e-11) << n;
    }
}

TEST(Permanent, CapacityError) {
    MatfunLimits tight;
    tight.permanent_max_dim = 3;
    EXPECT_THROW(permanent(ComplexMatrix::Ones(4, 4), tight), CapacityError);
    EXPECT_THROW(permanent(ComplexMatrix(2, 3)), DimensionError);
}

TEST(AlphaDet, TwoByTwoClosedForm) {
    ComplexMatrix b(2, 2);
    const Complex a(1, 2), bb(-3, 0.5), c(0.25, 4), d(2, -1);
    b << a, bb, c, d;
    for (double alpha : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        EXPECT_LT(std::abs(alpha_det(b, alpha) - (a * d + alpha * bb * c)), 1e-14) << alpha;
    }
}

TEST(AlphaDet, SpecialisesToPermanentAndDeterminant) {
    std::mt19937_64 rng(4);
    for (int n = 1; n <= 7; ++n) {
        const ComplexMatrix m = random_matrix(n, rng);
        EXPECT_LT(rel(alpha_det(m, 1.0), permanent(m)), 1e-10) << n;
        EXPECT_LT(rel(alpha_det(m, -1.0), determinant(m)), 1e-10) << n;
    }
}

TEST(AlphaDet, CapacityError) {
    EXPECT_THROW(alpha_det(ComplexMatrix::Ones(11, 11), 1.0), CapacityError);
}

TEST(Bench, ShapeOfTheTable) {
    const std::vector<int> sizes{8};
    const auto rows = bench_hafnian(sizes, 3);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].algorithm, "enum");
    EXPECT_EQ(rows[1].algorithm, "dp");
    for (const auto& r : rows) {
        EXPECT_EQ(r.size, 8);
        EXPECT_EQ(r.repetitions, 3);
        EXPECT_GT(r.median_seconds, 0.0);
    }
    EXPECT_TRUE(bench_hafnian(std::vector<int>{}, 3).empty());
}

TEST(Bench, SubsetRecursionWinsAtTwelve) {
    const std::vector<int> sizes{12};
    const auto rows = bench_hafnian(sizes, 3);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LT(rows[1].median_seconds, rows[0].median_seconds);
}

TEST(MatrixFile, RoundTrip) {
    std::mt19937_64 rng(6);
    const ComplexMatrix m = random_matrix(3, rng);
    std::stringstream s;
    write_matrix(s, m);
    const ComplexMatrix back = read_matrix(s);
    EXPECT_EQ(back, m);
}

TEST(MatrixFile, ParseErrors) {
    std::stringstream missing_row("2\n1,0 2,0\n");
    EXPECT_ANY_THROW(read_matrix(missing_row));
    std::stringstream bad_token("1\nfoo\n");
    EXPECT_THROW(read_matrix(bad_token), ConfigError);
    std::stringstream bad_dim("x\n");
    EXPECT_THROW(read_matrix(bad_dim), ConfigError);
    EXPECT_THROW(load_matrix("/nonexistent/file.txt"), ConfigError);
}
