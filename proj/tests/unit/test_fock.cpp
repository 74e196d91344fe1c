// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "haflab/errors.hpp"
#include "haflab/fock.hpp"
#include "haflab/matfun.hpp"
#include "haflab/sampling.hpp"

using namespace haflab;

namespace {

BasisPtr make_basis(int modes, int truncation) { return std::make_shared<const FockBasis>(modes, truncation); }

ComplexVector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
    return v;
}

GaussianFieldModel zero_model(int cells) {
    const ComplexMatrix z = ComplexMatrix::Zero(2, cells);
    return GaussianFieldModel::from_features(Grid::uniform(0, 1, cells), z, z);
}

std::span<const Complex> as_span(const ComplexVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST(FockBasis, SizeAndOrdering) {
    EXPECT_EQ(FockBasis::expected_size(3, 2), 10);
    EXPECT_EQ(FockBasis::expected_size(6, 6), 924);
    for (int modes : {1, 2, 5})
        for (int n : {0, 1, 3, 4}) EXPECT_EQ(FockBasis(modes, n).size(), FockBasis::expected_size(modes, n));

    const FockBasis b(3, 2);
    EXPECT_EQ(b.state(0), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(b.state(1), (std::vector<int>{1, 0, 0}));
    EXPECT_EQ(b.state(4), (std::vector<int>{2, 0, 0}));
    EXPECT_EQ(b.count_up_to(1), 4);
    for (int i = 0; i < b.size(); ++i) EXPECT_EQ(b.index_of(b.state(i)), i);
    const std::vector<int> outside{1, 1, 1};
    EXPECT_EQ(b.index_of(outside), -1);
    EXPECT_THROW(FockBasis(40, 6), CapacityError);
    EXPECT_THROW(FockBasis(-1, 2), DimensionError);
}

TEST(Ladder, CreationOnVacuum) {
    const auto basis = make_basis(3, 2);
    ComplexVector e1 = ComplexVector::Zero(3);
    e1[1] = 1.0;
    const ComplexVector v = create(basis, e1).apply(vacuum(*basis));
    const std::vector<int> one{0, 1, 0};
    ComplexVector expected = ComplexVector::Zero(basis->size());
    expected[basis->index_of(one)] = 1.0;
    EXPECT_EQ(v, expected);
    EXPECT_EQ(annihilate(basis, e1).apply(vacuum(*basis)).norm(), 0.0);

    // a^+_0 a^+_0 Omega = sqrt(2) |2,0,0>
    ComplexVector e0 = ComplexVector::Zero(3);
    e0[0] = 1.0;
    const FockOperator up = create(basis, e0);
    const std::vector<int> two{2, 0, 0};
    EXPECT_NEAR(std::abs(up.apply(up.apply(vacuum(*basis)))[basis->index_of(two)] - std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Ladder, AdjointAndSectorNorms) {
    std::mt19937_64 rng(5);
    const auto basis = make_basis(3, 4);
    const ComplexVector g = random_vector(3, rng);
    const FockOperator c = create(basis, g);
    EXPECT_EQ((c.adjoint() - annihilate(basis, g.conjugate())).matrix().norm(), 0.0);
    EXPECT_EQ(c.occupation_shift(), std::make_pair(1, 1));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(c.sector_norm(k, 1), std::sqrt(k + 1.0) * g.norm(), 1e-12);
}

TEST(Ladder, CanonicalCommutationRelations) {
    std::mt19937_64 rng(6);
    const int n = 4;
    const auto basis = make_basis(3, n);
    const FockOperator id = FockOperator::identity(basis);
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexVector f = random_vector(3, rng), g = random_vector(3, rng);
        const FockOperator ccr = commutator(annihilate(basis, f), create(basis, g));
        const Complex expected = (f.array() * g.array()).sum();
        EXPECT_LT((ccr - id * expected).column_norm(n - 1), 1e-12);
        EXPECT_LT(commutator(create(basis, f), create(basis, g)).column_norm(n - 2), 1e-12);
        EXPECT_LT(commutator(annihilate(basis, f), annihilate(basis, g)).matrix().norm(), 1e-12);
    }
}

TEST(Ladder, NeutralCountsOccupation) {
    const auto basis = make_basis(3, 3);
    const FockOperator n02 = neutral(basis, CellSet{0, 2});
    for (int i = 0; i < basis->size(); ++i) {
        ComplexVector e = ComplexVector::Zero(basis->size());
        e[i] = 1.0;
        const auto& s = basis->state(i);
        EXPECT_EQ(n02.apply(e), e * Complex(s[0] + s[2]));
    }
}

TEST(Representation, ZeroModelHasPureGridLadders) {
    const auto model = zero_model(3);
    const auto rep = Representation::cox(model, 2);
    const double v = model.grid().volume(0);
    ComplexVector e = ComplexVector::Zero(rep.basis()->modes());
    e[1] = 1.0;
    EXPECT_LT((rep.A_plus(1) - create(rep.basis(), e) * (1.0 / std::sqrt(v))).matrix().norm(), 1e-15);
    EXPECT_LT((rep.rho(CellSet{0, 2}) - neutral(rep.basis(), CellSet{0, 2})).matrix().norm(), 1e-14);
}

TEST(Representation, AdjointsAndCommutationOfA) {
    for (const auto& name : builtin_model_names()) {
        const auto model = builtin_model(name, Grid::uniform(0, 1, 3));
        const int n = 3;
        const auto rep = Representation::cox(model, n);
        const FockOperator id = FockOperator::identity(rep.basis());
        for (int m = 0; m < 3; ++m) {
            EXPECT_LT((rep.A_plus(m).adjoint() - rep.A_minus(m)).matrix().norm(), 1e-15) << name;
            for (int k = 0; k < 3; ++k) {
                const double delta = m == k ? 1.0 / model.grid().volume(m) : 0.0;
                const FockOperator c = commutator(rep.A_minus(m), rep.A_plus(k)) - id * delta;
                EXPECT_LT(c.column_norm(n - 1), 1e-12) << name;
                EXPECT_LT(commutator(rep.A_plus(m), rep.A_plus(k)).column_norm(n - 1), 1e-12) << name;
            }
        }
    }
}

TEST(Representation, PhiPsiRequireCox) {
    const auto rep = Representation::poisson(IntensityProfile::constant(Grid::uniform(0, 1, 2), 1.0), 2);
    EXPECT_TRUE(rep.is_poisson());
    EXPECT_THROW(rep.phi(0), PreconditionError);
    EXPECT_THROW(rep.psi(0), PreconditionError);
}

TEST(Representation, GaussianBridgeMatchesHafnian) {
    for (const auto& name : builtin_model_names()) {
        const auto model = builtin_model(name, Grid::uniform(0, 1, 3));
        const auto rep = Representation::cox(model, 3);
        for (const std::vector<int>& pts : {std::vector<int>{1}, std::vector<int>{0, 2}, std::vector<int>{0, 0, 2}}) {
            const Complex h = hafnian_dp(block_kernel(model, pts));
            EXPECT_LT(std::abs(gaussian_bridge(rep, pts) - h), 1e-12 * (1 + std::abs(h))) << name;
        }
        const std::vector<int> four{0, 1, 2, 0};
        EXPECT_THROW(gaussian_bridge(rep, four), CapacityError);
    }
}

TEST(Rho, HermitianAndCommuting) {
    const int n = 4;
    for (const auto& name : builtin_model_names()) {
        const auto rep = Representation::cox(builtin_model(name, Grid::uniform(0, 1, 3)), n);
        const CellSet a{0, 1}, b{1, 2}, c{2};
        for (const CellSet* box : {&a, &b, &c}) {
            const FockOperator r = rep.rho(*box);
            EXPECT_LT((r - r.adjoint()).block_norm(n - 2), 1e-13) << name;
        }
        EXPECT_LT(commutator(rep.rho(a), rep.rho(b)).column_norm(n - 4), 1e-10) << name;
        EXPECT_LT(commutator(rep.rho(a), rep.rho(c)).column_norm(n - 4), 1e-10) << name;
    }
}

TEST(Rho, PoissonClosedForm) {
    const Grid g = Grid::uniform(0, 2, 3);
    const IntensityProfile profile(g, {Complex(1.0, 0.5), Complex(0.0, -2.0), Complex(0.3, 0.0)});
    const auto rep = Representation::poisson(profile, 3);
    for (const CellSet& box : {CellSet{0}, CellSet{1, 2}, CellSet{0, 1, 2}}) {
        const FockOperator diff = rep.rho(box) - poisson_rho_closed_form(rep, profile, box);
        EXPECT_LT(diff.column_norm(2), 1e-13);
        EXPECT_NEAR(rep.rho(box).vacuum_expectation().real(), profile.mass(box), 1e-13);
    }
}

TEST(Wick, FirstOrderIsTheIntensity) {
    const auto model = builtin_model("alpha-beta-demo", Grid::uniform(0, 1, 4));
    const auto rep = Representation::cox(model, 2);
    const std::vector<CellSet> one{{1, 3}};
    EXPECT_NEAR(theta(rep, one).real(), intensity_integral(model, one[0]), 1e-13);
    EXPECT_NEAR(theta(rep, one).imag(), 0.0, 1e-14);
}

TEST(Wick, PoissonFactorizes) {
    const Grid g = Grid::uniform(0, 1, 4);
    const IntensityProfile profile(g, {Complex(1, 1), 2.0, Complex(0, -0.5), 0.7});
    const auto rep = Representation::poisson(profile, 6);
    const std::vector<CellSet> boxes{{0}, {1, 2}, {0, 3}};
    const double expected = profile.mass(boxes[0]) * profile.mass(boxes[1]) * profile.mass(boxes[2]) / 6.0;
    EXPECT_NEAR(theta(rep, boxes).real(), expected, 1e-12);
    EXPECT_NEAR(theta(rep, boxes).imag(), 0.0, 1e-12);
}

TEST(Wick, CoxThetaMatchesQuadrature) {
    for (const auto& name : builtin_model_names()) {
        const auto model = builtin_model(name, Grid::uniform(0, 1, 4));
        const auto rep = Representation::cox(model, 6);
        QuadratureOptions any;
        any.require_disjoint = false;
        const std::vector<std::vector<CellSet>> cases{
            {{0, 1}}, {{0}, {2, 3}}, {{0, 1}, {0, 1}}, {{0}, {1}, {2, 3}}, {{1, 2}, {1, 2}, {1, 2}}};
        for (const auto& boxes : cases) {
            const double fact = std::tgamma(static_cast<double>(boxes.size()) + 1.0);
            const Complex q = quadrature_haf_moment(model, boxes, any).value;
            EXPECT_LT(std::abs(fact * theta(rep, boxes) - q), 1e-9 * (1 + std::abs(q))) << name;
        }
    }
}

TEST(Wick, DisjointMomentsAndOrdering) {
    const auto model = builtin_model("proper-fourier", Grid::uniform(0, 1, 4));
    const auto rep = Representation::cox(model, 6);
    const std::vector<CellSet> boxes{{0}, {1, 2}, {3}};
    const Complex m = moment(rep, boxes);
    EXPECT_LT(std::abs(m - quadrature_haf_moment(model, boxes).value), 1e-10);
    // Products of disjoint boxes have no diagonal terms: the moment equals 3! theta.
    EXPECT_LT(std::abs(m - 6.0 * theta(rep, boxes)), 1e-10);
    for (const std::vector<int>& order : {std::vector<int>{2, 1, 0}, std::vector<int>{1, 0, 2}}) {
        EXPECT_LT(std::abs(moment(rep, boxes, order) - m), 1e-10);
    }
    const std::vector<int> bad{0, 0, 1};
    EXPECT_THROW(moment(rep, boxes, bad), PreconditionError);
}

TEST(Wick, OverlappingMomentIncludesDiagonal) {
    const auto model = builtin_model("real-gauss", Grid::uniform(0, 1, 3));
    const auto rep = Representation::cox(model, 4);
    const CellSet box{0, 1};
    const std::vector<CellSet> twice{box, box}, once{box};
    // E[gamma^2] = E[gamma(gamma - 1)] + E[gamma]
    EXPECT_LT(std::abs(moment(rep, twice) - (2.0 * theta(rep, twice) + theta(rep, once))), 1e-12);
}

TEST(Wick, TruncationIsSufficient) {
    const auto model = builtin_model("alpha-beta-demo", Grid::uniform(0, 1, 3));
    const std::vector<CellSet> boxes{{0}, {1, 2}};
    const Complex low = theta(Representation::cox(model, 4), boxes);
    const Complex high = theta(Representation::cox(model, 6), boxes);
    EXPECT_LT(std::abs(low - high), 1e-13);
}

TEST(Wick, CapacityAndEmptyBoxes) {
    const auto model = builtin_model("real-gauss", Grid::uniform(0, 1, 2));
    const auto rep = Representation::cox(model, 3);
    const std::vector<CellSet> two{{0}, {1}};
    EXPECT_THROW(theta(rep, two), CapacityError);
    const auto big = Representation::cox(model, 10);
    const std::vector<CellSet> five{{0}, {1}, {0}, {1}, {0}};
    EXPECT_THROW(theta(big, five), CapacityError);
    const std::vector<CellSet> with_empty{{0}, {}};
    EXPECT_EQ(theta(Representation::cox(model, 4), with_empty), Complex(0.0));
}

TEST(QuasiFree, PoissonMeanAndCovariance) {
    const Grid g = Grid::uniform(0, 1, 3);
    const IntensityProfile profile(g, {Complex(1, 1), 0.5, Complex(0, 2)});
    const auto rep = Representation::poisson(profile, 4);
    ComplexVector f(3), h(3);
    f << Complex(1, 0), Complex(0, 1), Complex(-1, 0.5);
    h << Complex(0.3, -0.2), Complex(1, 1), Complex(0, -1);
    Complex mean = 0.0, cov = 0.0;
    for (int m = 0; m < 3; ++m) {
        const double v = g.volume(m);
        mean += v * (f[m] * std::conj(profile.lambda(m)) + std::conj(f[m]) * profile.lambda(m));
        cov += v * std::conj(f[m]) * h[m];
    }
    const std::vector<ComplexVector> one{f}, two{f, h};
    EXPECT_LT(std::abs(quasifree_T(rep, one) - mean), 1e-13);
    EXPECT_LT(std::abs(quasifree_T(rep, two) - cov), 1e-13);
}

TEST(QuasiFree, OddVanishesAndFourFactorizes) {
    std::mt19937_64 rng(8);
    for (const auto& name : builtin_model_names()) {
        const auto rep = Representation::cox(builtin_model(name, Grid::uniform(0, 1, 3)), 4);
        std::vector<ComplexVector> h;
        for (int i = 0; i < 4; ++i) h.push_back(random_vector(3, rng));
        const std::vector<ComplexVector> one{h[0]}, three{h[0], h[1], h[2]};
        EXPECT_LT(std::abs(quasifree_T(rep, one)), 1e-13) << name;
        EXPECT_LT(std::abs(quasifree_T(rep, three)), 1e-12) << name;
        auto t2 = [&](int i, int j) { return quasifree_T(rep, std::vector<ComplexVector>{h[i], h[j]}); };
        const Complex pairs = t2(0, 1) * t2(2, 3) + t2(0, 2) * t2(1, 3) + t2(0, 3) * t2(1, 2);
        EXPECT_LT(std::abs(quasifree_T(rep, h) - pairs), 1e-9 * (1 + std::abs(pairs))) << name;
    }
    const auto small = Representation::cox(builtin_model("real-gauss", Grid::uniform(0, 1, 2)), 2);
    const std::vector<ComplexVector> three(3, ComplexVector::Ones(2));
    EXPECT_THROW(quasifree_T(small, three), CapacityError);
}

TEST(QuasiFree, FieldCommutator) {
    std::mt19937_64 rng(9);
    const int n = 4;
    for (const auto& name : builtin_model_names()) {
        const auto model = builtin_model(name, Grid::uniform(0, 1, 3));
        const auto rep = Representation::cox(model, n);
        const FockOperator id = FockOperator::identity(rep.basis());
        const ComplexVector f = random_vector(3, rng), h = random_vector(3, rng);
        Complex hf = 0.0;
        for (int m = 0; m < 3; ++m) hf += model.grid().volume(m) * h[m] * std::conj(f[m]);
        const FockOperator c = commutator(rep.B(as_span(f)), rep.B(as_span(h))) - id * Complex(0.0, 2.0 * hf.imag());
        EXPECT_LT(c.column_norm(n - 2), 1e-12) << name;
    }
}

TEST(Bogoliubov, FreeField) {
    const ComplexMatrix k1 = ComplexMatrix::Zero(2, 2), k2 = ComplexMatrix::Identity(2, 2);
    std::vector<ComplexVector> tests(2, ComplexVector(2));
    tests[0] << Complex(1, 0), Complex(0, 1);
    tests[1] << Complex(0.5, -1), Complex(2, 0);
    const auto r = bogoliubov_check(k1, k2, tests);
    ASSERT_TRUE(r.conditions_pass);
    ASSERT_EQ(r.two_point.size(), 4U);
    for (const auto& tp : r.two_point) EXPECT_LT(std::abs(tp.closed_form - tp.fock), 1e-14);
    // Free field: the value for the pair (f, g) is sum_j conj(f_j) g_j.
    EXPECT_LT(std::abs(r.two_point[1].closed_form - tests[0].dot(tests[1])), 1e-14);
}

TEST(Bogoliubov, SqueezedPairFromRealSymmetricK1) {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = 0.4 * g(rng);
    const Eigen::MatrixXd k1 = 0.5 * (a + a.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd::Identity(3, 3) + k1 * k1);
    const Eigen::MatrixXd k2 = es.operatorSqrt();
    std::vector<ComplexVector> tests;
    for (int i = 0; i < 3; ++i) tests.push_back(random_vector(3, rng));
    const auto r = bogoliubov_check(k1.cast<Complex>(), k2.cast<Complex>(), tests, 2);
    ASSERT_TRUE(r.conditions_pass);
    for (const auto& tp : r.two_point) EXPECT_LT(std::abs(tp.closed_form - tp.fock), 1e-12);
}

TEST(Bogoliubov, ViolatedConditions) {
    const ComplexMatrix k1 = ComplexMatrix::Identity(2, 2), k2 = ComplexMatrix::Identity(2, 2);
    const std::vector<ComplexVector> tests{ComplexVector::Ones(2)};
    const auto r = bogoliubov_check(k1, k2, tests);
    EXPECT_FALSE(r.conditions_pass);
    EXPECT_NEAR(r.norm_residual, std::sqrt(2.0), 1e-14);
    EXPECT_TRUE(r.two_point.empty());
    EXPECT_THROW(bogoliubov_check(k1, ComplexMatrix::Identity(3, 2), tests), DimensionError);
}
