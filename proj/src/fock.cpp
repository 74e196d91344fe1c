// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/SVD>

#include "haflab/errors.hpp"

namespace haflab {

namespace {

using Triplet = Eigen::Triplet<Complex>;

// Appends every occupation vector of `modes` entries summing to `total`, first entry largest first.
void compositions(int modes, int total, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    const auto pos = static_cast<int>(current.size());
    if (pos == modes - 1) {
        current.push_back(total);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int n = total; n >= 0; --n) {
        current.push_back(n);
        compositions(modes, total - n, current, out);
        current.pop_back();
    }
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

FockBasis::FockBasis(int modes, int truncation) : modes_(modes), truncation_(truncation) {
    if (modes < 0) throw DimensionError("Fock basis needs a nonnegative number of modes");
    if (truncation < 0) throw DimensionError("Fock truncation must be nonnegative");
    if (expected_size(modes, truncation) > 2'000'000) {
        throw CapacityError("Fock basis with " + std::to_string(modes) + " modes and truncation " +
                            std::to_string(truncation) + " is too large");
    }
    states_.push_back(std::vector<int>(modes, 0));
    if (modes > 0) {
        for (int k = 1; k <= truncation; ++k) {
            std::vector<int> current;
            compositions(modes, k, current, states_);
        }
    }
    totals_.reserve(states_.size());
    for (int i = 0; i < size(); ++i) {
        totals_.push_back(std::accumulate(states_[i].begin(), states_[i].end(), 0));
        index_.emplace(states_[i], i);
    }

    raising_.reserve(modes);
    for (int j = 0; j < modes; ++j) {
        std::vector<Triplet> trips;
        std::vector<int> target;
        for (int i = 0; i < size(); ++i) {
            if (totals_[i] >= truncation) continue;
            target = states_[i];
            const int n = target[j]++;
            trips.emplace_back(index_.at(target), i, std::sqrt(static_cast<double>(n + 1)));
        }
        SparseMatrix m(size(), size());
        m.setFromTriplets(trips.begin(), trips.end());
        raising_.push_back(std::move(m));
    }
}

int FockBasis::index_of(std::span<const int> occupation) const {
    const auto it = index_.find(std::vector<int>(occupation.begin(), occupation.end()));
    return it == index_.end() ? -1 : it->second;
}

int FockBasis::count_up_to(int max_total) const {
    // States are ordered by total occupation.
    return static_cast<int>(std::upper_bound(totals_.begin(), totals_.end(), max_total) - totals_.begin());
}

long long FockBasis::expected_size(int modes, int truncation) {
    if (modes == 0) return 1;
    long long total = 0;
    for (int k = 0; k <= truncation; ++k) total += binomial(modes + k - 1, k);
    return total;
}

FockOperator::FockOperator(BasisPtr basis, SparseMatrix matrix) : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != basis_->size() || matrix_.cols() != basis_->size()) {
        throw DimensionError("operator matrix does not match the Fock basis size");
    }
}

FockOperator FockOperator::identity(BasisPtr basis) {
    SparseMatrix id(basis->size(), basis->size());
    id.setIdentity();
    return FockOperator(std::move(basis), std::move(id));
}

FockOperator FockOperator::zero(BasisPtr basis) {
    const int n = basis->size();
    return FockOperator(std::move(basis), SparseMatrix(n, n));
}

void FockOperator::require_same_basis(const FockOperator& o) const {
    if (basis_ != o.basis_) throw DimensionError("operators live on different Fock bases");
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
    require_same_basis(o);
    return FockOperator(basis_, matrix_ + o.matrix_);
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
    require_same_basis(o);
    return FockOperator(basis_, matrix_ - o.matrix_);
}

FockOperator FockOperator::operator*(const FockOperator& o) const {
    require_same_basis(o);
    SparseMatrix prod = matrix_ * o.matrix_;
    return FockOperator(basis_, std::move(prod));
}

FockOperator FockOperator::operator*(Complex s) const {
    return FockOperator(basis_, matrix_ * s);
}

FockOperator FockOperator::adjoint() const {
    return FockOperator(basis_, SparseMatrix(matrix_.adjoint()));
}

ComplexVector FockOperator::apply(const ComplexVector& v) const {
    if (v.size() != basis_->size()) throw DimensionError("vector does not match the Fock basis size");
    return matrix_ * v;
}

Complex FockOperator::vacuum_expectation() const {
    return matrix_.coeff(0, 0);
}

double FockOperator::column_norm(int max_total) const {
    const int cols = basis_->count_up_to(max_total);
    double ss = 0.0;
    for (int k = 0; k < cols; ++k)
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) ss += std::norm(it.value());
    return std::sqrt(ss);
}

double FockOperator::block_norm(int max_total) const {
    const int lim = basis_->count_up_to(max_total);
    double ss = 0.0;
    for (int k = 0; k < lim; ++k)
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
            if (it.row() < lim) ss += std::norm(it.value());
    return std::sqrt(ss);
}

std::pair<int, int> FockOperator::occupation_shift() const {
    int lo = 0, hi = 0;
    bool any = false;
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
            if (it.value() == Complex(0.0)) continue;
            const int shift = basis_->total(static_cast<int>(it.row())) - basis_->total(static_cast<int>(it.col()));
            lo = any ? std::min(lo, shift) : shift;
            hi = any ? std::max(hi, shift) : shift;
            any = true;
        }
    }
    return {lo, hi};
}

double FockOperator::sector_norm(int k, int shift) const {
    std::vector<int> rows, cols;
    for (int i = 0; i < basis_->size(); ++i) {
        if (basis_->total(i) == k) cols.push_back(i);
        if (basis_->total(i) == k + shift) rows.push_back(i);
    }
    if (rows.empty() || cols.empty()) return 0.0;
    const ComplexMatrix dense(matrix_);
    ComplexMatrix block(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) block(r, c) = dense(rows[r], cols[c]);
    Eigen::JacobiSVD<ComplexMatrix> svd(block);
    return svd.singularValues()(0);
}

FockOperator commutator(const FockOperator& a, const FockOperator& b) {
    return a * b - b * a;
}

ComplexVector vacuum(const FockBasis& basis) {
    ComplexVector v = ComplexVector::Zero(basis.size());
    v[0] = 1.0;
    return v;
}

namespace {

void check_length(const FockBasis& basis, const ComplexVector& g) {
    if (g.size() != basis.modes()) {
        throw DimensionError("one-particle vector has length " + std::to_string(g.size()) + ", expected " +
                             std::to_string(basis.modes()));
    }
}

}  // namespace

FockOperator create(const BasisPtr& basis, const ComplexVector& g) {
    check_length(*basis, g);
    SparseMatrix m(basis->size(), basis->size());
    for (int j = 0; j < basis->modes(); ++j)
        if (g[j] != Complex(0.0)) m += g[j] * basis->raising(j);
    return FockOperator(basis, std::move(m));
}

FockOperator annihilate(const BasisPtr& basis, const ComplexVector& f) {
    check_length(*basis, f);
    SparseMatrix m(basis->size(), basis->size());
    for (int j = 0; j < basis->modes(); ++j)
        if (f[j] != Complex(0.0)) m += f[j] * SparseMatrix(basis->raising(j).transpose());
    return FockOperator(basis, std::move(m));
}

FockOperator neutral(const BasisPtr& basis, const CellSet& modes) {
    for (int j : modes) {
        if (j < 0 || j >= basis->modes()) throw RangeError("mode index " + std::to_string(j) + " out of range");
    }
    std::vector<Triplet> trips;
    for (int i = 0; i < basis->size(); ++i) {
        int n = 0;
        for (int j : modes) n += basis->state(i)[j];
        if (n != 0) trips.emplace_back(i, i, static_cast<double>(n));
    }
    SparseMatrix m(basis->size(), basis->size());
    m.setFromTriplets(trips.begin(), trips.end());
    return FockOperator(basis, std::move(m));
}

Representation::Representation(Grid grid, BasisPtr basis, std::shared_ptr<const GaussianFieldModel> model)
    : grid_(std::move(grid)), basis_(std::move(basis)), model_(std::move(model)) {}

namespace {

// Embeds a feature vector into the one-particle space C^M (+) C^d.
ComplexVector feature_vector(int cells, const ComplexVector& features) {
    ComplexVector v = ComplexVector::Zero(cells + features.size());
    v.tail(features.size()) = features;
    return v;
}

ComplexVector cell_vector(int modes, int m, double weight) {
    ComplexVector v = ComplexVector::Zero(modes);
    v[m] = weight;
    return v;
}

}  // namespace

Representation Representation::cox(const GaussianFieldModel& model, int truncation) {
    const int cells = model.cells();
    auto basis = std::make_shared<const FockBasis>(cells + model.feature_dim(), truncation);
    Representation rep(model.grid(), basis, std::make_shared<const GaussianFieldModel>(model));
    for (int m = 0; m < cells; ++m) {
        const ComplexVector e = cell_vector(basis->modes(), m, 1.0 / std::sqrt(model.grid().volume(m)));
        const ComplexVector l1 = feature_vector(cells, model.L1().col(m));
        const ComplexVector l2 = feature_vector(cells, model.L2().col(m));
        rep.a_plus_.push_back(create(basis, e) + create(basis, l2.conjugate()) + annihilate(basis, l1.conjugate()));
        rep.a_minus_.push_back(annihilate(basis, e) + create(basis, l1) + annihilate(basis, l2));
    }
    return rep;
}

Representation Representation::poisson(const IntensityProfile& profile, int truncation) {
    const int cells = profile.cells();
    auto basis = std::make_shared<const FockBasis>(cells, truncation);
    Representation rep(profile.grid(), basis, nullptr);
    const FockOperator id = FockOperator::identity(basis);
    for (int m = 0; m < cells; ++m) {
        const ComplexVector e = cell_vector(cells, m, 1.0 / std::sqrt(profile.grid().volume(m)));
        const Complex lambda = profile.lambda(m);
        rep.a_plus_.push_back(create(basis, e) + id * std::conj(lambda));
        rep.a_minus_.push_back(annihilate(basis, e) + id * lambda);
    }
    return rep;
}

const FockOperator& Representation::A_plus(int m) const {
    grid_.check_cells(std::span<const int>(&m, 1));
    return a_plus_[m];
}

const FockOperator& Representation::A_minus(int m) const {
    grid_.check_cells(std::span<const int>(&m, 1));
    return a_minus_[m];
}

FockOperator Representation::phi(int m) const {
    if (!model_) throw PreconditionError("phi is defined for the Cox representation only");
    grid_.check_cells(std::span<const int>(&m, 1));
    const int cells = grid_.cells();
    return create(basis_, feature_vector(cells, model_->L1().col(m))) +
           annihilate(basis_, feature_vector(cells, model_->L2().col(m)));
}

FockOperator Representation::psi(int m) const {
    if (!model_) throw PreconditionError("psi is defined for the Cox representation only");
    grid_.check_cells(std::span<const int>(&m, 1));
    const int cells = grid_.cells();
    return create(basis_, feature_vector(cells, model_->L2().col(m).conjugate())) +
           annihilate(basis_, feature_vector(cells, model_->L1().col(m).conjugate()));
}

FockOperator Representation::rho(const CellSet& cells) const {
    grid_.check_cells(cells);
    FockOperator out = FockOperator::zero(basis_);
    for (int m : cells) out = out + (a_plus_[m] * a_minus_[m]) * Complex(grid_.volume(m));
    return out;
}

FockOperator Representation::B(std::span<const Complex> h) const {
    if (static_cast<int>(h.size()) != grid_.cells()) {
        throw DimensionError("test function must have one value per grid cell");
    }
    FockOperator out = FockOperator::zero(basis_);
    for (int m = 0; m < grid_.cells(); ++m) {
        const double v = grid_.volume(m);
        out = out + a_plus_[m] * (v * h[m]) + a_minus_[m] * (v * std::conj(h[m]));
    }
    return out;
}

FockOperator poisson_rho_closed_form(const Representation& rep, const IntensityProfile& profile,
                                     const CellSet& cells) {
    if (!rep.is_poisson()) throw PreconditionError("closed form applies to the Poisson representation");
    const Grid& grid = rep.grid();
    grid.check_cells(cells);
    const int modes = rep.basis()->modes();
    ComplexVector up = ComplexVector::Zero(modes), down = ComplexVector::Zero(modes);
    double mass = 0.0;
    for (int m : cells) {
        const double v = grid.volume(m);
        up[m] = profile.lambda(m) * std::sqrt(v);
        down[m] = std::conj(profile.lambda(m)) * std::sqrt(v);
        mass += std::norm(profile.lambda(m)) * v;
    }
    return create(rep.basis(), up) + annihilate(rep.basis(), down) + neutral(rep.basis(), cells) +
           FockOperator::identity(rep.basis()) * Complex(mass);
}

namespace {

void check_wick(const Representation& rep, std::size_t n, const WickLimits& limits) {
    if (static_cast<int>(n) > limits.max_factors) {
        throw CapacityError("Wick product of " + std::to_string(n) + " factors exceeds the limit " +
                            std::to_string(limits.max_factors));
    }
    if (rep.truncation() < 2 * static_cast<int>(n)) {
        throw CapacityError("truncation " + std::to_string(rep.truncation()) + " is below 2n = " +
                            std::to_string(2 * n));
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Memoized Wick recursion, generic over operators and vacuum vectors. An empty box makes the
// whole polynomial vanish, which is used as a shortcut.
template <class Value>
class WickRecursion {
public:
    using RhoApply = std::function<Value(const CellSet&, const Value&)>;

    WickRecursion(Value unit, Value zero, RhoApply apply)
        : unit_(std::move(unit)), zero_(std::move(zero)), apply_(std::move(apply)) {}

    Value operator()(const std::vector<CellSet>& boxes) {
        if (boxes.empty()) return unit_;
        for (const auto& b : boxes)
            if (b.empty()) return zero_;
        if (auto it = memo_.find(boxes); it != memo_.end()) return it->second;

        std::vector<CellSet> head(boxes.begin(), boxes.end() - 1);
        const CellSet& last = boxes.back();
        Value out = apply_(last, (*this)(head));
        for (std::size_t i = 0; i < head.size(); ++i) {
            std::vector<CellSet> replaced = head;
            replaced[i] = intersect(head[i], last);
            if (replaced[i].empty()) continue;
            out = out - (*this)(replaced);
        }
        memo_.emplace(boxes, out);
        return out;
    }

private:
    Value unit_, zero_;
    RhoApply apply_;
    std::map<std::vector<CellSet>, Value> memo_;
};

std::vector<CellSet> normalized(std::span<const CellSet> boxes) {
    std::vector<CellSet> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes) out.push_back(make_cell_set(b));
    return out;
}

}  // namespace

FockOperator wick(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits) {
    check_wick(rep, boxes.size(), limits);
    for (const auto& b : boxes) rep.grid().check_cells(b);
    std::map<CellSet, FockOperator> rho_cache;
    WickRecursion<FockOperator> rec(FockOperator::identity(rep.basis()), FockOperator::zero(rep.basis()),
                                    [&](const CellSet& cells, const FockOperator& w) {
                                        auto it = rho_cache.find(cells);
                                        if (it == rho_cache.end()) it = rho_cache.emplace(cells, rep.rho(cells)).first;
                                        return it->second * w;
                                    });
    return rec(normalized(boxes));
}

ComplexVector wick_vacuum(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits) {
    check_wick(rep, boxes.size(), limits);
    for (const auto& b : boxes) rep.grid().check_cells(b);
    std::map<CellSet, FockOperator> rho_cache;
    const ComplexVector omega = vacuum(*rep.basis());
    WickRecursion<ComplexVector> rec(omega, ComplexVector::Zero(omega.size()),
                                     [&](const CellSet& cells, const ComplexVector& v) -> ComplexVector {
                                         auto it = rho_cache.find(cells);
                                         if (it == rho_cache.end()) it = rho_cache.emplace(cells, rep.rho(cells)).first;
                                         return it->second.apply(v);
                                     });
    return rec(normalized(boxes));
}

Complex theta(const Representation& rep, std::span<const CellSet> boxes, const WickLimits& limits) {
    const ComplexVector w = wick_vacuum(rep, boxes, limits);
    return w[0] / factorial(static_cast<int>(boxes.size()));
}

Complex moment(const Representation& rep, std::span<const CellSet> boxes, std::span<const int> order,
               const WickLimits& limits) {
    check_wick(rep, boxes.size(), limits);
    std::vector<int> perm(boxes.size());
    if (order.empty()) {
        std::iota(perm.begin(), perm.end(), 0);
    } else {
        perm.assign(order.begin(), order.end());
        std::vector<int> sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i] != static_cast<int>(i) || sorted.size() != boxes.size()) {
                throw PreconditionError("moment: order must be a permutation of the box indices");
            }
        }
    }
    // tau(rho_{p0} ... rho_{p(n-1)}): the rightmost factor acts on Omega first.
    ComplexVector v = vacuum(*rep.basis());
    for (auto it = perm.rbegin(); it != perm.rend(); ++it) v = rep.rho(boxes[*it]).apply(v);
    return v[0];
}

Complex quasifree_T(const Representation& rep, std::span<const ComplexVector> h) {
    const int k = static_cast<int>(h.size());
    if (k == 0) return 1.0;
    if (rep.truncation() < k) {
        throw CapacityError("quasi-free T^(" + std::to_string(k) + ") needs truncation >= " + std::to_string(k));
    }
    auto as_span = [](const ComplexVector& v) { return std::span<const Complex>(v.data(), v.size()); };
    if (k == 1) return rep.B(as_span(h[0])).vacuum_expectation();

    const FockOperator id = FockOperator::identity(rep.basis());
    ComplexVector v = vacuum(*rep.basis());
    for (int i = k - 1; i >= 0; --i) {
        const FockOperator b = rep.B(as_span(h[i]));
        v = (b - id * b.vacuum_expectation()).apply(v);
    }
    return v[0];
}

Complex gaussian_bridge(const Representation& rep, std::span<const int> points) {
    const int n = static_cast<int>(points.size());
    if (rep.truncation() < n) {
        throw CapacityError("Gaussian moment of " + std::to_string(n) + " points needs truncation >= " +
                            std::to_string(n));
    }
    ComplexVector v = vacuum(*rep.basis());
    for (int i = n - 1; i >= 0; --i) v = rep.phi(points[i]).apply(v);
    for (int i = 0; i < n; ++i) v = rep.psi(points[i]).apply(v);
    return v[0];
}

BogoliubovReport bogoliubov_check(const ComplexMatrix& k1, const ComplexMatrix& k2,
                                  std::span<const ComplexVector> tests, int truncation, double tolerance) {
    if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
        throw DimensionError("K1 and K2 must have the same shape");
    }
    BogoliubovReport report;
    const Eigen::Index h = k1.cols();
    report.symmetry_residual = (k2.transpose() * k1 - k1.transpose() * k2).norm();
    report.norm_residual = (k2.adjoint() * k2 - k1.adjoint() * k1 - ComplexMatrix::Identity(h, h)).norm();
    report.conditions_pass = report.symmetry_residual <= tolerance && report.norm_residual <= tolerance;
    if (!report.conditions_pass) return report;

    auto basis = std::make_shared<const FockBasis>(static_cast<int>(k1.rows()), truncation);
    auto B = [&](const ComplexVector& f) {
        const ComplexVector up = k2 * f + (k1 * f).conjugate();
        const ComplexVector down = k1 * f + (k2 * f).conjugate();
        return create(basis, up) + annihilate(basis, down);
    };
    for (const auto& f : tests) {
        if (f.size() != h) throw DimensionError("test vector length does not match K1, K2");
        for (const auto& g : tests) {
            const ComplexVector uf = k1 * f + (k2 * f).conjugate();
            const ComplexVector ug = k1 * g + (k2 * g).conjugate();
            BogoliubovReport::TwoPoint tp;
            tp.closed_form = ug.dot(uf);  // Eigen's dot conjugates the first argument: sum uf_j conj(ug_j)
            tp.fock = (B(f) * B(g)).vacuum_expectation();
            report.two_point.push_back(tp);
        }
    }
    return report;
}

}  // namespace haflab
