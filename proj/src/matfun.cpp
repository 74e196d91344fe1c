// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#include "haflab/matfun.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "haflab/errors.hpp"

namespace haflab {

SymmetricMatrix::SymmetricMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionError("symmetric matrix must be square");
    }
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < entries_.cols(); ++j) {
            if (entries_(i, j) != entries_(j, i)) {
                std::ostringstream msg;
                msg << "matrix is not symmetric at (" << i << ", " << j << ")";
                throw DimensionError(msg.str());
            }
        }
    }
}

SymmetricMatrix SymmetricMatrix::from_upper(const ComplexMatrix& entries) {
    if (entries.rows() != entries.cols()) {
        throw DimensionError("symmetric matrix must be square");
    }
    ComplexMatrix sym = entries;
    for (Eigen::Index i = 0; i < sym.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) sym(i, j) = sym(j, i);
    }
    return SymmetricMatrix(std::move(sym));
}

namespace {

void check_hafnian_dim(int dim, int limit, const char* algo) {
    if (dim % 2 != 0) {
        throw DimensionError("hafnian requires an even dimension, got " + std::to_string(dim));
    }
    if (dim > limit) {
        std::ostringstream msg;
        msg << algo << ": dimension " << dim << " exceeds configured limit " << limit;
        throw CapacityError(msg.str());
    }
}

// Depth-first walk over pairings: the lowest free index is paired with every
// later free index. The running product is added at each complete pairing.
struct PairingWalker {
    const ComplexMatrix& c;
    std::uint32_t full;
    Complex sum{0.0, 0.0};
    std::uint64_t leaves = 0;

    void walk(std::uint32_t used, Complex prod) {
        if (used == full) {
            sum += prod;
            ++leaves;
            return;
        }
        const std::uint32_t free = full & ~used;
        const int i = std::countr_zero(free);
        std::uint32_t rest = free & ~(1u << i);
        while (rest != 0) {
            const int j = std::countr_zero(rest);
            rest &= rest - 1;
            walk(used | (1u << i) | (1u << j), prod * c(i, j));
        }
    }
};

}  // namespace

std::uint64_t pairing_count(int dim) {
    if (dim < 0 || dim % 2 != 0) throw DimensionError("pairing_count requires an even dimension");
    std::uint64_t count = 1;
    for (int k = dim - 1; k > 1; k -= 2) count *= static_cast<std::uint64_t>(k);
    return count;
}

Complex hafnian_enum(const SymmetricMatrix& c, const HafnianOptions& options,
                     std::uint64_t* terms) {
    const int dim = c.dim();
    check_hafnian_dim(dim, options.limits.hafnian_enum_max_dim, "hafnian_enum");
    if (dim == 0) {
        if (terms) *terms = 1;
        return {1.0, 0.0};
    }
    const std::uint32_t full = dim == 32 ? ~0u : ((1u << dim) - 1u);

    // One branch per partner of index 0.
    const int branches = dim - 1;
    std::vector<Complex> branch_sum(branches);
    std::vector<std::uint64_t> branch_leaves(branches);
    auto run_branch = [&](int b) {
        const int j = b + 1;
        PairingWalker w{c.entries(), full};
        w.walk(1u | (1u << j), c(0, j));
        branch_sum[b] = w.sum;
        branch_leaves[b] = w.leaves;
    };

    const unsigned workers = std::clamp<unsigned>(options.workers, 1u, static_cast<unsigned>(branches));
    if (workers == 1) {
        for (int b = 0; b < branches; ++b) run_branch(b);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int b = static_cast<int>(w); b < branches; b += static_cast<int>(workers)) run_branch(b);
            });
        }
    }

    Complex total{0.0, 0.0};
    std::uint64_t leaves = 0;
    for (int b = 0; b < branches; ++b) {
        total += branch_sum[b];
        leaves += branch_leaves[b];
    }
    if (terms) *terms = leaves;
    return total;
}

Complex hafnian_dp(const SymmetricMatrix& c, const MatfunLimits& limits) {
    const int dim = c.dim();
    check_hafnian_dim(dim, limits.hafnian_dp_max_dim, "hafnian_dp");
    const ComplexMatrix& m = c.entries();
    std::unordered_map<std::uint32_t, Complex> memo;
    memo.reserve(1024);

    auto haf = [&](auto&& self, std::uint32_t set) -> Complex {
        if (set == 0) return {1.0, 0.0};
        if (auto it = memo.find(set); it != memo.end()) return it->second;
        const int i = std::countr_zero(set);
        const std::uint32_t rest = set & ~(1u << i);
        Complex acc{0.0, 0.0};
        for (std::uint32_t r = rest; r != 0; r &= r - 1) {
            const int j = std::countr_zero(r);
            acc += m(i, j) * self(self, rest & ~(1u << j));
        }
        memo.emplace(set, acc);
        return acc;
    };
    const std::uint32_t full = dim == 0 ? 0u : ((1u << dim) - 1u);
    return haf(haf, full);
}

Complex hafnian(const SymmetricMatrix& c, HafnianAlgorithm algorithm, const HafnianOptions& options) {
    return algorithm == HafnianAlgorithm::enumerate ? hafnian_enum(c, options)
                                                    : hafnian_dp(c, options.limits);
}

Complex permanent(const ComplexMatrix& b, const MatfunLimits& limits) {
    if (b.rows() != b.cols()) throw DimensionError("permanent requires a square matrix");
    const int n = static_cast<int>(b.rows());
    if (n > limits.permanent_max_dim) {
        throw CapacityError("permanent: dimension " + std::to_string(n) + " exceeds configured limit " +
                            std::to_string(limits.permanent_max_dim));
    }
    if (n == 0) return {1.0, 0.0};

    // per(B) = (-1)^n sum_{S nonempty} (-1)^{|S|} prod_i sum_{j in S} b(i,j)
    std::vector<Complex> row_sum(n, Complex{0.0, 0.0});
    Complex total{0.0, 0.0};
    std::uint64_t gray = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int col = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << col;
        gray ^= bit;
        if (gray & bit) {
            for (int i = 0; i < n; ++i) row_sum[i] += b(i, col);
        } else {
            for (int i = 0; i < n; ++i) row_sum[i] -= b(i, col);
        }
        Complex prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= row_sum[i];
        if (std::popcount(gray) % 2 == 0) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    return n % 2 == 0 ? total : -total;
}

Complex determinant(const ComplexMatrix& b) {
    if (b.rows() != b.cols()) throw DimensionError("determinant requires a square matrix");
    if (b.rows() == 0) return {1.0, 0.0};
    return b.partialPivLu().determinant();
}

Complex alpha_det(const ComplexMatrix& b, double alpha, const MatfunLimits& limits) {
    if (b.rows() != b.cols()) throw DimensionError("alpha_det requires a square matrix");
    const int n = static_cast<int>(b.rows());
    if (n > limits.alpha_det_max_dim) {
        throw CapacityError("alpha_det: dimension " + std::to_string(n) + " exceeds configured limit " +
                            std::to_string(limits.alpha_det_max_dim));
    }
    if (n == 0) return {1.0, 0.0};

    std::vector<double> alpha_pow(n + 1, 1.0);
    for (int k = 1; k <= n; ++k) alpha_pow[k] = alpha_pow[k - 1] * alpha;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<char> seen(n);
    Complex total{0.0, 0.0};
    do {
        std::fill(seen.begin(), seen.end(), 0);
        int cycles = 0;
        for (int s = 0; s < n; ++s) {
            if (seen[s]) continue;
            ++cycles;
            for (int t = s; !seen[t]; t = perm[t]) seen[t] = 1;
        }
        Complex prod{alpha_pow[n - cycles], 0.0};
        for (int i = 0; i < n; ++i) prod *= b(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

std::vector<BenchRow> bench_hafnian(std::span<const int> sizes, int repetitions, std::uint64_t seed,
                                    const MatfunLimits& limits) {
    std::vector<BenchRow> rows;
    if (repetitions < 1) repetitions = 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    using Clock = std::chrono::steady_clock;

    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t k = v.size() / 2;
        return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
    };

    for (int size : sizes) {
        std::vector<double> t_enum, t_dp;
        for (int r = 0; r < repetitions; ++r) {
            ComplexMatrix m(size, size);
            for (int i = 0; i < size; ++i)
                for (int j = i; j < size; ++j) m(i, j) = m(j, i) = Complex(unif(rng), unif(rng));
            const SymmetricMatrix sym(std::move(m));

            auto t0 = Clock::now();
            volatile double sink = hafnian_enum(sym, HafnianOptions{limits, 1}).real();
            auto t1 = Clock::now();
            sink = hafnian_dp(sym, limits).real();
            auto t2 = Clock::now();
            (void)sink;
            t_enum.push_back(std::chrono::duration<double>(t1 - t0).count());
            t_dp.push_back(std::chrono::duration<double>(t2 - t1).count());
        }
        rows.push_back({"enum", size, repetitions, median(t_enum)});
        rows.push_back({"dp", size, repetitions, median(t_dp)});
    }
    return rows;
}

ComplexMatrix read_matrix(std::istream& in) {
    std::string line;
    long dim = -1;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        if (ls >> dim) break;
    }
    if (dim < 1) throw ConfigError("matrix file: missing or invalid dimension line");

    ComplexMatrix m(dim, dim);
    long row = 0;
    while (row < dim && std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        long col = 0;
        bool any = false;
        while (ls >> tok) {
            any = true;
            const auto comma = tok.find(',');
            if (comma == std::string::npos) {
                throw ConfigError("matrix file: expected 're,im' pair, got '" + tok + "'");
            }
            if (col >= dim) throw DimensionError("matrix file: row " + std::to_string(row) + " too long");
            try {
                std::size_t used_re = 0, used_im = 0;
                const std::string re_s = tok.substr(0, comma), im_s = tok.substr(comma + 1);
                const double re = std::stod(re_s, &used_re);
                const double im = std::stod(im_s, &used_im);
                if (used_re != re_s.size() || used_im != im_s.size()) throw std::invalid_argument(tok);
                m(row, col++) = Complex(re, im);
            } catch (const std::logic_error&) {
                throw ConfigError("matrix file: cannot parse '" + tok + "'");
            }
        }
        if (!any) continue;
        if (col != dim) throw DimensionError("matrix file: row " + std::to_string(row) + " has wrong length");
        ++row;
    }
    if (row != dim) throw DimensionError("matrix file: expected " + std::to_string(dim) + " rows");
    return m;
}

void write_matrix(std::ostream& out, const ComplexMatrix& m) {
    const auto old_precision = out.precision(17);
    out << m.rows() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << m(i, j).real() << ',' << m(i, j).imag();
        }
        out << '\n';
    }
    out.precision(old_precision);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file " + path.string());
    return read_matrix(in);
}

}  // namespace haflab
