#include "fluctmat/fluctuation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include <unsupported/Eigen/FFT>

#include "fluctmat/dft_gauss.hpp"
#include "fluctmat/graph_sum.hpp"

namespace fluctmat {

namespace {

int mod_into(int x, int period) {
    int r = (x - 1) % period;
    if (r < 0) r += period;
    return r + 1;
}

cplx tr_product(const CMat& x, const CMat& y) {  // tr(XY)
    return x.cwiseProduct(y.transpose()).sum() / static_cast<double>(x.rows());
}

cplx tr_product_transposed(const CMat& x, const CMat& y) {  // tr(X Y^T)
    return x.cwiseProduct(y).sum() / static_cast<double>(x.rows());
}

cplx tr_hadamard(const CMat& x, const CMat& y) {  // tr(X o Y)
    cplx acc = 0.0;
    for (int i = 0; i < x.rows(); ++i) acc += x(i, i) * y(i, i);
    return acc / static_cast<double>(x.rows());
}

void check_factors(const std::vector<CMat>& a, const std::vector<CMat>& b) {
    if (a.empty() || b.empty() || a.size() % 2 != 0 || b.size() % 2 != 0)
        throw DimensionMismatch("need 2*m1 and 2*m2 factors");
    const auto n = a.front().rows();
    for (const auto& m : a) {
        if (m.rows() != n || m.cols() != n) throw DimensionMismatch("factors must share one square size");
        if (std::abs(m.trace()) / static_cast<double>(n) > 1e-10) throw TraceNotZero("factor has nonzero trace");
    }
    for (const auto& m : b) {
        if (m.rows() != n || m.cols() != n) throw DimensionMismatch("factors must share one square size");
        if (std::abs(m.trace()) / static_cast<double>(n) > 1e-10) throw TraceNotZero("factor has nonzero trace");
    }
}

}  // namespace

cplx case3_double_sum_half_range(const std::vector<CMat>& a, const std::vector<CMat>& b) {
    const int m1 = static_cast<int>(a.size()) / 2;
    const int m2 = static_cast<int>(b.size()) / 2;
    cplx sum = 0.0;
    for (int l1 = 1; l1 <= m1; ++l1)
        for (int l2 = 1; l2 <= m2; ++l2) {
            cplx prod = 1.0;
            for (int k1 = 1; k1 <= m1; ++k1)
                prod *= tr_product(a[mod_into(l1 + k1 - 1, 2 * m1) - 1], a[mod_into(l1 - k1, 2 * m1) - 1]);
            for (int k2 = 1; k2 <= m2; ++k2)
                prod *= tr_product(b[mod_into(l2 + k2 - 1, 2 * m2) - 1], b[mod_into(l2 - k2, 2 * m2) - 1]);
            sum += prod;
        }
    return 2.0 * sum;
}

cplx case3_double_sum_full_range(const std::vector<CMat>& a, const std::vector<CMat>& b) {
    const int m1 = static_cast<int>(a.size()) / 2;
    const int m2 = static_cast<int>(b.size()) / 2;
    cplx sum = 0.0;
    for (int l1 = 1; l1 <= 2 * m1; ++l1)
        for (int l2 = 1; l2 <= 2 * m2; ++l2) {
            cplx prod = 1.0;
            for (int k1 = 1; k1 <= m1; ++k1)
                prod *= tr_product(a[mod_into(l1 + k1 - 1, 2 * m1) - 1], a[mod_into(l1 - k1, 2 * m1) - 1]);
            for (int k2 = 1; k2 <= m2; ++k2)
                prod *= tr_product(b[mod_into(l2 + k2 - 1, 2 * m2) - 1], b[mod_into(l2 - k2, 2 * m2) - 1]);
            sum += prod;
        }
    return sum;
}

cplx analytic_rhs(ConjugatorCase c, const std::vector<CMat>& a, const std::vector<CMat>& b) {
    check_factors(a, b);
    const int m1 = static_cast<int>(a.size()) / 2;
    const int m2 = static_cast<int>(b.size()) / 2;
    const bool equal_halves = m1 == m2;

    auto aligned_sum = [&]() {  // sum_l prod_k tr(A_k B_{2l-k})
        cplx sum = 0.0;
        for (int l = 1; l <= m1; ++l) {
            cplx prod = 1.0;
            for (int k = 1; k <= 2 * m1; ++k) prod *= tr_product(a[k - 1], b[mod_into(2 * l - k, 2 * m1) - 1]);
            sum += prod;
        }
        return sum;
    };

    switch (c) {
        case ConjugatorCase::Case1: {
            if (!equal_halves) return 0.0;
            cplx sum = aligned_sum();
            for (int l = 1; l <= m1; ++l) {
                cplx prod = 1.0;
                for (int k = 1; k <= 2 * m1; ++k)
                    prod *= tr_product_transposed(a[k - 1], b[mod_into(2 * l + k - 1, 2 * m1) - 1]);
                sum += prod;
            }
            return sum;
        }
        case ConjugatorCase::Case2: {
            if (!equal_halves) return 0.0;
            cplx sum = aligned_sum();
            for (int l = 1; l <= m1; ++l) {
                cplx prod = 1.0;
                for (int k = 1; k <= 2 * m1; ++k)
                    prod *= tr_hadamard(a[k - 1], b[mod_into(2 * l + k - 1, 2 * m1) - 1]);
                sum += prod;
            }
            return sum;
        }
        case ConjugatorCase::Case3: {
            cplx sum = case3_double_sum_half_range(a, b);
            if (equal_halves) {
                for (int l = 1; l <= 2 * m1; ++l) {
                    cplx prod = 1.0;
                    for (int k = 1; k <= 2 * m1; ++k)
                        prod *= tr_product(a[k - 1], b[mod_into(l - k, 2 * m1) - 1]);
                    sum += prod;
                }
            }
            return sum;
        }
        case ConjugatorCase::HaarLike:
            return equal_halves ? aligned_sum() : cplx(0.0);
    }
    throw SpecInvalid("bad conjugator case");
}

// ---------------------------------------------------------------------------
// Structured per-sample evaluation of Tr Y and Tr Z.
//
// Tr Y = Tr( A_1 M_1 A_3 M_2 ... ) with M_t = V A_{2t} V^*, V = U_1^* U_2.
// Sandwiches are computed without any N^3 product: permutation conjugations
// are index remaps and the DFT sandwich H X H^*/N is a 2D Fourier transform
// (a single circulant lookup when X is diagonal).
// ---------------------------------------------------------------------------

namespace {

class FourierWorkspace {
  public:
    explicit FourierWorkspace(int n) : n_(n), row_in_(n), row_out_(n) {}

    // K = H X H^* / N
    CMat dft_sandwich(const CMat& x) {
        CMat k(n_, n_);
        for (int j = 0; j < n_; ++j)  // forward transform of each column
            fft_.fwd(k.col(j).data(), x.col(j).data(), n_);
        inv_rows(k);
        return k;
    }

    // K = H^* X H / N
    CMat dft_sandwich_conjugate(const CMat& x) {
        CMat k(n_, n_);
        for (int j = 0; j < n_; ++j) {  // scaled inverse transform of each column
            fft_.inv(row_out_.data(), x.col(j).data(), n_);
            k.col(j) = Eigen::Map<Eigen::VectorXcd>(row_out_.data(), n_);
        }
        fwd_rows(k);
        return k;
    }

    // K = H diag(d) H^* / N, a circulant lookup from one transform
    CMat dft_sandwich_diagonal(const Eigen::VectorXcd& d) {
        fft_.fwd(row_out_.data(), d.data(), n_);
        CMat k(n_, n_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) k(i, j) = row_out_[(i - j + n_) % n_] / static_cast<double>(n_);
        return k;
    }

  private:
    void inv_rows(CMat& k) {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) row_in_[j] = k(i, j);
            fft_.inv(row_out_.data(), row_in_.data(), n_);
            for (int j = 0; j < n_; ++j) k(i, j) = row_out_[j];
        }
    }
    void fwd_rows(CMat& k) {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) row_in_[j] = k(i, j);
            fft_.fwd(row_out_.data(), row_in_.data(), n_);
            for (int j = 0; j < n_; ++j) k(i, j) = row_out_[j];
        }
    }

    int n_;
    Eigen::FFT<double> fft_;
    std::vector<cplx> row_in_, row_out_;
};

CMat conjugate_by_w(const SignedPermutation& w, const CMat& a) {  // W A W^*
    const int n = static_cast<int>(a.rows());
    std::vector<int> inv = w.inverse_perm();
    CMat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = static_cast<double>(w.signs[i] * w.signs[j]) * a(inv[i], inv[j]);
    return out;
}

CMat conjugate_by_w_adjoint(const SignedPermutation& w, const CMat& k) {  // W^* K W
    const int n = static_cast<int>(k.rows());
    CMat out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = static_cast<double>(w.signs[w.perm[i]] * w.signs[w.perm[j]]) * k(w.perm[i], w.perm[j]);
    return out;
}

void scale_by_signature(CMat& k, const std::vector<int>& x) {  // X K X
    const int n = static_cast<int>(k.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (x[i] * x[j] < 0) k(i, j) = -k(i, j);
}

class SandwichEngine {
  public:
    SandwichEngine(ConjugatorCase c, const ConjugatorSample& sample, FourierWorkspace& fourier)
        : case_(c), sample_(sample), fourier_(fourier) {}

    // M = V A V^* for V = U_1^* U_2 of the active case.
    CMat apply(const CMat& a, bool a_diagonal) const {
        const SignedPermutation& inner = case_ == ConjugatorCase::HaarLike ? sample_.w2 : sample_.w;
        CMat k;
        if (a_diagonal) {
            const int n = static_cast<int>(a.rows());
            std::vector<int> inv = inner.inverse_perm();
            Eigen::VectorXcd d(n);
            for (int i = 0; i < n; ++i) d(i) = a(inv[i], inv[i]);
            k = fourier_.dft_sandwich_diagonal(d);
        } else {
            k = fourier_.dft_sandwich(conjugate_by_w(inner, a));
        }
        switch (case_) {
            case ConjugatorCase::Case1:
                return conjugate_by_w_adjoint(sample_.w, k);
            case ConjugatorCase::Case2:
                scale_by_signature(k, sample_.x_signs);
                return conjugate_by_w_adjoint(sample_.w, k);
            case ConjugatorCase::Case3: {
                scale_by_signature(k, sample_.x_signs);
                CMat k2 = fourier_.dft_sandwich_conjugate(k);
                return conjugate_by_w_adjoint(sample_.w, k2);
            }
            case ConjugatorCase::HaarLike:
                return conjugate_by_w_adjoint(sample_.w, k);
        }
        throw SpecInvalid("bad conjugator case");
    }

  private:
    ConjugatorCase case_;
    const ConjugatorSample& sample_;
    FourierWorkspace& fourier_;
};

// Tr( odd_0 M_0 odd_1 M_1 ... ) for the alternating chain of one side.
cplx chain_trace(const std::vector<const CMat*>& odd, const std::vector<const CMat*>& sandwiched,
                 bool odd_diagonal) {
    const int m = static_cast<int>(odd.size());
    const int n = static_cast<int>(sandwiched.front()->rows());
    if (m == 1) {
        const CMat& a = *odd[0];
        const CMat& s = *sandwiched[0];
        if (odd_diagonal) {
            cplx acc = 0.0;
            for (int i = 0; i < n; ++i) acc += a(i, i) * s(i, i);
            return acc;
        }
        return a.cwiseProduct(s.transpose()).sum();
    }
    std::vector<CMat> links(m);
    for (int t = 0; t < m; ++t) {
        if (odd_diagonal)
            links[t] = odd[t]->diagonal().asDiagonal() * (*sandwiched[t]);
        else
            links[t] = *odd[t] * (*sandwiched[t]);
    }
    if (m == 2) return links[0].cwiseProduct(links[1].transpose()).sum();
    CMat prod = links[0];
    for (int t = 1; t + 1 < m; ++t) prod = prod * links[t];
    return prod.cwiseProduct(links[m - 1].transpose()).sum();
}

cplx product_trace(const std::vector<CMat>& factors) {
    CMat prod = factors.front();
    for (std::size_t i = 1; i + 1 < factors.size(); ++i) prod = prod * factors[i];
    if (factors.size() == 1) return prod.trace();
    return prod.cwiseProduct(factors.back().transpose()).sum();
}

}  // namespace

TraceSamples sample_traces(const ExperimentConfig& config, int n) {
    config.spec.validate();
    CenteredFactors factors = build_centered_factors(config.spec, n);
    const int m1 = config.spec.m1, m2 = config.spec.m2;

    TraceSamples out;
    out.tr_y.assign(config.samples, cplx(0.0));
    out.tr_z.assign(config.samples, cplx(0.0));

    if (config.force_identity_conjugators) {
        cplx tr_y = product_trace(factors.a);
        cplx tr_z = product_trace(factors.b);
        std::fill(out.tr_y.begin(), out.tr_y.end(), tr_y);
        std::fill(out.tr_z.begin(), out.tr_z.end(), tr_z);
        return out;
    }

    std::vector<const CMat*> odd_a, odd_b;
    for (int t = 0; t < m1; ++t) odd_a.push_back(&factors.a[2 * t]);
    for (int t = 0; t < m2; ++t) odd_b.push_back(&factors.b[2 * t]);

    // the sandwiched (even-position) factors often repeat across the Y and Z
    // chains; compute each distinct matrix once per sample
    std::vector<const CMat*> inner;
    std::vector<bool> inner_diag;
    std::vector<int> slot_a(m1), slot_b(m2);
    auto intern = [&](const CMat& mtx, bool diag) {
        for (std::size_t i = 0; i < inner.size(); ++i)
            if (inner_diag[i] == diag && inner[i]->rows() == mtx.rows() && *inner[i] == mtx)
                return static_cast<int>(i);
        inner.push_back(&mtx);
        inner_diag.push_back(diag);
        return static_cast<int>(inner.size()) - 1;
    };
    for (int s = 0; s < m1; ++s) slot_a[s] = intern(factors.a[2 * s + 1], factors.a_diagonal);
    for (int s = 0; s < m2; ++s) slot_b[s] = intern(factors.b[2 * s + 1], factors.b_diagonal);

    auto worker = [&](long begin, long end) {
        FourierWorkspace fourier(n);
        std::vector<CMat> sandwiches(inner.size());
        std::vector<const CMat*> sand_a(m1), sand_b(m2);
        for (long t = begin; t < end; ++t) {
            Xoshiro256 rng = sample_stream(config.master_seed, static_cast<std::uint64_t>(t));
            ConjugatorSample sample = sample_conjugators(config.spec.conjugator, n, rng);
            SandwichEngine engine(config.spec.conjugator, sample, fourier);
            for (std::size_t i = 0; i < inner.size(); ++i)
                sandwiches[i] = engine.apply(*inner[i], inner_diag[i]);
            for (int s = 0; s < m1; ++s) sand_a[s] = &sandwiches[slot_a[s]];
            for (int s = 0; s < m2; ++s) sand_b[s] = &sandwiches[slot_b[s]];
            out.tr_y[t] = chain_trace(odd_a, sand_a, factors.a_diagonal);
            out.tr_z[t] = chain_trace(odd_b, sand_b, factors.b_diagonal);
        }
    };

    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        worker(0, config.samples);
    } else {
        std::vector<std::thread> pool;
        long chunk = (config.samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long begin = w * chunk;
            long end = std::min<long>(config.samples, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

CumulantEstimate monte_carlo_cov(const ExperimentConfig& config, int n) {
    TraceSamples traces = sample_traces(config, n);
    return estimate_mixed_cumulant({traces.tr_y, traces.tr_z}, 2);
}

// ---------------------------------------------------------------------------
// Exact finite-N covariance decomposition.
// ---------------------------------------------------------------------------

namespace {

// Entry recipe of one transfer factor inside the covariance kernel: which
// (row, col) of V, conjugated for the even positions.
struct EntryRecipe {
    int row = 0;
    int col = 0;
    bool conjugate = false;
};

std::vector<EntryRecipe> entry_recipes(const SetPartition& pi, const SignedPermutationMap& sigma, int m) {
    std::vector<EntryRecipe> recipes(2 * m);
    for (int k = 1; k <= 2 * m; ++k) {
        int row_elem = sigma.apply(-k);
        int col_elem = sigma.apply(k);
        int row = pi.block_index_of(row_elem);  // representative j assigns block b value b+1
        int col = pi.block_index_of(col_elem);
        if (k % 2 != 0)
            recipes[k - 1] = {row, col, false};
        else
            recipes[k - 1] = {col, row, true};  // V^*(r, c) = conj(V(c, r))
    }
    return recipes;
}

struct CovAccumulator {
    cplx sum_v1 = 0.0, sum_v2 = 0.0, sum_v1v2 = 0.0;
};

template <typename ForEachConfig>
double decomposition_residual(const EnsembleSpec& spec, int n, ForEachConfig&& for_each_config) {
    CenteredFactors factors = build_centered_factors(spec, n);
    std::vector<CMat> matrices = factors.a;
    matrices.insert(matrices.end(), factors.b.begin(), factors.b.end());
    const int m = spec.m1 + spec.m2;
    GroundSet ground = GroundSet::signed_range(2 * m);
    SignedPermutationMap sigma = two_block_sigma(spec.m1, spec.m2);

    // enumerate the lattice once
    std::vector<SetPartition> all = enumerate_partitions(ground, PartitionFilter::All);
    std::vector<SetPartition> evens;
    std::vector<SetPartition> chi;
    for (const auto& p : all) {
        if (!p.is_even()) continue;
        evens.push_back(p);
        bool mirrored_pair_block = false;
        for (const auto& block : p.blocks())
            if (block.size() == 2 && block[0] == -block[1]) mirrored_pair_block = true;
        if (!mirrored_pair_block) chi.push_back(p);
    }

    // covariance kernel per representable even partition
    std::vector<std::vector<EntryRecipe>> recipes;
    std::vector<int> usable;  // indices into evens with a representative tuple
    for (int i = 0; i < static_cast<int>(evens.size()); ++i) {
        if (evens[i].block_count() > n) continue;
        usable.push_back(i);
        recipes.push_back(entry_recipes(evens[i], sigma, m));
    }

    std::vector<CovAccumulator> acc(usable.size());
    double configs = 0.0;
    cplx lhs_sum_yz = 0.0, lhs_sum_y = 0.0, lhs_sum_z = 0.0;

    for_each_config([&](const ConjugatorSample& sample, const CMat& h) {
        CMat v = transfer_matrix(spec.conjugator, sample, h);
        // exact LHS trace pair
        CMat u1 = conjugator_matrix(spec.conjugator, 1, sample, h);
        CMat u2 = conjugator_matrix(spec.conjugator, 2, sample, h);
        CMat y = CMat::Identity(n, n), z = CMat::Identity(n, n);
        for (int k = 0; k < 2 * spec.m1; ++k) {
            const CMat& u = (k % 2 == 0) ? u1 : u2;
            y = y * (u * factors.a[k] * u.adjoint());
        }
        for (int l = 0; l < 2 * spec.m2; ++l) {
            const CMat& u = (l % 2 == 0) ? u1 : u2;
            z = z * (u * factors.b[l] * u.adjoint());
        }
        cplx tr_y = y.trace(), tr_z = z.trace();
        lhs_sum_yz += tr_y * tr_z;
        lhs_sum_y += tr_y;
        lhs_sum_z += tr_z;

        for (std::size_t idx = 0; idx < usable.size(); ++idx) {
            cplx v1 = 1.0, v2 = 1.0;
            const auto& recipe = recipes[idx];
            for (int k = 0; k < 2 * spec.m1; ++k) {
                cplx e = v(recipe[k].row, recipe[k].col);
                v1 *= recipe[k].conjugate ? std::conj(e) : e;
            }
            for (int k = 2 * spec.m1; k < 2 * m; ++k) {
                cplx e = v(recipe[k].row, recipe[k].col);
                v2 *= recipe[k].conjugate ? std::conj(e) : e;
            }
            acc[idx].sum_v1 += v1;
            acc[idx].sum_v2 += v2;
            acc[idx].sum_v1v2 += v1 * v2;
        }
        configs += 1.0;
    });

    cplx lhs = lhs_sum_yz / configs - (lhs_sum_y / configs) * (lhs_sum_z / configs);

    std::map<std::vector<std::vector<int>>, cplx> kernel_cov;  // keyed by blocks
    for (std::size_t idx = 0; idx < usable.size(); ++idx) {
        const auto& a = acc[idx];
        cplx value = a.sum_v1v2 / configs - (a.sum_v1 / configs) * (a.sum_v2 / configs);
        kernel_cov[evens[usable[idx]].blocks()] = value;
    }

    cplx rhs = 0.0;
    for (const auto& theta : chi) {
        cplx coefficient = 0.0;
        for (const auto& pi : evens) {
            if (!is_refinement(pi, theta)) continue;
            auto it = kernel_cov.find(pi.blocks());
            if (it == kernel_cov.end()) continue;  // no representative tuple: empty kernel class
            coefficient += it->second * static_cast<double>(mobius(pi, theta));
        }
        if (coefficient == cplx(0.0)) continue;
        rhs += coefficient * evaluate_graph_sum(theta, matrices, KernelConstraint::AtLeast);
    }
    return std::abs(lhs - rhs);
}

}  // namespace

double exact_cov_decomposition_check(const EnsembleSpec& spec, int n) {
    spec.validate();
    if (spec.m1 != 1 || spec.m2 != 1)
        throw SpecInvalid("the exact decomposition check is implemented for m1 = m2 = 1");
    const bool haar = spec.conjugator == ConjugatorCase::HaarLike;
    const bool with_signature =
        spec.conjugator == ConjugatorCase::Case2 || spec.conjugator == ConjugatorCase::Case3;
    if (n > (haar || with_signature ? 4 : 5))
        throw TooLargeForExactEnumeration("exact decomposition supports N <= 4 for this case");

    CMat h = dft_matrix(n);
    auto enumerate = [&](auto&& visit) {
        std::vector<int> perm(n), perm2(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        ConjugatorSample sample;
        do {
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                sample.w.perm = perm;
                sample.w.signs.resize(n);
                for (int i = 0; i < n; ++i) sample.w.signs[i] = (mask >> i) & 1 ? -1 : 1;
                if (haar) {
                    for (int i = 0; i < n; ++i) perm2[i] = i;
                    do {
                        for (std::uint64_t mask2 = 0; mask2 < (1ULL << n); ++mask2) {
                            sample.w2.perm = perm2;
                            sample.w2.signs.resize(n);
                            for (int i = 0; i < n; ++i) sample.w2.signs[i] = (mask2 >> i) & 1 ? -1 : 1;
                            visit(const_cast<const ConjugatorSample&>(sample), h);
                        }
                    } while (std::next_permutation(perm2.begin(), perm2.end()));
                } else if (with_signature) {
                    sample.x_signs.resize(n);
                    for (std::uint64_t xmask = 0; xmask < (1ULL << n); ++xmask) {
                        for (int i = 0; i < n; ++i) sample.x_signs[i] = (xmask >> i) & 1 ? -1 : 1;
                        visit(const_cast<const ConjugatorSample&>(sample), h);
                    }
                } else {
                    visit(const_cast<const ConjugatorSample&>(sample), h);
                }
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    };
    return decomposition_residual(spec, n, enumerate);
}

// ---------------------------------------------------------------------------
// Bounded-cumulant scan and the experiment driver.
// ---------------------------------------------------------------------------

CumulantScanReport bounded_cumulant_scan(const ExperimentConfig& config, int order) {
    if (order < 2 || order > 4) throw OrderTooHigh("the scan supports orders 2..4");
    CumulantScanReport report;
    report.order = order;
    for (int n : config.n_grid) {
        TraceSamples traces = sample_traces(config, n);
        std::vector<std::vector<cplx>> streams(order, traces.tr_y);
        report.rows.push_back({n, estimate_mixed_cumulant(streams, order)});
    }

    // weighted log-log fit of |estimate| against N, skipping zero-consistent
    // points; everything zero-consistent counts as bounded
    std::vector<double> xs, ys, ws;
    for (const auto& row : report.rows) {
        double mag = std::abs(row.estimate.value);
        double se = row.estimate.std_error;
        if (mag <= std::max(5.0 * se, 1e-13)) continue;
        double sigma_log = std::max(se / mag, 1e-6);
        xs.push_back(std::log(static_cast<double>(row.n)));
        ys.push_back(std::log(mag));
        ws.push_back(1.0 / (sigma_log * sigma_log));
    }
    if (xs.size() < 2) {
        report.all_consistent_with_zero = xs.empty();
        report.slope = 0.0;
        report.slope_se = 0.0;
        report.pass = true;
        return report;
    }
    double wsum = 0, xbar = 0, ybar = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        wsum += ws[i];
        xbar += ws[i] * xs[i];
        ybar += ws[i] * ys[i];
    }
    xbar /= wsum;
    ybar /= wsum;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xbar) * (xs[i] - xbar);
        sxy += ws[i] * (xs[i] - xbar) * (ys[i] - ybar);
    }
    report.slope = sxy / sxx;
    report.slope_se = std::sqrt(1.0 / sxx);
    report.pass = report.slope <= 0.2 + report.slope_se;
    return report;
}

bool FluctuationReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const FluctRow& r) { return r.pass; });
}

std::string FluctuationReport::to_csv() const {
    std::string out = "case,N,m1,m2,samples,seed,mc_re,mc_im,mc_se,analytic_re,analytic_im,abs_err,pass\n";
    char buf[512];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%ld,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      case_name(conjugator).c_str(), row.n, m1, m2, samples,
                      static_cast<unsigned long long>(seed), row.mc.value.real(), row.mc.value.imag(),
                      row.mc.std_error, row.analytic.real(), row.analytic.imag(), row.abs_err,
                      row.pass ? 1 : 0);
        out += buf;
    }
    return out;
}

FluctuationReport run_experiment(const ExperimentConfig& config) {
    config.spec.validate();
    for (std::size_t i = 1; i < config.n_grid.size(); ++i)
        if (config.n_grid[i] <= config.n_grid[i - 1]) throw SpecInvalid("N grid must be strictly increasing");
    if (config.samples < 100) throw SpecInvalid("need at least 100 samples");

    auto start = std::chrono::steady_clock::now();
    FluctuationReport report;
    report.conjugator = config.spec.conjugator;
    report.m1 = config.spec.m1;
    report.m2 = config.spec.m2;
    report.samples = config.samples;
    report.seed = config.master_seed;

    for (int n : config.n_grid) {
        FluctRow row;
        row.n = n;
        row.mc = monte_carlo_cov(config, n);
        CenteredFactors factors = build_centered_factors(config.spec, n);
        row.analytic = analytic_rhs(config.spec.conjugator, factors.a, factors.b);
        row.abs_err = std::abs(row.mc.value - row.analytic);
        double drift = config.drift_constant;
        if (drift < 0) {
            drift = 1.0;
            for (const auto& mtx : factors.a) drift *= operator_norm(mtx);
            for (const auto& mtx : factors.b) drift *= operator_norm(mtx);
        }
        row.tolerance = config.tolerance_sigmas * row.mc.std_error + drift / std::sqrt(static_cast<double>(n));
        row.pass = row.abs_err <= row.tolerance;
        report.rows.push_back(row);
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_report_csv(const FluctuationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output path: " + path);
    out << report.to_csv();
    if (!out) throw IoError("failed writing output path: " + path);
}

}  // namespace fluctmat
