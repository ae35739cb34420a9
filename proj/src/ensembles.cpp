#include "fluctmat/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "fluctmat/dft_gauss.hpp"

namespace fluctmat {

CMat SignedPermutation::matrix() const {
    const int size = n();
    CMat w = CMat::Zero(size, size);
    for (int j = 0; j < size; ++j) w(perm[j], j) = static_cast<double>(signs[perm[j]]);
    return w;
}

std::vector<int> SignedPermutation::inverse_perm() const {
    std::vector<int> inv(perm.size());
    for (int j = 0; j < n(); ++j) inv[perm[j]] = j;
    return inv;
}

std::vector<int> sample_signature(int n, Xoshiro256& rng) {
    std::vector<int> signs(n);
    for (int& s : signs) s = rng.sign();
    return signs;
}

SignedPermutation sample_signed_permutation(int n, Xoshiro256& rng) {
    SignedPermutation w;
    w.perm.resize(n);
    std::iota(w.perm.begin(), w.perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(w.perm[i], w.perm[rng.below(i + 1)]);
    w.signs = sample_signature(n, rng);
    return w;
}

CMat signature_matrix(const std::vector<int>& signs) {
    const int n = static_cast<int>(signs.size());
    CMat x = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) x(i, i) = static_cast<double>(signs[i]);
    return x;
}

int expected_entry_product_signature(const IndexTuple& i, const IndexTuple& j) {
    if (i.domain() != j.domain()) throw DomainMismatch("entry product tuples need equal domains");
    if (!(i == j)) return 0;
    return kernel(i).is_even() ? 1 : 0;
}

Rat64 expected_entry_product_signed_perm(const IndexTuple& i, const IndexTuple& j, int n) {
    if (i.domain() != j.domain()) throw DomainMismatch("entry product tuples need equal domains");
    SetPartition ki = kernel(i);
    if (!(ki == kernel(j)) || !ki.is_even()) return Rat64(0);
    if (ki.block_count() > n) return Rat64(0);  // no injective assignment exists
    Rat64 value(1);
    for (int t = 0; t < ki.block_count(); ++t) value = value * Rat64(1, n - t);
    return value;
}

namespace {

template <typename Visit>
void for_each_signed_permutation(int n, Visit&& visit) {
    SignedPermutation w;
    w.perm.resize(n);
    std::iota(w.perm.begin(), w.perm.end(), 0);
    w.signs.assign(n, 1);
    do {
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            for (int i = 0; i < n; ++i) w.signs[i] = (mask >> i) & 1 ? -1 : 1;
            visit(const_cast<const SignedPermutation&>(w));
        }
    } while (std::next_permutation(w.perm.begin(), w.perm.end()));
}

std::int64_t group_size(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f << n;
}

struct KahanSum {
    cplx sum = 0.0;
    cplx carry = 0.0;
    void add(cplx value) {
        cplx y = value - carry;
        cplx t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

cplx exact_expectation_signed_perm(
    int n, bool include_signature,
    const std::function<cplx(const SignedPermutation&, const std::vector<int>&)>& f) {
    if (n > (include_signature ? 4 : 5))
        throw TooLargeForExactEnumeration("exact enumeration supports N <= 5 (N <= 4 with a signature factor)");
    std::int64_t configs = group_size(n) * (include_signature ? (1LL << n) : 1);
    KahanSum acc;
    std::vector<int> x(n, 1);
    for_each_signed_permutation(n, [&](const SignedPermutation& w) {
        if (!include_signature) {
            acc.add(f(w, x));
            return;
        }
        std::vector<int> xs(n, 1);
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            for (int i = 0; i < n; ++i) xs[i] = (mask >> i) & 1 ? -1 : 1;
            acc.add(f(w, xs));
        }
    });
    return acc.sum / static_cast<double>(configs);
}

Rat64 exact_entry_product_signed_perm(int n, const IndexTuple& i, const IndexTuple& j) {
    if (i.domain() != j.domain()) throw DomainMismatch("entry product tuples need equal domains");
    std::int64_t total = 0;
    for_each_signed_permutation(n, [&](const SignedPermutation& w) {
        std::int64_t term = 1;
        for (int pos = 0; pos < i.domain().size() && term != 0; ++pos) {
            int row = i.values()[pos] - 1, col = j.values()[pos] - 1;
            term *= row == w.perm[col] ? w.signs[row] : 0;
        }
        total += term;
    });
    return Rat64(total, group_size(n));
}

Rat64 exact_entry_product_signature(int n, const IndexTuple& i, const IndexTuple& j) {
    if (i.domain() != j.domain()) throw DomainMismatch("entry product tuples need equal domains");
    std::int64_t total = 0;
    std::vector<int> xs(n, 1);
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        for (int k = 0; k < n; ++k) xs[k] = (mask >> k) & 1 ? -1 : 1;
        std::int64_t term = 1;
        for (int pos = 0; pos < i.domain().size() && term != 0; ++pos) {
            int row = i.values()[pos] - 1, col = j.values()[pos] - 1;
            term *= row == col ? xs[row] : 0;
        }
        total += term;
    }
    return Rat64(total, 1LL << n);
}

int Polynomial::degree() const {
    for (int d = static_cast<int>(coeffs.size()) - 1; d >= 0; --d)
        if (coeffs[d] != 0.0) return d;
    return 0;
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

CMat Polynomial::of_matrix(const CMat& d) const {
    const int n = static_cast<int>(d.rows());
    CMat acc = CMat::Zero(n, n);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * d + *it * CMat::Identity(n, n);
    return acc;
}

DeterministicFamily DeterministicFamily::diagonal(std::vector<double> pattern) {
    DeterministicFamily f;
    f.kind = Kind::DiagonalPattern;
    f.pattern = std::move(pattern);
    return f;
}

DeterministicFamily DeterministicFamily::rotated(std::vector<double> pattern) {
    DeterministicFamily f;
    f.kind = Kind::RotatedPattern;
    f.pattern = std::move(pattern);
    return f;
}

DeterministicFamily DeterministicFamily::explicit_from(CMat m) {
    DeterministicFamily f;
    f.kind = Kind::ExplicitMatrix;
    f.explicit_matrix = std::move(m);
    return f;
}

DeterministicFamily DeterministicFamily::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    int n = 0;
    if (!(in >> n) || n < 1) throw ConfigParseError("matrix file must start with the dimension: " + path);
    CMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v;
            if (!(in >> v)) throw ConfigParseError("matrix file is truncated: " + path);
            m(i, j) = v;
        }
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigParseError("matrix file is not symmetric: " + path);
    return explicit_from(std::move(m));
}

CMat DeterministicFamily::build(int n) const {
    CMat d;
    switch (kind) {
        case Kind::DiagonalPattern: {
            d = CMat::Zero(n, n);
            for (int i = 0; i < n; ++i) d(i, i) = pattern[i % pattern.size()];
            break;
        }
        case Kind::RotatedPattern: {
            // spectrum conjugated by the orthonormal cosine basis; strongly
            // delocalized diagonal, deterministic in N
            Eigen::MatrixXd q(n, n);
            for (int k = 0; k < n; ++k) {
                double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
                for (int i = 0; i < n; ++i)
                    q(k, i) = scale * std::cos(std::numbers::pi * (i + 0.5) * k / n);
            }
            Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) lambda(i, i) = pattern[i % pattern.size()];
            d = (q.transpose() * lambda * q).cast<cplx>();
            break;
        }
        case Kind::ExplicitMatrix: {
            if (explicit_matrix.rows() != n)
                throw DimensionMismatch("explicit matrix has fixed dimension " +
                                        std::to_string(explicit_matrix.rows()));
            d = explicit_matrix;
            break;
        }
    }
    if ((d - d.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw SpecInvalid("deterministic matrix not self-adjoint");
    return d;
}

std::string case_name(ConjugatorCase c) {
    switch (c) {
        case ConjugatorCase::Case1: return "1";
        case ConjugatorCase::Case2: return "2";
        case ConjugatorCase::Case3: return "3";
        case ConjugatorCase::HaarLike: return "haar";
    }
    return "?";
}

ConjugatorCase case_from_name(const std::string& name) {
    if (name == "1" || name == "case1") return ConjugatorCase::Case1;
    if (name == "2" || name == "case2") return ConjugatorCase::Case2;
    if (name == "3" || name == "case3") return ConjugatorCase::Case3;
    if (name == "haar" || name == "haar_like") return ConjugatorCase::HaarLike;
    throw ConfigParseError("unknown case name: " + name);
}

EnsembleSpec EnsembleSpec::basic(ConjugatorCase c, int m1, int m2) {
    EnsembleSpec s;
    s.conjugator = c;
    s.m1 = m1;
    s.m2 = m2;
    s.d1 = DeterministicFamily::diagonal({1.0, -1.0});
    s.d2 = DeterministicFamily::diagonal({1.0, -1.0});
    s.p.assign(2 * m1, Polynomial{{0.0, 1.0}});
    s.q.assign(2 * m2, Polynomial{{0.0, 1.0}});
    return s;
}

void EnsembleSpec::validate() const {
    if (m1 < 1 || m2 < 1) throw SpecInvalid("need m1, m2 >= 1");
    if (static_cast<int>(p.size()) != 2 * m1 || static_cast<int>(q.size()) != 2 * m2)
        throw SpecInvalid("need 2*m1 polynomials p and 2*m2 polynomials q");
    for (const auto& poly : p)
        if (poly.degree() < 1) throw SpecInvalid("polynomials must have degree >= 1");
    for (const auto& poly : q)
        if (poly.degree() < 1) throw SpecInvalid("polynomials must have degree >= 1");
}

CenteredFactors build_centered_factors(const EnsembleSpec& spec, int n) {
    spec.validate();
    CMat d1 = spec.d1.build(n);
    CMat d2 = spec.d2.build(n);
    CenteredFactors out;
    out.a_diagonal = spec.d1.diagonal_structure() && spec.d2.diagonal_structure();
    out.b_diagonal = out.a_diagonal;
    auto center = [&](const Polynomial& poly, const CMat& d, const char* side, int label) {
        CMat value = poly.of_matrix(d);
        cplx normalized_trace = value.trace() / static_cast<double>(n);
        CMat centered = value - normalized_trace * CMat::Identity(n, n);
        if (std::abs(centered.trace()) / n > 1e-12) throw SpecInvalid("centering failed");
        if (centered.cwiseAbs().maxCoeff() == 0.0)
            std::fprintf(stderr, "warning: centered factor %s%d is identically zero at N=%d\n", side, label, n);
        return centered;
    };
    for (int k = 1; k <= 2 * spec.m1; ++k)
        out.a.push_back(center(spec.p[k - 1], k % 2 != 0 ? d1 : d2, "A", k));
    for (int l = 1; l <= 2 * spec.m2; ++l)
        out.b.push_back(center(spec.q[l - 1], l % 2 != 0 ? d1 : d2, "B", l));
    return out;
}

ConjugatorSample sample_conjugators(ConjugatorCase c, int n, Xoshiro256& rng) {
    ConjugatorSample s;
    s.w = sample_signed_permutation(n, rng);
    if (c == ConjugatorCase::HaarLike) s.w2 = sample_signed_permutation(n, rng);
    if (c == ConjugatorCase::Case2 || c == ConjugatorCase::Case3) s.x_signs = sample_signature(n, rng);
    return s;
}

CMat conjugator_matrix(ConjugatorCase c, int which, const ConjugatorSample& s, const CMat& h) {
    const int n = static_cast<int>(h.rows());
    const double root_n = std::sqrt(static_cast<double>(n));
    switch (c) {
        case ConjugatorCase::Case1:
            return which == 1 ? s.w.matrix() : CMat((h * s.w.matrix()) / root_n);
        case ConjugatorCase::Case2:
            return which == 1 ? s.w.matrix()
                              : CMat((signature_matrix(s.x_signs) * h * s.w.matrix()) / root_n);
        case ConjugatorCase::Case3:
            return which == 1 ? CMat((h * s.w.matrix()) / root_n)
                              : CMat((signature_matrix(s.x_signs) * h * s.w.matrix()) / root_n);
        case ConjugatorCase::HaarLike:
            return which == 1 ? s.w.matrix() : CMat((h * s.w2.matrix()) / root_n);
    }
    throw SpecInvalid("bad conjugator case");
}

CMat transfer_matrix(ConjugatorCase c, const ConjugatorSample& s, const CMat& h) {
    CMat u1 = conjugator_matrix(c, 1, s, h);
    CMat u2 = conjugator_matrix(c, 2, s, h);
    return u1.adjoint() * u2;
}

}  // namespace fluctmat
