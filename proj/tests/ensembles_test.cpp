#include "fluctmat/ensembles.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "fluctmat/dft_gauss.hpp"

using namespace fluctmat;

namespace {

IndexTuple tuple_on(const GroundSet& g, std::vector<int> values, int n) { return {g, std::move(values), n}; }

}  // namespace

TEST_CASE("signed permutation samples are unitary group elements") {
    Xoshiro256 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng.below(6));
        SignedPermutation w = sample_signed_permutation(n, rng);
        CMat m = w.matrix();
        CHECK((m.adjoint() * m - CMat::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("signature sampler is fair at N=1") {
    Xoshiro256 rng(5);
    int plus = 0;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t)
        if (sample_signature(1, rng)[0] == 1) ++plus;
    double freq = static_cast<double>(plus) / draws;
    CHECK(std::abs(freq - 0.5) < 0.02);  // 4 sigma of a fair coin
}

TEST_CASE("sampler uniformity over the whole group") {
    Xoshiro256 rng(7);
    for (int n : {3, 4}) {
        std::map<std::pair<std::vector<int>, std::vector<int>>, long> counts;
        const long draws = n == 3 ? 480000 : 1000000;
        for (long t = 0; t < draws; ++t) {
            SignedPermutation w = sample_signed_permutation(n, rng);
            ++counts[{w.perm, w.signs}];
        }
        const std::size_t group = n == 3 ? 48 : 384;
        CHECK(counts.size() == group);
        double expected = static_cast<double>(draws) / group;
        double chi2 = 0.0;
        for (const auto& [key, count] : counts) chi2 += (count - expected) * (count - expected) / expected;
        // chi-square normal approximation; reject only beyond ~3.7 sigma
        double dof = static_cast<double>(group - 1);
        CHECK(std::abs(chi2 - dof) / std::sqrt(2.0 * dof) < 3.72);
    }
}

TEST_CASE("empirical second moment of one entry matches the exact value") {
    Xoshiro256 rng(11);
    const int n = 3;
    const long draws = 100000;
    double sum = 0.0;
    for (long t = 0; t < draws; ++t) {
        SignedPermutation w = sample_signed_permutation(n, rng);
        double entry = std::real(w.matrix()(0, 0));
        sum += entry * entry;
    }
    double mean = sum / draws;
    double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / draws);
    CHECK(std::abs(mean - 1.0 / 3.0) < 3 * se);
}

TEST_CASE("sampled entry products match the closed form on random tuples") {
    Xoshiro256 rng(29);
    const int n = 4;
    const long draws = 100000;
    for (int trial = 0; trial < 5; ++trial) {
        int d = 2 + static_cast<int>(rng.below(2));
        GroundSet g = GroundSet::range(d);
        std::vector<int> iv(d), jv(d);
        for (int k = 0; k < d; ++k) {
            iv[k] = 1 + static_cast<int>(rng.below(n));
            jv[k] = 1 + static_cast<int>(rng.below(n));
        }
        if (trial % 2 == 0) jv = iv;  // make the nonzero case reachable
        IndexTuple i(g, iv, n), j(g, jv, n);
        double sum = 0.0, sumsq = 0.0;
        for (long t = 0; t < draws; ++t) {
            SignedPermutation w = sample_signed_permutation(n, rng);
            double prod = 1.0;
            for (int k = 0; k < d && prod != 0.0; ++k)
                prod *= iv[k] - 1 == w.perm[jv[k] - 1] ? w.signs[iv[k] - 1] : 0;
            sum += prod;
            sumsq += prod * prod;
        }
        double mean = sum / draws;
        double se = std::sqrt(std::max(0.0, sumsq / draws - mean * mean) / draws);
        double target = expected_entry_product_signed_perm(i, j, n).to_double();
        CHECK(std::abs(mean - target) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("entry product formulas on the stated examples") {
    GroundSet g2 = GroundSet::range(2);
    IndexTuple ones = tuple_on(g2, {1, 1}, 3);
    IndexTuple mixed = tuple_on(g2, {1, 2}, 3);
    CHECK(expected_entry_product_signature(ones, ones) == 1);
    CHECK(expected_entry_product_signature(mixed, mixed) == 0);
    CHECK(expected_entry_product_signature(ones, mixed) == 0);
    CHECK(expected_entry_product_signed_perm(ones, ones, 3) == Rat64(1, 3));
    CHECK(expected_entry_product_signed_perm(ones, mixed, 3) == Rat64(0));
    CHECK_THROWS_AS(expected_entry_product_signature(ones, tuple_on(GroundSet::range(3), {1, 1, 1}, 3)),
                    DomainMismatch);
}

TEST_CASE("exact enumeration reproduces the closed forms on all small tuples") {
    for (int n = 1; n <= 3; ++n) {
        for (int d = 1; d <= 2; ++d) {
            GroundSet g = GroundSet::range(d);
            std::vector<int> iv(d, 1), jv(d, 1);
            std::function<void(int, bool)> loop = [&](int pos, bool filling_j) {
                if (pos == d) {
                    if (!filling_j) {
                        loop(0, true);
                        return;
                    }
                    IndexTuple i = tuple_on(g, iv, n), j = tuple_on(g, jv, n);
                    CHECK(exact_entry_product_signed_perm(n, i, j) ==
                          expected_entry_product_signed_perm(i, j, n));
                    CHECK(exact_entry_product_signature(n, i, j) ==
                          Rat64(expected_entry_product_signature(i, j)));
                    return;
                }
                auto& vec = filling_j ? jv : iv;
                for (int v = 1; v <= n; ++v) {
                    vec[pos] = v;
                    loop(pos + 1, filling_j);
                }
            };
            loop(0, false);
        }
    }
}

TEST_CASE("exact expectation helper") {
    CHECK(std::abs(exact_expectation_signed_perm(
              3, false, [](const SignedPermutation& w, const std::vector<int>&) {
                  return w.matrix()(0, 0);
              })) < 1e-15);
    cplx second = exact_expectation_signed_perm(3, false,
                                                [](const SignedPermutation& w, const std::vector<int>&) {
                                                    cplx e = w.matrix()(0, 0);
                                                    return e * e;
                                                });
    CHECK(std::abs(second - cplx(1.0 / 3.0)) < 1e-15);
    CHECK_THROWS_AS(exact_expectation_signed_perm(
                        6, false, [](const SignedPermutation&, const std::vector<int>&) { return cplx(0); }),
                    TooLargeForExactEnumeration);

    // cross-check a conjugation trace against Monte Carlo
    Xoshiro256 rng(13);
    const int n = 3;
    CMat a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a(i, j) = cplx(rng.uniform() - 0.5, 0.0);
            b(i, j) = cplx(rng.uniform() - 0.5, 0.0);
        }
    cplx exact = exact_expectation_signed_perm(
        n, false, [&](const SignedPermutation& w, const std::vector<int>&) {
            CMat wm = w.matrix();
            return (wm * a * wm.adjoint() * b).trace();
        });
    const long draws = 20000;
    cplx mc = 0.0;
    std::vector<cplx> vals(draws);
    for (long t = 0; t < draws; ++t) {
        CMat wm = sample_signed_permutation(n, rng).matrix();
        vals[t] = (wm * a * wm.adjoint() * b).trace();
        mc += vals[t];
    }
    mc /= static_cast<double>(draws);
    double var = 0.0;
    for (const auto& v : vals) var += std::norm(v - mc);
    double se = std::sqrt(var / draws / draws);
    CHECK(std::abs(mc - exact) < 4 * se + 1e-12);
}

namespace {

// Enumerates every configuration of the conjugator randomness at size n.
template <typename Visit>
void for_each_conjugator_config(ConjugatorCase c, int n, Visit&& visit) {
    const bool with_x = c == ConjugatorCase::Case2 || c == ConjugatorCase::Case3;
    const bool haar = c == ConjugatorCase::HaarLike;
    std::vector<int> perm(n), perm2(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    ConjugatorSample s;
    do {
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            s.w.perm = perm;
            s.w.signs.resize(n);
            for (int i = 0; i < n; ++i) s.w.signs[i] = (mask >> i) & 1 ? -1 : 1;
            if (haar) {
                for (int i = 0; i < n; ++i) perm2[i] = i;
                do {
                    for (std::uint64_t mask2 = 0; mask2 < (1ULL << n); ++mask2) {
                        s.w2.perm = perm2;
                        s.w2.signs.resize(n);
                        for (int i = 0; i < n; ++i) s.w2.signs[i] = (mask2 >> i) & 1 ? -1 : 1;
                        visit(const_cast<const ConjugatorSample&>(s));
                    }
                } while (std::next_permutation(perm2.begin(), perm2.end()));
            } else if (with_x) {
                s.x_signs.resize(n);
                for (std::uint64_t xmask = 0; xmask < (1ULL << n); ++xmask) {
                    for (int i = 0; i < n; ++i) s.x_signs[i] = (xmask >> i) & 1 ? -1 : 1;
                    visit(const_cast<const ConjugatorSample&>(s));
                }
            } else {
                visit(const_cast<const ConjugatorSample&>(s));
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

TEST_CASE("transfer families are invariant under signed permutation conjugation") {
    // E[prod of V entries] must not change when the index tuples are pushed
    // through a signed permutation with its sign pattern absorbed
    Xoshiro256 rng(17);
    for (ConjugatorCase c : {ConjugatorCase::Case1, ConjugatorCase::Case2, ConjugatorCase::Case3,
                             ConjugatorCase::HaarLike}) {
        const int n = c == ConjugatorCase::HaarLike ? 3 : 4;
        CMat h = dft_matrix(n);
        auto expectation = [&](const std::vector<std::pair<int, int>>& entries,
                               const std::vector<int>& conj_perm, const std::vector<int>& conj_signs) {
            cplx acc = 0.0;
            long configs = 0;
            for_each_conjugator_config(c, n, [&](const ConjugatorSample& s) {
                CMat v = transfer_matrix(c, s, h);
                cplx prod = 1.0;
                for (auto [row, col] : entries) {
                    double sign = conj_signs[row] * conj_signs[col] < 0 ? -1.0 : 1.0;
                    prod *= sign * v(conj_perm[row], conj_perm[col]);
                }
                acc += prod;
                ++configs;
            });
            return acc / static_cast<double>(configs);
        };
        std::vector<std::pair<int, int>> entries = {{0, 1}, {1, 2}, {2, 0}, {0, 0}};
        std::vector<int> ident(n);
        std::vector<int> ident_signs(n, 1);
        for (int i = 0; i < n; ++i) ident[i] = i;
        cplx base = expectation(entries, ident, ident_signs);
        for (int trial = 0; trial < 5; ++trial) {
            SignedPermutation g = sample_signed_permutation(n, rng);
            cplx moved = expectation(entries, g.perm, g.signs);
            CHECK(std::abs(moved - base) < 1e-12);
        }
    }
}

TEST_CASE("entry moments of the scaled transfer matrix stay bounded in N") {
    Xoshiro256 rng(19);
    for (ConjugatorCase c : {ConjugatorCase::Case1, ConjugatorCase::Case3}) {
        std::map<int, double> sixth;
        for (int n : {8, 16, 32}) {
            CMat h = dft_matrix(n);
            double acc = 0.0;
            const int draws = 200;
            for (int t = 0; t < draws; ++t) {
                ConjugatorSample s = sample_conjugators(c, n, rng);
                CMat v = transfer_matrix(c, s, h);
                double entry = std::abs(v(static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n))));
                acc += std::pow(std::sqrt(static_cast<double>(n)) * entry, 6.0);
            }
            sixth[n] = acc / draws;
        }
        CHECK(sixth[16] < 2.0 * sixth[8] + 1e-9);
        CHECK(sixth[32] < 2.0 * sixth[16] + 1e-9);
    }
}

TEST_CASE("deterministic families build validated matrices") {
    DeterministicFamily diag = DeterministicFamily::diagonal({1.0, -1.0});
    CMat d = diag.build(4);
    CHECK(d(0, 0) == cplx(1.0));
    CHECK(d(1, 1) == cplx(-1.0));
    CHECK(d(2, 2) == cplx(1.0));
    CHECK(std::abs(d.trace()) < 1e-15);

    DeterministicFamily rot = DeterministicFamily::rotated({1.0, -1.0});
    CMat r = rot.build(8);
    CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(r.trace()) < 1e-10);
    CHECK(std::abs((r * r).trace() / 8.0 - 1.0) < 1e-10);  // spectrum still +-1
    // delocalized: no diagonal entry carries a full eigenvalue
    double max_diag = 0.0;
    for (int i = 0; i < 8; ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
    CHECK(max_diag < 0.9);
}

TEST_CASE("centered factors have zero trace and obey the index alternation") {
    EnsembleSpec spec = EnsembleSpec::basic(ConjugatorCase::Case1, 2, 1);
    spec.d2 = DeterministicFamily::diagonal({2.0, -1.0, -1.0});
    CenteredFactors f = build_centered_factors(spec, 6);
    REQUIRE(f.a.size() == 4);
    REQUIRE(f.b.size() == 2);
    for (const auto& m : f.a) CHECK(std::abs(m.trace()) / 6.0 < 1e-12);
    for (const auto& m : f.b) CHECK(std::abs(m.trace()) / 6.0 < 1e-12);
    // odd factors use the first family (+-1 pattern), even the second
    CHECK(std::abs(f.a[0](0, 0) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(f.a[1](0, 0) - cplx(2.0)) < 1e-12);

    // p(x) = x^2 on a +-1 spectrum collapses to zero (warning path)
    EnsembleSpec degenerate = EnsembleSpec::basic(ConjugatorCase::Case1, 1, 1);
    degenerate.p.assign(2, Polynomial{{0.0, 0.0, 1.0}});
    CenteredFactors g = build_centered_factors(degenerate, 4);
    CHECK(g.a[0].cwiseAbs().maxCoeff() == 0.0);

    Xoshiro256 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        EnsembleSpec s = EnsembleSpec::basic(ConjugatorCase::Case1, 1, 1);
        s.d1 = DeterministicFamily::diagonal({rng.uniform(), rng.uniform(), rng.uniform()});
        s.p.assign(2, Polynomial{{0.0, 1.0, 0.5}});
        CenteredFactors cf = build_centered_factors(s, 5);
        for (const auto& m : cf.a) CHECK(std::abs(m.trace()) / 5.0 < 1e-12);
    }
}

TEST_CASE("explicit matrix files round trip and validate") {
    const char* path = "/tmp/fluctmat_test_matrix.txt";
    {
        std::FILE* f = std::fopen(path, "w");
        std::fprintf(f, "2\n0.5 1.25\n1.25 -0.5\n");
        std::fclose(f);
    }
    DeterministicFamily fam = DeterministicFamily::load(path);
    CMat d = fam.build(2);
    CHECK(std::abs(d(0, 1) - cplx(1.25)) < 1e-15);
    CHECK_THROWS_AS(fam.build(3), DimensionMismatch);
    {
        std::FILE* f = std::fopen(path, "w");
        std::fprintf(f, "2\n0.5 1.0\n2.0 -0.5\n");
        std::fclose(f);
    }
    CHECK_THROWS_AS(DeterministicFamily::load(path), ConfigParseError);
    CHECK_THROWS_AS(DeterministicFamily::load("/nonexistent/matrix.txt"), IoError);
}

TEST_CASE("spec validation") {
    EnsembleSpec spec = EnsembleSpec::basic(ConjugatorCase::Case2, 1, 1);
    CHECK_NOTHROW(spec.validate());
    spec.p.clear();
    CHECK_THROWS_AS(spec.validate(), SpecInvalid);
    EnsembleSpec degree = EnsembleSpec::basic(ConjugatorCase::Case1, 1, 1);
    degree.q[0] = Polynomial{{1.0}};
    CHECK_THROWS_AS(degree.validate(), SpecInvalid);
}
