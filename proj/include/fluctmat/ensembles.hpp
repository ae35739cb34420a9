#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluctmat/graph_sum.hpp"
#include "fluctmat/partition.hpp"
#include "fluctmat/rational.hpp"
#include "fluctmat/rng.hpp"

namespace fluctmat {

// A signed permutation matrix W(i,j) = eps_i [i = sigma(j)], stored 0-based.
struct SignedPermutation {
    std::vector<int> perm;   // sigma: column j has its nonzero in row perm[j]
    std::vector<int> signs;  // eps_i, one per row

    int n() const { return static_cast<int>(perm.size()); }
    CMat matrix() const;
    std::vector<int> inverse_perm() const;
};

std::vector<int> sample_signature(int n, Xoshiro256& rng);  // diagonal +-1 entries
SignedPermutation sample_signed_permutation(int n, Xoshiro256& rng);
CMat signature_matrix(const std::vector<int>& signs);

// E[prod_k X(i_k, j_k)] for a uniform signature matrix: 1 iff i = j and
// ker(i) is even, else 0.
int expected_entry_product_signature(const IndexTuple& i, const IndexTuple& j);

// E[prod_s W(i_s, j_s)] for a uniform signed permutation matrix:
// (N - #pi)!/N! iff ker(i) = ker(j) = pi is even with #pi <= N, else 0.
Rat64 expected_entry_product_signed_perm(const IndexTuple& i, const IndexTuple& j, int n);

// Average of f over all signed permutations (optionally paired with every
// signature matrix); double precision with compensated summation. Guarded to
// N <= 5 without the signature factor and N <= 4 with it.
cplx exact_expectation_signed_perm(
    int n, bool include_signature,
    const std::function<cplx(const SignedPermutation&, const std::vector<int>&)>& f);

// Exact rational averages of entry products over the respective groups.
Rat64 exact_entry_product_signed_perm(int n, const IndexTuple& i, const IndexTuple& j);
Rat64 exact_entry_product_signature(int n, const IndexTuple& i, const IndexTuple& j);

// Real-coefficient polynomial c0 + c1 x + c2 x^2 + ...
struct Polynomial {
    std::vector<double> coeffs;
    int degree() const;
    double operator()(double x) const;
    CMat of_matrix(const CMat& d) const;
};

struct DeterministicFamily {
    enum class Kind { DiagonalPattern, RotatedPattern, ExplicitMatrix };
    Kind kind = Kind::DiagonalPattern;
    std::vector<double> pattern = {1.0, -1.0};  // spectrum, cycled to length N
    CMat explicit_matrix;                       // Kind::ExplicitMatrix only

    static DeterministicFamily diagonal(std::vector<double> pattern);
    static DeterministicFamily rotated(std::vector<double> pattern);
    static DeterministicFamily explicit_from(CMat m);
    static DeterministicFamily load(const std::string& path);  // text format: N then N rows

    CMat build(int n) const;  // self-adjoint, validated to 1e-12
    bool diagonal_structure() const { return kind == Kind::DiagonalPattern; }
};

enum class ConjugatorCase { Case1, Case2, Case3, HaarLike };

std::string case_name(ConjugatorCase c);
ConjugatorCase case_from_name(const std::string& name);

struct EnsembleSpec {
    ConjugatorCase conjugator = ConjugatorCase::Case1;
    int m1 = 1;
    int m2 = 1;
    DeterministicFamily d1;
    DeterministicFamily d2;
    std::vector<Polynomial> p;  // size 2*m1; shared default x
    std::vector<Polynomial> q;  // size 2*m2

    static EnsembleSpec basic(ConjugatorCase c, int m1, int m2);
    void validate() const;
};

// Centered deterministic factors A_k = p_k(D_{i_k}) - tr(p_k(D_{i_k})) I with
// i_k = 1 for odd k and 2 for even k (same rule for the B side).
struct CenteredFactors {
    std::vector<CMat> a;  // 2*m1 matrices
    std::vector<CMat> b;  // 2*m2 matrices
    bool a_diagonal = false;
    bool b_diagonal = false;
};

CenteredFactors build_centered_factors(const EnsembleSpec& spec, int n);

// One draw of all conjugator randomness; unused parts stay empty.
struct ConjugatorSample {
    SignedPermutation w;       // shared permutation (cases 1-3), first one for haar
    SignedPermutation w2;      // second permutation (haar only)
    std::vector<int> x_signs;  // signature (cases 2 and 3)
};

ConjugatorSample sample_conjugators(ConjugatorCase c, int n, Xoshiro256& rng);

// The unitary U_{N,i} (i in {1,2}) as an explicit matrix; h is dft_matrix(n).
CMat conjugator_matrix(ConjugatorCase c, int which, const ConjugatorSample& s, const CMat& h);

// V = U_1^* U_2 as an explicit matrix (test and exact-enumeration path).
CMat transfer_matrix(ConjugatorCase c, const ConjugatorSample& s, const CMat& h);

}  // namespace fluctmat
