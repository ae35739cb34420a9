#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fluctmat/graph_sum.hpp"
#include "fluctmat/partition.hpp"

namespace fluctmat {

// Integer quadratic form sum_{t<=s} a_{t,s} x_t x_s in r variables; no
// linear or constant part ever occurs here.
class QuadraticForm {
  public:
    explicit QuadraticForm(int variables = 0);

    int variables() const { return r_; }
    std::int64_t coefficient(int t, int s) const;       // 1-based, any order
    void add_coefficient(int t, int s, std::int64_t v);  // accumulates
    bool is_zero() const;

    // Value of the form at integer arguments, reduced into [0, modulus).
    std::int64_t evaluate_mod(const std::vector<std::int64_t>& x, std::int64_t modulus) const;

    friend bool operator==(const QuadraticForm& a, const QuadraticForm& b) {
        return a.r_ == b.r_ && a.coeff_ == b.coeff_;
    }

  private:
    int index(int t, int s) const;  // t <= s
    int r_ = 0;
    std::vector<std::int64_t> coeff_;
};

struct GaussSumParams {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
};

// m1 + m2 split of [+-2m] together with the two-cycle permutation
// (-1,1,...,-2m1,2m1)(-2m1-1,2m1+1,...,-2m,2m).
struct TwoBlockShape {
    int m1 = 1;
    int m2 = 1;
    SignedPermutationMap sigma;
};

CMat dft_matrix(int n);

// The permutation with the two cycles of lengths 4*m1 and 4*m2 on [+-2m].
SignedPermutationMap two_block_sigma(int m1, int m2);

TwoBlockShape make_two_block_shape(int m1, int m2);

// Quadratic form of a partition of [+-2m]: identify variables of
// -x_{-1}x_1 + x_{-2}x_2 - ... + x_{-2m}x_{2m} along the blocks.
QuadraticForm partition_polynomial(const SetPartition& pi);

// Exponential sum sum_j exp((2 pi i / N) p_pi(j)) over j in {0..N-1}^r with
// ker >= pi; `Exactly` subtracts coarser kernel classes via Moebius.
cplx h_graph_sum(const SetPartition& pi, int n, KernelConstraint constraint,
                 double budget = kDefaultGraphSumBudget);

// S(a,b,c) = sum_{j=0}^{|c|-1} exp(pi i (a j^2 + b j)/c); needs a,c != 0 and
// ac+b even.
cplx gauss_sum(const GaussSumParams& p);

// |LHS - RHS| of the reciprocity identity for S(a,b,c).
double reciprocity_residual(const GaussSumParams& p);

// All symmetric pairings pi of [+-2m] whose shifted polynomial
// p_{sigma^{-1} o pi} vanishes, generated constructively from the orbit
// formulas and de-duplicated.
std::vector<SetPartition> classify_zero_pairings(const TwoBlockShape& shape);

// For p_pi == 0 returns a symmetric pairing theta <= pi with p_theta == 0
// (exhaustive refinement search); otherwise nullopt.
std::optional<SetPartition> minimal_zero_witness(const SetPartition& pi);

}  // namespace fluctmat
