#pragma once

#include <complex>
#include <vector>

#include "fluctmat/partition.hpp"

namespace fluctmat {

using cplx = std::complex<double>;

// Mixed moments E[prod_{b in S} x_b] indexed by subsets S of {1..n} as
// bitmasks; the empty product is 1.
class MomentTable {
  public:
    explicit MomentTable(int order);

    int order() const { return order_; }
    cplx moment(unsigned mask) const;
    void set_moment(unsigned mask, cplx value);
    bool complete() const;  // every nonempty subset assigned

  private:
    int order_;
    std::vector<cplx> values_;
    std::vector<bool> assigned_;
};

struct CumulantEstimate {
    cplx value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

// Classical mixed cumulant of the variables in `mask` from exact moments:
// sum over partitions of the subset of mu(pi, 1) times the block moments.
cplx cumulant_from_moments(const MomentTable& table, unsigned mask);
cplx cumulant_from_moments(const MomentTable& table, int n);  // full set {1..n}

// Moment of the subset from mixed cumulants of all its subsets (the inverse
// zeta sum); used to cross-check the round trip.
cplx moment_from_cumulants(const MomentTable& table, unsigned mask);

// Plug-in estimator: sample mixed moments inserted into the cumulant sum,
// with a delete-block jackknife standard error (50 blocks by default).
CumulantEstimate estimate_mixed_cumulant(const std::vector<std::vector<cplx>>& streams, int n,
                                         int jackknife_blocks = 50);

}  // namespace fluctmat
