#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluctmat/cumulants.hpp"
#include "fluctmat/ensembles.hpp"

namespace fluctmat {

// Limiting covariance of (Tr Y_N, Tr Z_N) for each conjugator case, written
// in normalized traces of the centered factors. Inputs: the 2*m1 matrices A
// and 2*m2 matrices B, all square of one size and trace zero to 1e-10.
cplx analytic_rhs(ConjugatorCase c, const std::vector<CMat>& a, const std::vector<CMat>& b);

// The two printed shapes of the case-3 double sum: half ranges with overall
// coefficient 2, and full ranges with coefficient 1. The full-range shape
// double-counts the half-period symmetry, so full = 2 * half; analytic_rhs
// uses the half-range shape, which is the one Monte Carlo confirms.
cplx case3_double_sum_half_range(const std::vector<CMat>& a, const std::vector<CMat>& b);
cplx case3_double_sum_full_range(const std::vector<CMat>& a, const std::vector<CMat>& b);

struct ExperimentConfig {
    EnsembleSpec spec;
    std::vector<int> n_grid = {32, 64, 128};
    long samples = 20000;
    std::uint64_t master_seed = 1;
    double tolerance_sigmas = 4.0;
    // Coefficient of the N^{-1/2} drift allowance; negative means "use the
    // product of the operator norms of all factors at each N".
    double drift_constant = -1.0;
    int workers = 1;
    // Test hook: replace every conjugator by the identity, making the traces
    // deterministic.
    bool force_identity_conjugators = false;
};

// Per-sample traces of Y and Z under a shared conjugator draw.
struct TraceSamples {
    std::vector<cplx> tr_y;
    std::vector<cplx> tr_z;
};

TraceSamples sample_traces(const ExperimentConfig& config, int n);

// Plug-in covariance of the unnormalized traces with a jackknife error.
CumulantEstimate monte_carlo_cov(const ExperimentConfig& config, int n);

// |LHS - RHS| of the exact finite-N covariance decomposition over even
// partitions without mirrored pairs, both sides by exact enumeration over
// the conjugator group(s). Requires m1 = m2 = 1 and N small enough.
double exact_cov_decomposition_check(const EnsembleSpec& spec, int n);

struct ScanRow {
    int n = 0;
    CumulantEstimate estimate;
};

struct CumulantScanReport {
    int order = 0;
    std::vector<ScanRow> rows;
    double slope = 0.0;     // weighted log-log fit of |estimate| against N
    double slope_se = 0.0;  // standard error of the fitted slope
    bool all_consistent_with_zero = false;
    bool pass = false;  // slope <= 0.2 within its standard error
};

CumulantScanReport bounded_cumulant_scan(const ExperimentConfig& config, int order);

struct FluctRow {
    int n = 0;
    CumulantEstimate mc;
    cplx analytic = 0.0;
    double abs_err = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct FluctuationReport {
    ConjugatorCase conjugator = ConjugatorCase::Case1;
    int m1 = 1;
    int m2 = 1;
    long samples = 0;
    std::uint64_t seed = 0;
    std::vector<FluctRow> rows;
    double wall_seconds = 0.0;

    bool all_pass() const;
    std::string to_csv() const;
};

FluctuationReport run_experiment(const ExperimentConfig& config);

// Writes the report's CSV; throws IoError when the path is not writable.
void write_report_csv(const FluctuationReport& report, const std::string& path);

}  // namespace fluctmat
