#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluctmat/partition.hpp"
#include "fluctmat/rational.hpp"

namespace fluctmat {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

// The multigraph of a partition of [+-m]: one vertex per block, one edge per
// k in [m] joining the block of +k to the block of -k, directed +k -> -k.
struct PairGraph {
    int vertex_count = 0;
    // edges[k] = {tail, head} = {block of +(k+1), block of -(k+1)}
    std::vector<std::pair<int, int>> edges;
};

// Bridges, two-edge-connected components and the resulting exponent.
struct ForestSummary {
    std::vector<std::vector<int>> components;  // vertex sets of the quotient forest
    std::vector<int> bridges;                  // edge indices (0-based)
    HalfInt exponent;
};

struct TraceFactor {
    enum class Kind { Cycle, Loop };
    Kind kind = Kind::Loop;
    // Cycle: matrix labels (1-based) in product order with a transpose flag.
    std::vector<std::pair<int, bool>> cycle;
    // Loop: labels whose entrywise product is traced.
    std::vector<int> loop;
};

struct TraceExpression {
    std::vector<TraceFactor> factors;
};

enum class KernelConstraint { AtLeast, Exactly };

inline constexpr double kDefaultGraphSumBudget = 1e8;

PairGraph build_graph(const SetPartition& pi);

ForestSummary analyze_graph(const PairGraph& graph);

HalfInt graph_sum_exponent(const SetPartition& pi);

// Sum over index tuples j with ker(j) >= pi (or == pi) of the entry product
// prod_k A_k(j_{-k}, j_{+k}). Matrices must all be N x N with m = |edges|.
cplx evaluate_graph_sum(const SetPartition& pi, const std::vector<CMat>& matrices, KernelConstraint constraint,
                        double budget = kDefaultGraphSumBudget);

// Decomposes the graph sum into a product of traces; requires every
// component of the directed graph to be a cycle or a bouquet of loops.
TraceExpression factor_graph_sum(const SetPartition& pi);

cplx evaluate_trace_expression(const TraceExpression& expr, const std::vector<CMat>& matrices);

// Largest singular value by power iteration on A*A (1e-10 residual, 10k cap).
double operator_norm(const CMat& a);

}  // namespace fluctmat
