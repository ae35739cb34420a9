#include "fluctmat/graph_sum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fluctmat {

namespace {

int half_size_of_signed_ground(const SetPartition& pi) {
    const GroundSet& g = pi.ground();
    int m = g.size() / 2;
    if (g != GroundSet::signed_range(m)) throw WrongGroundSet("partition must live on [+-m]");
    return m;
}

struct Adjacency {
    // per vertex: list of (edge id, other endpoint); loops appear once
    std::vector<std::vector<std::pair<int, int>>> at;
    std::vector<int> loop_count;  // loops per vertex
};

Adjacency adjacency_of(const PairGraph& g) {
    Adjacency adj;
    adj.at.resize(g.vertex_count);
    adj.loop_count.assign(g.vertex_count, 0);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        auto [tail, head] = g.edges[e];
        if (tail == head) {
            ++adj.loop_count[tail];
            continue;
        }
        adj.at[tail].push_back({e, head});
        adj.at[head].push_back({e, tail});
    }
    return adj;
}

}  // namespace

PairGraph build_graph(const SetPartition& pi) {
    int m = half_size_of_signed_ground(pi);
    PairGraph g;
    g.vertex_count = pi.block_count();
    g.edges.reserve(m);
    for (int k = 1; k <= m; ++k) g.edges.push_back({pi.block_index_of(k), pi.block_index_of(-k)});
    return g;
}

ForestSummary analyze_graph(const PairGraph& graph) {
    const int n = graph.vertex_count;
    Adjacency adj = adjacency_of(graph);

    // bridges by DFS low-link; the entering edge is skipped by id, so
    // parallel edges correctly cancel each other (a doubled edge is no bridge)
    std::vector<int> disc(n, -1), low(n, 0);
    std::vector<bool> is_bridge(graph.edges.size(), false);
    int timer = 0;
    std::function<void(int, int)> dfs = [&](int u, int parent_edge) {
        disc[u] = low[u] = timer++;
        for (auto [eid, v] : adj.at[u]) {
            if (eid == parent_edge) continue;
            if (disc[v] == -1) {
                dfs(v, eid);
                low[u] = std::min(low[u], low[v]);
                if (low[v] > disc[u]) is_bridge[eid] = true;
            } else {
                low[u] = std::min(low[u], disc[v]);
            }
        }
    };
    for (int v = 0; v < n; ++v)
        if (disc[v] == -1) dfs(v, -1);

    ForestSummary out;
    for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e)
        if (is_bridge[e]) out.bridges.push_back(e);

    // two-edge-connected components = components after removing bridges
    std::vector<int> comp(n, -1);
    int comp_count = 0;
    for (int start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        std::vector<int> stack{start};
        comp[start] = comp_count;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [eid, v] : adj.at[u]) {
                if (is_bridge[eid] || comp[v] != -1) continue;
                comp[v] = comp_count;
                stack.push_back(v);
            }
        }
        ++comp_count;
    }
    out.components.resize(comp_count);
    for (int v = 0; v < n; ++v) out.components[comp[v]].push_back(v);

    // quotient forest degrees and the exponent
    std::vector<int> degree(comp_count, 0);
    for (int e : out.bridges) {
        ++degree[comp[graph.edges[e].first]];
        ++degree[comp[graph.edges[e].second]];
    }
    HalfInt tau;
    for (int c = 0; c < comp_count; ++c) {
        if (degree[c] == 1)
            tau += HalfInt(1);
        else if (degree[c] == 0)
            tau += HalfInt(2);
    }
    out.exponent = tau;
    return out;
}

HalfInt graph_sum_exponent(const SetPartition& pi) { return analyze_graph(build_graph(pi)).exponent; }

cplx evaluate_graph_sum(const SetPartition& pi, const std::vector<CMat>& matrices, KernelConstraint constraint,
                        double budget) {
    int m = half_size_of_signed_ground(pi);
    if (static_cast<int>(matrices.size()) != m)
        throw DimensionMismatch("need one matrix per edge label");
    const int n = static_cast<int>(matrices.front().rows());
    for (const auto& a : matrices)
        if (a.rows() != n || a.cols() != n) throw DimensionMismatch("matrices must all be N x N");

    const int r = pi.block_count();
    if (std::pow(static_cast<double>(n), r) > budget)
        throw BudgetExceeded("graph sum needs N^{#blocks} > budget summands");

    PairGraph g = build_graph(pi);
    std::vector<int> value(r, 0);  // block values, 0-based
    cplx total = 0.0;
    while (true) {
        bool admissible = true;
        if (constraint == KernelConstraint::Exactly) {
            for (int a = 0; a < r && admissible; ++a)
                for (int b = a + 1; b < r; ++b)
                    if (value[a] == value[b]) {
                        admissible = false;
                        break;
                    }
        }
        if (admissible) {
            cplx term = 1.0;
            for (int e = 0; e < m; ++e) term *= matrices[e](value[g.edges[e].second], value[g.edges[e].first]);
            total += term;
        }
        int pos = r - 1;
        while (pos >= 0 && value[pos] == n - 1) value[pos--] = 0;
        if (pos < 0) break;
        ++value[pos];
    }
    return total;
}

TraceExpression factor_graph_sum(const SetPartition& pi) {
    PairGraph g = build_graph(pi);
    Adjacency adj = adjacency_of(g);
    const int n = g.vertex_count;

    // connected components including loop-only vertices
    std::vector<int> comp(n, -1);
    int comp_count = 0;
    for (int start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        std::vector<int> stack{start};
        comp[start] = comp_count;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [eid, v] : adj.at[u])
                if (comp[v] == -1) {
                    comp[v] = comp_count;
                    stack.push_back(v);
                }
        }
        ++comp_count;
    }
    std::vector<std::vector<int>> comp_vertices(comp_count);
    for (int v = 0; v < n; ++v) comp_vertices[comp[v]].push_back(v);

    TraceExpression expr;
    for (const auto& vertices : comp_vertices) {
        if (vertices.size() == 1) {
            int v = vertices.front();
            TraceFactor f;
            f.kind = TraceFactor::Kind::Loop;
            for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
                if (g.edges[e].first == v && g.edges[e].second == v) f.loop.push_back(e + 1);
            expr.factors.push_back(std::move(f));
            continue;
        }
        for (int v : vertices) {
            if (adj.loop_count[v] > 0) throw NotCycleOrLoop("cycle component carries a loop");
            if (adj.at[v].size() != 2) throw NotCycleOrLoop("cycle component has a vertex of degree != 2");
        }
        // unfold the cycle starting at the canonically least block, taking
        // the incident edge with the smaller label first
        int start = *std::min_element(vertices.begin(), vertices.end());
        auto first_step = adj.at[start][0].first < adj.at[start][1].first ? adj.at[start][0] : adj.at[start][1];
        TraceFactor f;
        f.kind = TraceFactor::Kind::Cycle;
        int current = start;
        int eid = first_step.first;
        int next = first_step.second;
        while (true) {
            bool transposed = g.edges[eid].second != current;  // head here means plain
            f.cycle.push_back({eid + 1, transposed});
            if (next == start) break;
            auto& choices = adj.at[next];
            auto other = choices[0].first == eid ? choices[1] : choices[0];
            current = next;
            eid = other.first;
            next = other.second;
        }
        expr.factors.push_back(std::move(f));
    }
    std::sort(expr.factors.begin(), expr.factors.end(), [](const TraceFactor& a, const TraceFactor& b) {
        int la = a.kind == TraceFactor::Kind::Cycle ? a.cycle.front().first : a.loop.front();
        int lb = b.kind == TraceFactor::Kind::Cycle ? b.cycle.front().first : b.loop.front();
        return la < lb;
    });
    return expr;
}

cplx evaluate_trace_expression(const TraceExpression& expr, const std::vector<CMat>& matrices) {
    cplx total = 1.0;
    for (const auto& f : expr.factors) {
        if (f.kind == TraceFactor::Kind::Loop) {
            const int n = static_cast<int>(matrices.at(f.loop.front() - 1).rows());
            cplx sum = 0.0;
            for (int j = 0; j < n; ++j) {
                cplx term = 1.0;
                for (int label : f.loop) term *= matrices.at(label - 1)(j, j);
                sum += term;
            }
            total *= sum;
        } else {
            CMat prod;
            bool first = true;
            for (auto [label, transposed] : f.cycle) {
                CMat factor = transposed ? matrices.at(label - 1).transpose() : matrices.at(label - 1);
                prod = first ? factor : CMat(prod * factor);
                first = false;
            }
            total *= prod.trace();
        }
    }
    return total;
}

double operator_norm(const CMat& a) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 0.0;
    CMat b = a.adjoint() * a;  // Hermitian PSD with top eigenvalue ||a||^2
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(1.0 + i / (2.0 * n), 0.3 + 0.1 * i);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXcd w = b * v;
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        w /= lambda;
        double residual = (b * w - lambda * w).norm();
        v = w;
        if (residual <= 1e-10 * std::max(1.0, lambda)) break;
    }
    return std::sqrt(lambda);
}

}  // namespace fluctmat
