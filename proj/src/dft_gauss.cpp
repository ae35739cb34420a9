#include "fluctmat/dft_gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fluctmat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t mod_positive(std::int64_t x, std::int64_t m) {
    std::int64_t r = x % m;
    return r < 0 ? r + m : r;
}

int half_even_size(const SetPartition& pi) {
    const GroundSet& g = pi.ground();
    int half = g.size() / 2;
    if (half % 2 != 0 || g != GroundSet::signed_range(half))
        throw WrongGroundSet("partition must live on [+-2m]");
    return half / 2;  // m
}

}  // namespace

QuadraticForm::QuadraticForm(int variables) : r_(variables), coeff_(variables * (variables + 1) / 2, 0) {}

int QuadraticForm::index(int t, int s) const {
    // row-major over pairs (t,s), 1 <= t <= s <= r; row t starts after the
    // r, r-1, ..., r-t+2 entries of the earlier rows
    return (t - 1) * (r_ + 1) - t * (t - 1) / 2 + (s - t);
}

std::int64_t QuadraticForm::coefficient(int t, int s) const {
    if (t > s) std::swap(t, s);
    return coeff_[index(t, s)];
}

void QuadraticForm::add_coefficient(int t, int s, std::int64_t v) {
    if (t > s) std::swap(t, s);
    coeff_[index(t, s)] += v;
}

bool QuadraticForm::is_zero() const {
    return std::all_of(coeff_.begin(), coeff_.end(), [](std::int64_t c) { return c == 0; });
}

std::int64_t QuadraticForm::evaluate_mod(const std::vector<std::int64_t>& x, std::int64_t modulus) const {
    std::int64_t acc = 0;
    for (int t = 1; t <= r_; ++t)
        for (int s = t; s <= r_; ++s) {
            std::int64_t c = coefficient(t, s);
            if (c == 0) continue;
            acc += mod_positive(c, modulus) * mod_positive(x[t - 1] * x[s - 1], modulus);
            acc = mod_positive(acc, modulus);
        }
    return acc;
}

CMat dft_matrix(int n) {
    CMat h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::int64_t e = static_cast<std::int64_t>(i) * j % n;
            double phi = -kTwoPi * static_cast<double>(e) / n;
            h(i, j) = cplx(std::cos(phi), std::sin(phi));
        }
    return h;
}

SignedPermutationMap two_block_sigma(int m1, int m2) {
    int m = m1 + m2;
    GroundSet ground = GroundSet::signed_range(2 * m);
    return SignedPermutationMap::from_function(ground, [m1, m](int k) {
        if (k < 0) return -k;  // -j is immediately followed by +j in both cycles
        if (k == 2 * m1) return -1;
        if (k == 2 * m) return -(2 * m1 + 1);
        return -(k + 1);
    });
}

TwoBlockShape make_two_block_shape(int m1, int m2) {
    if (m1 < 1 || m2 < 1) throw SpecInvalid("two-block shape needs m1, m2 >= 1");
    return TwoBlockShape{m1, m2, two_block_sigma(m1, m2)};
}

QuadraticForm partition_polynomial(const SetPartition& pi) {
    int m = half_even_size(pi);
    QuadraticForm p(pi.block_count());
    for (int k = 1; k <= 2 * m; ++k) {
        int t = pi.block_index_of(-k) + 1;
        int s = pi.block_index_of(k) + 1;
        p.add_coefficient(t, s, (k % 2 == 0) ? 1 : -1);
    }
    return p;
}

namespace {

// Sum over one interaction component by eliminating its last variable with a
// precomputed one-dimensional quadratic-sum table; cost N^(c-1) + N^2.
cplx component_sum(const QuadraticForm& p, const std::vector<int>& vars, int n,
                   const std::vector<cplx>& unit_roots) {
    const int c = static_cast<int>(vars.size());
    const int last = vars.back();
    std::vector<cplx> table(n, cplx(0.0));
    std::int64_t a_ll = mod_positive(p.coefficient(last, last), n);
    for (int residue = 0; residue < n; ++residue) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += unit_roots[static_cast<std::size_t>(mod_positive(a_ll * j % n * j + residue * j, n))];
        table[residue] = acc;
    }
    if (c == 1) return table[0];

    std::vector<std::int64_t> value(c - 1, 0);
    cplx total = 0.0;
    while (true) {
        std::int64_t quad = 0;  // form restricted to the first c-1 variables
        std::int64_t linear = 0;
        for (int ti = 0; ti < c - 1; ++ti) {
            for (int si = ti; si < c - 1; ++si)
                quad = mod_positive(quad + p.coefficient(vars[ti], vars[si]) * value[ti] % n * value[si], n);
            linear = mod_positive(linear + p.coefficient(vars[ti], last) * value[ti], n);
        }
        total += unit_roots[static_cast<std::size_t>(quad)] * table[static_cast<std::size_t>(linear)];
        int pos = c - 2;
        while (pos >= 0 && value[pos] == n - 1) value[pos--] = 0;
        if (pos < 0) break;
        ++value[pos];
    }
    return total;
}

cplx h_graph_sum_at_least(const SetPartition& pi, int n, double budget) {
    QuadraticForm p = partition_polynomial(pi);
    const int r = p.variables();
    if (p.is_zero()) return std::pow(static_cast<double>(n), r);

    // The sum factors over connected components of the variable-interaction
    // graph; variables untouched by the form contribute a factor N each.
    std::vector<int> comp(r + 1, -1);
    std::vector<std::vector<int>> groups;
    for (int t = 1; t <= r; ++t) {
        if (comp[t] != -1) continue;
        int id = static_cast<int>(groups.size());
        groups.push_back({});
        std::vector<int> stack{t};
        comp[t] = id;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            groups[id].push_back(u);
            for (int v = 1; v <= r; ++v)
                if (v != u && comp[v] == -1 && p.coefficient(u, v) != 0) {
                    comp[v] = id;
                    stack.push_back(v);
                }
        }
        std::sort(groups[id].begin(), groups[id].end());
    }

    double workload = 0;
    for (const auto& g : groups) workload += std::pow(static_cast<double>(n), static_cast<int>(g.size()) - 1) + n * n;
    if (workload > budget) throw BudgetExceeded("exponential sum workload exceeds budget");

    std::vector<cplx> unit_roots(n);
    for (int k = 0; k < n; ++k) {
        double phi = kTwoPi * k / n;
        unit_roots[k] = cplx(std::cos(phi), std::sin(phi));
    }

    cplx total = 1.0;
    for (const auto& g : groups) {
        bool touched = false;
        for (int v : g)
            for (int w = 1; w <= r && !touched; ++w)
                if (p.coefficient(std::min(v, w), std::max(v, w)) != 0) touched = true;
        if (!touched) {
            total *= static_cast<double>(n);  // free variable
            continue;
        }
        total *= component_sum(p, g, n, unit_roots);
    }
    return total;
}

}  // namespace

cplx h_graph_sum(const SetPartition& pi, int n, KernelConstraint constraint, double budget) {
    if (constraint == KernelConstraint::AtLeast) return h_graph_sum_at_least(pi, n, budget);
    // ker == pi via Moebius over the coarsenings theta >= pi
    const int r = pi.block_count();
    cplx total = 0.0;
    for_each_partition(
        GroundSet::range(r), PartitionFilter::All,
        [&](const SetPartition& grouping) {
            std::vector<std::vector<int>> blocks;
            for (const auto& group : grouping.blocks()) {
                std::vector<int> merged;
                for (int b : group) {
                    const auto& src = pi.blocks()[b - 1];
                    merged.insert(merged.end(), src.begin(), src.end());
                }
                blocks.push_back(std::move(merged));
            }
            SetPartition theta(pi.ground(), std::move(blocks));
            std::int64_t mu = 1;
            static constexpr std::int64_t factorial[9] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
            for (const auto& group : grouping.blocks()) {
                int g = static_cast<int>(group.size());
                std::int64_t term = factorial[g - 1];
                mu *= (g - 1) % 2 != 0 ? -term : term;
            }
            total += static_cast<double>(mu) * h_graph_sum_at_least(theta, n, budget);
            return true;
        },
        r);
    return total;
}

cplx gauss_sum(const GaussSumParams& p) {
    if (p.a == 0 || p.c == 0) throw ZeroModulus("gauss sum needs a != 0 and c != 0");
    if (mod_positive(p.a * p.c + p.b, 2) != 0) throw ParityViolation("gauss sum needs ac+b even");
    std::int64_t period = 2 * (p.c < 0 ? -p.c : p.c);  // exp(pi i x / c) has period 2|c| in x
    cplx total = 0.0;
    for (std::int64_t j = 0; j < period / 2; ++j) {
        std::int64_t e = mod_positive(p.a * j * j + p.b * j, period);
        double phi = std::numbers::pi * static_cast<double>(e) / static_cast<double>(p.c);
        total += cplx(std::cos(phi), std::sin(phi));
    }
    return total;
}

double reciprocity_residual(const GaussSumParams& p) {
    cplx lhs = gauss_sum(p);
    double ratio = std::sqrt(std::abs(static_cast<double>(p.c) / static_cast<double>(p.a)));
    double num = static_cast<double>(std::llabs(p.a * p.c)) - static_cast<double>(p.b) * p.b;
    double phase = std::numbers::pi * num / (4.0 * static_cast<double>(p.a) * static_cast<double>(p.c));
    cplx rhs = ratio * cplx(std::cos(phase), std::sin(phase)) * gauss_sum(GaussSumParams{-p.c, -p.b, p.a});
    return std::abs(lhs - rhs);
}

namespace {

// Builds a pairing from proposed blocks; rejects anything that is not a
// genuine symmetric pairing of the shape's ground set.
std::optional<SetPartition> pairing_from_blocks(const GroundSet& ground,
                                                const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> seen(ground.size(), 0);
    for (auto [a, b] : pairs) {
        if (a == b) return std::nullopt;
        int pa = ground.position_of(a), pb = ground.position_of(b);
        if (pa < 0 || pb < 0) return std::nullopt;
        ++seen[pa];
        ++seen[pb];
    }
    for (int count : seen)
        if (count != 1) return std::nullopt;
    std::vector<std::vector<int>> blocks;
    for (auto [a, b] : pairs) blocks.push_back({a, b});
    SetPartition p(ground, std::move(blocks));
    if (!is_symmetric(p)) return std::nullopt;
    return p;
}

}  // namespace

std::vector<SetPartition> classify_zero_pairings(const TwoBlockShape& shape) {
    const int m1 = shape.m1, m2 = shape.m2, m = m1 + m2;
    if (m > 4) throw ShapeTooLarge("classification is enumerated only up to m1+m2 <= 4");
    const SignedPermutationMap& sigma = shape.sigma;
    GroundSet ground = sigma.domain();
    std::set<SetPartition> found;

    auto emit = [&](const std::vector<std::pair<int, int>>& pairs) {
        if (auto p = pairing_from_blocks(ground, pairs)) found.insert(*p);
    };

    // crossing orbits, only when the two cycles have equal length
    if (m1 == m2) {
        for (int k = 1; k <= 2 * m2; ++k)
            for (int l = 2 * m1 + 1; l <= 2 * m; ++l) {
                std::vector<std::pair<int, int>> even_pairs, odd_pairs;
                for (int t = 1; t <= 4 * m1; ++t) {
                    even_pairs.push_back({sigma.power_apply(-k, t), sigma.power_apply(l, -t)});
                    odd_pairs.push_back({sigma.power_apply(-k, t), sigma.power_apply(-l, t)});
                }
                if ((k + l) % 2 == 0) emit(even_pairs);
                if ((k + l) % 2 != 0) emit(odd_pairs);
            }
    }

    // per-cycle building blocks
    auto mirrored_first = [&](int k) {  // {sigma^t(-k), sigma^-t(k)}, t = 1..2m1
        std::vector<std::pair<int, int>> pairs;
        for (int t = 1; t <= 2 * m1; ++t) pairs.push_back({sigma.power_apply(-k, t), sigma.power_apply(k, -t)});
        return pairs;
    };
    auto mirrored_second = [&](int l) {  // {sigma^t(-l), sigma^-t(l)}, t = 1..2m2
        std::vector<std::pair<int, int>> pairs;
        for (int t = 1; t <= 2 * m2; ++t) pairs.push_back({sigma.power_apply(-l, t), sigma.power_apply(l, -t)});
        return pairs;
    };
    auto shifted_first = [&]() {  // {sigma^t(-1), sigma^t(-m1-1)}, t = 1..2m1
        std::vector<std::pair<int, int>> pairs;
        for (int t = 1; t <= 2 * m1; ++t)
            pairs.push_back({sigma.power_apply(-1, t), sigma.power_apply(-m1 - 1, t)});
        return pairs;
    };
    auto shifted_second = [&]() {  // {sigma^t(-2m1-1), sigma^t(-2m1-m2-1)}, t = 1..2m2
        std::vector<std::pair<int, int>> pairs;
        for (int t = 1; t <= 2 * m2; ++t)
            pairs.push_back({sigma.power_apply(-2 * m1 - 1, t), sigma.power_apply(-2 * m1 - m2 - 1, t)});
        return pairs;
    };
    auto join = [](std::vector<std::pair<int, int>> a, const std::vector<std::pair<int, int>>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };

    for (int k = 1; k <= 2 * m1; ++k)
        for (int l = 2 * m1 + 1; l <= 2 * m; ++l) emit(join(mirrored_first(k), mirrored_second(l)));
    if (m1 % 2 != 0 && m2 % 2 != 0) emit(join(shifted_first(), shifted_second()));
    if (m2 % 2 != 0)
        for (int k = 1; k <= 2 * m1; ++k) emit(join(mirrored_first(k), shifted_second()));
    if (m1 % 2 != 0)
        for (int l = 2 * m1 + 1; l <= 2 * m; ++l) emit(join(shifted_first(), mirrored_second(l)));

    return {found.begin(), found.end()};
}

std::optional<SetPartition> minimal_zero_witness(const SetPartition& pi) {
    int m = half_even_size(pi);
    if (2 * m > 8) throw GroundTooLarge("witness search is enumerated only for 2m <= 8");
    if (!partition_polynomial(pi).is_zero()) return std::nullopt;

    const GroundSet& ground = pi.ground();
    const int n = ground.size();
    std::vector<int> partner(n, -1);
    std::vector<std::pair<int, int>> pairs;
    std::optional<SetPartition> witness;

    std::function<bool()> rec = [&]() -> bool {
        int first = -1;
        for (int pos = 0; pos < n; ++pos)
            if (partner[pos] < 0) {
                first = pos;
                break;
            }
        if (first < 0) {
            std::vector<std::vector<int>> blocks;
            for (auto [a, b] : pairs) blocks.push_back({ground.elements()[a], ground.elements()[b]});
            SetPartition theta(ground, std::move(blocks));
            if (is_symmetric(theta) && partition_polynomial(theta).is_zero()) {
                witness = theta;
                return false;  // stop at the first witness in canonical order
            }
            return true;
        }
        int first_block = pi.block_index_of(ground.elements()[first]);
        for (int pos = first + 1; pos < n; ++pos) {
            if (partner[pos] >= 0) continue;
            if (pi.block_index_of(ground.elements()[pos]) != first_block) continue;  // keep theta <= pi
            partner[first] = pos;
            partner[pos] = first;
            pairs.emplace_back(first, pos);
            bool keep = rec();
            pairs.pop_back();
            partner[first] = partner[pos] = -1;
            if (!keep) return false;
        }
        return true;
    };
    rec();
    return witness;
}

}  // namespace fluctmat
