#include "fluctmat/partition.hpp"

#include <complex>
#include <map>

#include "doctest.h"
#include "fluctmat/rng.hpp"

using namespace fluctmat;

namespace {

SetPartition make(const GroundSet& g, std::vector<std::vector<int>> blocks) { return {g, std::move(blocks)}; }

IndexTuple tuple_on(const GroundSet& g, std::vector<int> values, int n) { return {g, std::move(values), n}; }

}  // namespace

TEST_CASE("ground sets order elements by absolute value") {
    GroundSet g = GroundSet::signed_range(3);
    CHECK(g.elements() == std::vector<int>{-1, 1, -2, 2, -3, 3});
    CHECK(g.is_signed());
    CHECK(GroundSet::range(3).elements() == std::vector<int>{1, 2, 3});
    CHECK_FALSE(GroundSet::range(3).is_signed());
    CHECK_FALSE(GroundSet({1, -2, 2}).is_signed());
}

TEST_CASE("enumeration counts match Bell and double factorial") {
    CHECK(enumerate_partitions(GroundSet::range(3), PartitionFilter::All).size() == 5);
    CHECK(enumerate_partitions(GroundSet::range(4), PartitionFilter::Pairings).size() == 3);

    std::map<int, std::size_t> bell = {{1, 1}, {2, 2}, {3, 5}, {4, 15}, {5, 52}, {6, 203}};
    for (auto [n, count] : bell)
        CHECK(enumerate_partitions(GroundSet::range(n), PartitionFilter::All).size() == count);
    std::map<int, std::size_t> pairings = {{2, 1}, {4, 3}, {6, 15}, {8, 105}};
    for (auto [n, count] : pairings)
        CHECK(enumerate_partitions(GroundSet::range(n), PartitionFilter::Pairings).size() == count);
}

TEST_CASE("even filter agrees with a brute-force scan on [+-2]") {
    GroundSet g = GroundSet::signed_range(2);
    auto all = enumerate_partitions(g, PartitionFilter::All);
    CHECK(all.size() == 15);
    std::vector<SetPartition> brute;
    for (const auto& p : all)
        if (p.is_even()) brute.push_back(p);
    auto even = enumerate_partitions(g, PartitionFilter::Even);
    CHECK(even.size() == 4);
    CHECK(even == brute);
}

TEST_CASE("symmetric pairing enumeration matches a filtered scan") {
    for (int m = 1; m <= 3; ++m) {
        GroundSet g = GroundSet::signed_range(m);
        auto direct = enumerate_partitions(g, PartitionFilter::SymmetricPairings);
        std::vector<SetPartition> filtered;
        for (const auto& p : enumerate_partitions(g, PartitionFilter::Pairings))
            if (is_symmetric(p)) filtered.push_back(p);
        CHECK(direct == filtered);
    }
    CHECK_THROWS_AS(enumerate_partitions(GroundSet::range(4), PartitionFilter::SymmetricPairings),
                    SymmetryNeedsSignedGround);
}

TEST_CASE("enumeration cap") {
    CHECK_THROWS_AS(enumerate_partitions(GroundSet::range(13), PartitionFilter::All), GroundTooLarge);
    // pairing scans may opt into larger grounds
    auto big = enumerate_partitions(GroundSet::signed_range(7), PartitionFilter::SymmetricPairings, 14);
    CHECK(!big.empty());
}

TEST_CASE("refinement on the worked partitions") {
    GroundSet g({-1, 1, 2, -2, -3, 3});
    SetPartition pi1 = make(g, {{-1, -3, -2, 2}, {1, 3}});
    SetPartition pi2 = make(g, {{-1, -2}, {2}, {1, -3, 3}});
    SetPartition pi3 = make(g, {{-1, -3}, {1, 3}, {-2, 2}});
    CHECK(is_refinement(pi3, pi1));
    CHECK(is_refinement(pi1, pi1));
    CHECK(is_refinement(pi2, pi2));
    CHECK_FALSE(is_refinement(pi2, pi1));
    CHECK_FALSE(is_refinement(pi1, pi2));
    CHECK_FALSE(is_refinement(pi2, pi3));
    CHECK_FALSE(is_refinement(pi3, pi2));
    CHECK_THROWS_AS(is_refinement(pi1, SetPartition::one_block(GroundSet::range(2))), GroundMismatch);
}

TEST_CASE("mobius closed form") {
    GroundSet g2 = GroundSet::range(2);
    CHECK(mobius(SetPartition::singletons(g2), SetPartition::one_block(g2)) == -1);
    GroundSet g4 = GroundSet::range(4);
    CHECK(mobius(SetPartition::singletons(g4), SetPartition::one_block(g4)) == -6);
    SetPartition pi = make(g4, {{1, 2}, {3, 4}});
    CHECK(mobius(pi, pi) == 1);
    CHECK(mobius(SetPartition::one_block(g4), pi) == 0);
}

TEST_CASE("mobius convolution identity on small lattices") {
    for (int n = 1; n <= 4; ++n) {
        auto all = enumerate_partitions(GroundSet::range(n), PartitionFilter::All);
        for (const auto& eta : all)
            for (const auto& theta : all) {
                if (!is_refinement(eta, theta)) continue;
                std::int64_t sum = 0;
                for (const auto& pi : all)
                    if (is_refinement(eta, pi) && is_refinement(pi, theta)) sum += mobius(pi, theta);
                CHECK(sum == (eta == theta ? 1 : 0));
            }
    }
}

TEST_CASE("mobius inversion round trip with random data") {
    Xoshiro256 rng(42);
    auto all = enumerate_partitions(GroundSet::range(4), PartitionFilter::All);
    std::map<std::string, std::complex<double>> g_values;
    for (const auto& p : all) g_values[p.to_string()] = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    auto f_of = [&](const SetPartition& theta) {
        std::complex<double> acc = 0.0;
        for (const auto& p : all)
            if (is_refinement(theta, p)) acc += g_values[p.to_string()];
        return acc;
    };
    for (const auto& pi : all) {
        std::complex<double> recovered = 0.0;
        for (const auto& theta : all)
            if (is_refinement(pi, theta)) recovered += static_cast<double>(mobius(pi, theta)) * f_of(theta);
        CHECK(std::abs(recovered - g_values[pi.to_string()]) < 1e-12);
    }
}

TEST_CASE("kernel of the worked tuple") {
    GroundSet g = GroundSet::signed_range(3);
    IndexTuple j = tuple_on(g, {4, 1, 3, 4, 1, 4}, 4);  // (j_-1, j_1, j_-2, j_2, j_-3, j_3)
    CHECK(kernel(j) == make(g, {{-1, 2, 3}, {1, -3}, {-2}}));
    CHECK(kernel(tuple_on(g, {2, 2, 2, 2, 2, 2}, 3)) == SetPartition::one_block(g));
    CHECK(kernel(tuple_on(g, {1, 2, 3, 4, 5, 6}, 6)) == SetPartition::singletons(g));
}

TEST_CASE("kernel commutes with permutations the right way") {
    GroundSet g = GroundSet::signed_range(3);
    Xoshiro256 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 3 + static_cast<int>(rng.below(3));
        std::vector<int> values;
        for (int i = 0; i < g.size(); ++i) values.push_back(1 + static_cast<int>(rng.below(n)));
        IndexTuple j = tuple_on(g, values, n);

        // random permutation of the ground set
        std::vector<int> images = g.elements();
        for (int i = g.size() - 1; i > 0; --i) std::swap(images[i], images[rng.below(i + 1)]);
        SignedPermutationMap sigma(g, images);

        std::vector<int> composed;  // j o sigma
        for (int k : g.elements()) composed.push_back(j.value_of(sigma.apply(k)));
        CHECK(kernel(tuple_on(g, composed, n)) == apply_permutation(sigma.inverse(), kernel(j)));

        // random relabeling tau of the value space keeps the kernel
        std::vector<int> tau(n);
        for (int i = 0; i < n; ++i) tau[i] = i + 1;
        for (int i = n - 1; i > 0; --i) std::swap(tau[i], tau[rng.below(i + 1)]);
        std::vector<int> relabeled;
        for (int v : j.values()) relabeled.push_back(tau[v - 1]);
        CHECK(kernel(tuple_on(g, relabeled, n)) == kernel(j));
    }
}

TEST_CASE("permutation action preserves order and symmetry example") {
    GroundSet g = GroundSet::signed_range(3);
    SetPartition pi = make(g, {{-1, 2, 3}, {1, -3}, {-2}});
    CHECK(apply_permutation(SignedPermutationMap::identity(g), pi) == pi);
    CHECK(apply_permutation(SignedPermutationMap::negation(g), pi) == make(g, {{1, -2, -3}, {-1, 3}, {2}}));

    Xoshiro256 rng(11);
    auto all = enumerate_partitions(g, PartitionFilter::All, 12);
    for (int trial = 0; trial < 50; ++trial) {
        const SetPartition& a = all[rng.below(all.size())];
        const SetPartition& b = all[rng.below(all.size())];
        std::vector<int> images = g.elements();
        for (int i = g.size() - 1; i > 0; --i) std::swap(images[i], images[rng.below(i + 1)]);
        SignedPermutationMap sigma(g, images);
        CHECK(is_refinement(a, b) ==
              is_refinement(apply_permutation(sigma, a), apply_permutation(sigma, b)));
    }
}

TEST_CASE("symmetry predicate") {
    GroundSet g2 = GroundSet::signed_range(2);
    CHECK(is_symmetric(make(g2, {{-1, 1}, {-2, 2}})));
    CHECK(is_symmetric(make(g2, {{-1, 2}, {1, -2}})));
    CHECK_FALSE(is_symmetric(make(g2, {{-1, 1, 2}, {-2}})));
    CHECK_THROWS_AS(is_symmetric(SetPartition::one_block(GroundSet::range(2))), SymmetryNeedsSignedGround);
}

TEST_CASE("restrictions and parity views") {
    GroundSet g = GroundSet::signed_range(4);
    SetPartition pi = make(g, {{-1, 4}, {1, -3}, {-2, 3}, {2, -4}});
    CHECK(parity_restrict(pi, ParityPart::EvenElements) ==
          make(GroundSet({-2, 2, -4, 4}), {{4}, {-2}, {2, -4}}));
    CHECK(parity_restrict(pi, ParityPart::OddElements) ==
          make(GroundSet({-1, 1, -3, 3}), {{-1}, {1, -3}, {3}}));
    CHECK(parity_inflate(pi, ParityPart::EvenElements) ==
          make(GroundSet({-2, 2, -4, 4, -6, 6, -8, 8}), {{-2, 8}, {2, -6}, {-4, 6}, {4, -8}}));
    CHECK(parity_inflate(pi, ParityPart::OddElements) ==
          make(GroundSet({-1, 1, -3, 3, -5, 5, -7, 7}), {{-1, 7}, {1, -5}, {-3, 5}, {3, -7}}));

    CHECK(restrict_to(pi, g) == pi);
    CHECK_THROWS_AS(restrict_to(pi, GroundSet({5})), SubsetNotContained);

    SetPartition left = make(GroundSet({1, 2}), {{1, 2}});
    SetPartition right = make(GroundSet({3, 4}), {{3}, {4}});
    SetPartition both = disjoint_union(left, right);
    CHECK(restrict_to(both, GroundSet({1, 2})) == left);
    CHECK(restrict_to(both, GroundSet({3, 4})) == right);
    CHECK_THROWS_AS(disjoint_union(left, left), GroundsOverlap);
}
