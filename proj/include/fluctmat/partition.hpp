#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fluctmat/errors.hpp"

namespace fluctmat {

// Elements of signed ground sets are ordered -1, +1, -2, +2, ...; for plain
// positive ground sets this coincides with the usual order. All canonical
// forms below use this order.
inline bool abs_less(int a, int b) {
    int aa = a < 0 ? -a : a;
    int bb = b < 0 ? -b : b;
    return aa != bb ? aa < bb : a < b;
}

// A finite set of distinct nonzero integers, e.g. {1..m} or {-1,1,...,-m,m}.
class GroundSet {
  public:
    GroundSet() = default;
    explicit GroundSet(std::vector<int> elements);

    // {1, 2, ..., m}
    static GroundSet range(int m);
    // {-1, 1, -2, 2, ..., -m, m}
    static GroundSet signed_range(int m);

    const std::vector<int>& elements() const { return elements_; }
    int size() const { return static_cast<int>(elements_.size()); }
    bool empty() const { return elements_.empty(); }
    bool is_signed() const { return is_signed_; }
    bool contains(int k) const { return position_of(k) >= 0; }
    // Position of k in canonical order; -1 if absent.
    int position_of(int k) const;

    friend bool operator==(const GroundSet& a, const GroundSet& b) { return a.elements_ == b.elements_; }
    friend bool operator!=(const GroundSet& a, const GroundSet& b) { return !(a == b); }

  private:
    std::vector<int> elements_;  // sorted by abs_less
    bool is_signed_ = false;
};

// A set partition with canonical block form: elements inside a block sorted
// by abs_less, blocks sorted by their least element. Equality is structural.
class SetPartition {
  public:
    SetPartition() = default;
    SetPartition(GroundSet ground, std::vector<std::vector<int>> blocks);

    static SetPartition singletons(const GroundSet& ground);
    static SetPartition one_block(const GroundSet& ground);

    const GroundSet& ground() const { return ground_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    // Index of the block containing k (throws if k not in the ground set).
    int block_index_of(int k) const;
    bool same_block(int k, int l) const { return block_index_of(k) == block_index_of(l); }

    bool is_even() const;     // all blocks of even size
    bool is_pairing() const;  // all blocks of size exactly 2

    std::string to_string() const;

    friend bool operator==(const SetPartition& a, const SetPartition& b) {
        return a.ground_ == b.ground_ && a.blocks_ == b.blocks_;
    }
    friend bool operator!=(const SetPartition& a, const SetPartition& b) { return !(a == b); }
    friend bool operator<(const SetPartition& a, const SetPartition& b) { return a.blocks_ < b.blocks_; }

    friend std::ostream& operator<<(std::ostream& os, const SetPartition& p) { return os << p.to_string(); }

  private:
    GroundSet ground_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_position_;  // ground position -> block index
};

// A function from a ground set into {1..N}, stored in ground order.
class IndexTuple {
  public:
    IndexTuple() = default;
    IndexTuple(GroundSet domain, std::vector<int> values, int n);

    const GroundSet& domain() const { return domain_; }
    int n() const { return n_; }
    const std::vector<int>& values() const { return values_; }
    int value_of(int k) const;

    friend bool operator==(const IndexTuple& a, const IndexTuple& b) {
        return a.domain_ == b.domain_ && a.values_ == b.values_ && a.n_ == b.n_;
    }

  private:
    GroundSet domain_;
    std::vector<int> values_;
    int n_ = 0;
};

// A bijection of a ground set onto itself, e.g. k -> -k or the cyclic shifts
// used for two-block shapes.
class SignedPermutationMap {
  public:
    SignedPermutationMap() = default;
    SignedPermutationMap(GroundSet domain, std::vector<int> images);

    static SignedPermutationMap identity(const GroundSet& domain);
    // k -> -k on a signed ground set.
    static SignedPermutationMap negation(const GroundSet& domain);
    // Build from an arbitrary callable.
    static SignedPermutationMap from_function(const GroundSet& domain, const std::function<int(int)>& f);

    const GroundSet& domain() const { return domain_; }
    int apply(int k) const;
    SignedPermutationMap inverse() const;
    SignedPermutationMap then(const SignedPermutationMap& outer) const;  // outer after this
    // Iterated application sigma^t (t may be negative).
    int power_apply(int k, long t) const;

  private:
    GroundSet domain_;
    std::vector<int> images_;  // aligned with domain order
};

enum class PartitionFilter { All, Even, Pairings, SymmetricPairings };

inline constexpr int kDefaultEnumerationCap = 12;

// Visits each qualifying partition once in canonical order. The visitor
// returns false to stop early. The cap guards the restricted-growth scan;
// pairing filters use a pair-recursive scan and admit larger grounds.
void for_each_partition(const GroundSet& ground, PartitionFilter filter,
                        const std::function<bool(const SetPartition&)>& visit,
                        int cap = kDefaultEnumerationCap);

std::vector<SetPartition> enumerate_partitions(const GroundSet& ground, PartitionFilter filter,
                                               int cap = kDefaultEnumerationCap);

// true iff every block of pi is contained in some block of theta.
bool is_refinement(const SetPartition& pi, const SetPartition& theta);

// Moebius function of the partition lattice: for pi <= theta the product of
// (-1)^(m_k - 1) (m_k - 1)! over blocks of theta, where block k of theta
// splits into m_k blocks of pi; 0 when pi is not a refinement of theta.
std::int64_t mobius(const SetPartition& pi, const SetPartition& theta);

// The partition whose blocks are the level sets of the tuple.
SetPartition kernel(const IndexTuple& tuple);

// Blocks {sigma(B) : B in pi}.
SetPartition apply_permutation(const SignedPermutationMap& sigma, const SetPartition& pi);

// k ~ l implies -k ~ -l; equivalently the negation map fixes the partition.
bool is_symmetric(const SetPartition& pi);

// Drops elements outside subset, deleting emptied blocks.
SetPartition restrict_to(const SetPartition& pi, const GroundSet& subset);

// Concatenates the blocks of two partitions on disjoint grounds.
SetPartition disjoint_union(const SetPartition& a, const SetPartition& b);

enum class ParityPart { EvenElements, OddElements };

// Restriction of pi to the even (odd) elements of its ground set.
SetPartition parity_restrict(const SetPartition& pi, ParityPart part);

// Relabeled copies on doubled ground sets: k -> 2k, or k -> 2k - sign(k).
SetPartition parity_inflate(const SetPartition& pi, ParityPart part);

}  // namespace fluctmat
