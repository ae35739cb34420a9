#include "fluctmat/partition.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace fluctmat {

namespace {

void sort_canonical(std::vector<int>& v) { std::sort(v.begin(), v.end(), abs_less); }

}  // namespace

GroundSet::GroundSet(std::vector<int> elements) : elements_(std::move(elements)) {
    sort_canonical(elements_);
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i] == 0) throw SpecInvalid("ground set elements must be nonzero");
        if (i > 0 && elements_[i] == elements_[i - 1]) throw SpecInvalid("ground set elements must be distinct");
    }
    is_signed_ = !elements_.empty();
    for (int k : elements_) {
        if (!std::binary_search(elements_.begin(), elements_.end(), -k, abs_less)) {
            is_signed_ = false;
            break;
        }
    }
}

GroundSet GroundSet::range(int m) {
    std::vector<int> v;
    for (int k = 1; k <= m; ++k) v.push_back(k);
    return GroundSet(std::move(v));
}

GroundSet GroundSet::signed_range(int m) {
    std::vector<int> v;
    for (int k = 1; k <= m; ++k) {
        v.push_back(-k);
        v.push_back(k);
    }
    return GroundSet(std::move(v));
}

int GroundSet::position_of(int k) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), k, abs_less);
    if (it == elements_.end() || *it != k) return -1;
    return static_cast<int>(it - elements_.begin());
}

SetPartition::SetPartition(GroundSet ground, std::vector<std::vector<int>> blocks)
    : ground_(std::move(ground)), blocks_(std::move(blocks)) {
    for (auto& b : blocks_) {
        if (b.empty()) throw SpecInvalid("partition blocks must be nonempty");
        sort_canonical(b);
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) { return abs_less(a.front(), b.front()); });
    block_of_position_.assign(ground_.size(), -1);
    int covered = 0;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        for (int k : blocks_[bi]) {
            int pos = ground_.position_of(k);
            if (pos < 0) throw SpecInvalid("partition block element outside ground set");
            if (block_of_position_[pos] != -1) throw SpecInvalid("partition blocks overlap");
            block_of_position_[pos] = static_cast<int>(bi);
            ++covered;
        }
    }
    if (covered != ground_.size()) throw SpecInvalid("partition blocks do not cover the ground set");
}

SetPartition SetPartition::singletons(const GroundSet& ground) {
    std::vector<std::vector<int>> blocks;
    for (int k : ground.elements()) blocks.push_back({k});
    return SetPartition(ground, std::move(blocks));
}

SetPartition SetPartition::one_block(const GroundSet& ground) {
    return SetPartition(ground, {ground.elements()});
}

int SetPartition::block_index_of(int k) const {
    int pos = ground_.position_of(k);
    if (pos < 0) throw GroundMismatch("element not in the partition's ground set");
    return block_of_position_[pos];
}

bool SetPartition::is_even() const {
    for (const auto& b : blocks_)
        if (b.size() % 2 != 0) return false;
    return true;
}

bool SetPartition::is_pairing() const {
    for (const auto& b : blocks_)
        if (b.size() != 2) return false;
    return true;
}

std::string SetPartition::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        if (bi) os << ',';
        os << '{';
        for (std::size_t i = 0; i < blocks_[bi].size(); ++i) {
            if (i) os << ',';
            os << blocks_[bi][i];
        }
        os << '}';
    }
    os << '}';
    return os.str();
}

IndexTuple::IndexTuple(GroundSet domain, std::vector<int> values, int n)
    : domain_(std::move(domain)), values_(std::move(values)), n_(n) {
    if (static_cast<int>(values_.size()) != domain_.size())
        throw SpecInvalid("index tuple values must match the domain size");
    for (int v : values_)
        if (v < 1 || v > n_) throw SpecInvalid("index tuple values must lie in 1..N");
}

int IndexTuple::value_of(int k) const {
    int pos = domain_.position_of(k);
    if (pos < 0) throw GroundMismatch("element not in the tuple's domain");
    return values_[pos];
}

SignedPermutationMap::SignedPermutationMap(GroundSet domain, std::vector<int> images)
    : domain_(std::move(domain)), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != domain_.size())
        throw SpecInvalid("permutation images must match the domain size");
    std::vector<bool> hit(images_.size(), false);
    for (int img : images_) {
        int pos = domain_.position_of(img);
        if (pos < 0) throw SpecInvalid("permutation image outside the domain");
        if (hit[pos]) throw SpecInvalid("permutation images must be a bijection");
        hit[pos] = true;
    }
}

SignedPermutationMap SignedPermutationMap::identity(const GroundSet& domain) {
    return SignedPermutationMap(domain, domain.elements());
}

SignedPermutationMap SignedPermutationMap::negation(const GroundSet& domain) {
    if (!domain.is_signed()) throw SymmetryNeedsSignedGround("negation needs a signed ground set");
    std::vector<int> images;
    for (int k : domain.elements()) images.push_back(-k);
    return SignedPermutationMap(domain, std::move(images));
}

SignedPermutationMap SignedPermutationMap::from_function(const GroundSet& domain,
                                                         const std::function<int(int)>& f) {
    std::vector<int> images;
    for (int k : domain.elements()) images.push_back(f(k));
    return SignedPermutationMap(domain, std::move(images));
}

int SignedPermutationMap::apply(int k) const {
    int pos = domain_.position_of(k);
    if (pos < 0) throw GroundMismatch("element not in the permutation's domain");
    return images_[pos];
}

SignedPermutationMap SignedPermutationMap::inverse() const {
    std::vector<int> inv(images_.size());
    for (int pos = 0; pos < static_cast<int>(images_.size()); ++pos)
        inv[domain_.position_of(images_[pos])] = domain_.elements()[pos];
    return SignedPermutationMap(domain_, std::move(inv));
}

SignedPermutationMap SignedPermutationMap::then(const SignedPermutationMap& outer) const {
    if (domain_ != outer.domain_) throw GroundMismatch("composed permutations need equal domains");
    std::vector<int> images;
    for (int k : domain_.elements()) images.push_back(outer.apply(apply(k)));
    return SignedPermutationMap(domain_, std::move(images));
}

int SignedPermutationMap::power_apply(int k, long t) const {
    if (t >= 0) {
        for (long i = 0; i < t; ++i) k = apply(k);
        return k;
    }
    SignedPermutationMap inv = inverse();
    for (long i = 0; i < -t; ++i) k = inv.apply(k);
    return k;
}

namespace {

bool partition_passes(const SetPartition& p, PartitionFilter filter) {
    switch (filter) {
        case PartitionFilter::All:
            return true;
        case PartitionFilter::Even:
            return p.is_even();
        case PartitionFilter::Pairings:
            return p.is_pairing();
        case PartitionFilter::SymmetricPairings:
            return p.is_pairing() && is_symmetric(p);
    }
    return false;
}

// Restricted-growth enumeration over ground positions in canonical order;
// block ids appear in first-use order, which matches the canonical block
// order, so partitions come out already canonical and sorted.
bool enumerate_rgs(const GroundSet& ground, PartitionFilter filter,
                   const std::function<bool(const SetPartition&)>& visit) {
    const int n = ground.size();
    std::vector<int> assign(n, 0);
    std::function<bool(int, int)> rec = [&](int i, int used) -> bool {
        if (i == n) {
            std::vector<std::vector<int>> bl(used);
            for (int pos = 0; pos < n; ++pos) bl[assign[pos]].push_back(ground.elements()[pos]);
            SetPartition p(ground, std::move(bl));
            if (partition_passes(p, filter)) return visit(p);
            return true;
        }
        for (int b = 0; b <= used && b < n; ++b) {
            assign[i] = b;
            if (!rec(i + 1, std::max(used, b + 1))) return false;
        }
        return true;
    };
    return rec(0, 0);
}

// Recursive pairing enumeration: repeatedly pair the least unpaired element
// with each later one. For symmetric pairings the mirrored pair {-a,-b} is
// forced immediately, which prunes the search to the symmetric subtree only.
bool enumerate_pairings(const GroundSet& ground, bool symmetric_only,
                        const std::function<bool(const SetPartition&)>& visit) {
    const int n = ground.size();
    if (n % 2 != 0) return true;  // no pairings of an odd set
    std::vector<int> partner(n, -1);
    std::vector<std::pair<int, int>> pairs;

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
            SetPartition p(ground, std::move(blocks));
            return visit(p);
        }
        for (int pos = first + 1; pos < n; ++pos) {
            if (partner[pos] >= 0) continue;
            if (!symmetric_only) {
                partner[first] = pos;
                partner[pos] = first;
                pairs.emplace_back(first, pos);
                bool keep = rec();
                pairs.pop_back();
                partner[first] = partner[pos] = -1;
                if (!keep) return false;
                continue;
            }
            // force the mirrored pair
            int a = ground.elements()[first], b = ground.elements()[pos];
            int na = ground.position_of(-a), nb = ground.position_of(-b);
            bool self_mirrored = (na == pos);  // pair {k,-k}
            if (self_mirrored) {
                partner[first] = pos;
                partner[pos] = first;
                pairs.emplace_back(first, pos);
                bool keep = rec();
                pairs.pop_back();
                partner[first] = partner[pos] = -1;
                if (!keep) return false;
                continue;
            }
            if (partner[na] >= 0 || partner[nb] >= 0 || na == first || nb == first || nb == pos) continue;
            partner[first] = pos;
            partner[pos] = first;
            partner[na] = nb;
            partner[nb] = na;
            pairs.emplace_back(first, pos);
            pairs.emplace_back(std::min(na, nb), std::max(na, nb));
            bool keep = rec();
            pairs.pop_back();
            pairs.pop_back();
            partner[first] = partner[pos] = partner[na] = partner[nb] = -1;
            if (!keep) return false;
        }
        return true;
    };
    return rec();
}

}  // namespace

void for_each_partition(const GroundSet& ground, PartitionFilter filter,
                        const std::function<bool(const SetPartition&)>& visit, int cap) {
    if (ground.size() > cap)
        throw GroundTooLarge("ground set of size " + std::to_string(ground.size()) +
                             " exceeds the enumeration cap " + std::to_string(cap));
    if (filter == PartitionFilter::SymmetricPairings && !ground.is_signed())
        throw SymmetryNeedsSignedGround("symmetric pairings need a signed ground set");
    if (ground.empty()) return;
    if (filter == PartitionFilter::Pairings || filter == PartitionFilter::SymmetricPairings) {
        enumerate_pairings(ground, filter == PartitionFilter::SymmetricPairings, visit);
        return;
    }
    enumerate_rgs(ground, filter, visit);
}

std::vector<SetPartition> enumerate_partitions(const GroundSet& ground, PartitionFilter filter, int cap) {
    std::vector<SetPartition> out;
    for_each_partition(
        ground, filter,
        [&](const SetPartition& p) {
            out.push_back(p);
            return true;
        },
        cap);
    return out;
}

bool is_refinement(const SetPartition& pi, const SetPartition& theta) {
    if (pi.ground() != theta.ground()) throw GroundMismatch("refinement needs equal ground sets");
    for (const auto& b : pi.blocks()) {
        int target = theta.block_index_of(b.front());
        for (int k : b)
            if (theta.block_index_of(k) != target) return false;
    }
    return true;
}

std::int64_t mobius(const SetPartition& pi, const SetPartition& theta) {
    if (pi.ground() != theta.ground()) throw GroundMismatch("mobius needs equal ground sets");
    if (!is_refinement(pi, theta)) return 0;
    static constexpr std::array<std::int64_t, 12> factorial = {1,   1,    2,     6,      24,      120,
                                                               720, 5040, 40320, 362880, 3628800, 39916800};
    std::vector<int> split_count(theta.block_count(), 0);
    for (const auto& b : pi.blocks()) ++split_count[theta.block_index_of(b.front())];
    std::int64_t result = 1;
    for (int mk : split_count) {
        std::int64_t term = factorial[mk - 1];
        if ((mk - 1) % 2 != 0) term = -term;
        result *= term;
    }
    return result;
}

SetPartition kernel(const IndexTuple& tuple) {
    std::map<int, std::vector<int>> levels;
    for (int pos = 0; pos < tuple.domain().size(); ++pos)
        levels[tuple.values()[pos]].push_back(tuple.domain().elements()[pos]);
    std::vector<std::vector<int>> blocks;
    for (auto& [value, block] : levels) blocks.push_back(std::move(block));
    return SetPartition(tuple.domain(), std::move(blocks));
}

SetPartition apply_permutation(const SignedPermutationMap& sigma, const SetPartition& pi) {
    if (sigma.domain() != pi.ground()) throw GroundMismatch("permutation and partition grounds differ");
    std::vector<std::vector<int>> blocks;
    for (const auto& b : pi.blocks()) {
        std::vector<int> nb;
        for (int k : b) nb.push_back(sigma.apply(k));
        blocks.push_back(std::move(nb));
    }
    return SetPartition(pi.ground(), std::move(blocks));
}

bool is_symmetric(const SetPartition& pi) {
    if (!pi.ground().is_signed()) throw SymmetryNeedsSignedGround("symmetry needs a signed ground set");
    return apply_permutation(SignedPermutationMap::negation(pi.ground()), pi) == pi;
}

SetPartition restrict_to(const SetPartition& pi, const GroundSet& subset) {
    for (int k : subset.elements())
        if (!pi.ground().contains(k)) throw SubsetNotContained("restriction subset must lie inside the ground set");
    std::vector<std::vector<int>> blocks;
    for (const auto& b : pi.blocks()) {
        std::vector<int> nb;
        for (int k : b)
            if (subset.contains(k)) nb.push_back(k);
        if (!nb.empty()) blocks.push_back(std::move(nb));
    }
    return SetPartition(subset, std::move(blocks));
}

SetPartition disjoint_union(const SetPartition& a, const SetPartition& b) {
    for (int k : b.ground().elements())
        if (a.ground().contains(k)) throw GroundsOverlap("disjoint union needs disjoint grounds");
    std::vector<int> elems = a.ground().elements();
    elems.insert(elems.end(), b.ground().elements().begin(), b.ground().elements().end());
    std::vector<std::vector<int>> blocks = a.blocks();
    blocks.insert(blocks.end(), b.blocks().begin(), b.blocks().end());
    return SetPartition(GroundSet(std::move(elems)), std::move(blocks));
}

SetPartition parity_restrict(const SetPartition& pi, ParityPart part) {
    std::vector<int> keep;
    for (int k : pi.ground().elements()) {
        bool even = (k % 2) == 0;
        if ((part == ParityPart::EvenElements) == even) keep.push_back(k);
    }
    return restrict_to(pi, GroundSet(std::move(keep)));
}

SetPartition parity_inflate(const SetPartition& pi, ParityPart part) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> elems;
    for (const auto& b : pi.blocks()) {
        std::vector<int> nb;
        for (int k : b) {
            int img = part == ParityPart::EvenElements ? 2 * k : 2 * k - (k > 0 ? 1 : -1);
            nb.push_back(img);
            elems.push_back(img);
        }
        blocks.push_back(std::move(nb));
    }
    return SetPartition(GroundSet(std::move(elems)), std::move(blocks));
}

}  // namespace fluctmat
