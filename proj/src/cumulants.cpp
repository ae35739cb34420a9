#include "fluctmat/cumulants.hpp"

#include <algorithm>
#include <cmath>

namespace fluctmat {

MomentTable::MomentTable(int order) : order_(order) {
    if (order < 1) throw SpecInvalid("moment table order must be >= 1");
    values_.assign(1u << order, cplx(0.0));
    assigned_.assign(1u << order, false);
    values_[0] = 1.0;
    assigned_[0] = true;
}

cplx MomentTable::moment(unsigned mask) const {
    if (mask >= values_.size() || !assigned_[mask]) throw IncompleteTable("moment not assigned");
    return values_[mask];
}

void MomentTable::set_moment(unsigned mask, cplx value) {
    if (mask == 0 || mask >= values_.size()) throw SpecInvalid("bad moment subset");
    values_[mask] = value;
    assigned_[mask] = true;
}

bool MomentTable::complete() const {
    return std::all_of(assigned_.begin(), assigned_.end(), [](bool b) { return b; });
}

namespace {

std::vector<int> mask_elements(unsigned mask) {
    std::vector<int> out;
    for (int b = 0; mask >> b; ++b)
        if ((mask >> b) & 1u) out.push_back(b + 1);
    return out;
}

}  // namespace

cplx cumulant_from_moments(const MomentTable& table, unsigned mask) {
    std::vector<int> elems = mask_elements(mask);
    if (elems.empty()) return 0.0;
    GroundSet ground((std::vector<int>(elems)));
    cplx total = 0.0;
    SetPartition top = SetPartition::one_block(ground);
    for_each_partition(ground, PartitionFilter::All, [&](const SetPartition& pi) {
        cplx blocks = 1.0;
        for (const auto& block : pi.blocks()) {
            unsigned sub = 0;
            for (int e : block) sub |= 1u << (e - 1);
            blocks *= table.moment(sub);
        }
        total += static_cast<double>(mobius(pi, top)) * blocks;
        return true;
    });
    return total;
}

cplx cumulant_from_moments(const MomentTable& table, int n) {
    if (n < 1 || n > table.order()) throw IncompleteTable("order exceeds the table");
    return cumulant_from_moments(table, (1u << n) - 1u);
}

cplx moment_from_cumulants(const MomentTable& table, unsigned mask) {
    std::vector<int> elems = mask_elements(mask);
    if (elems.empty()) return 1.0;
    GroundSet ground((std::vector<int>(elems)));
    cplx total = 0.0;
    for_each_partition(ground, PartitionFilter::All, [&](const SetPartition& pi) {
        cplx blocks = 1.0;
        for (const auto& block : pi.blocks()) {
            unsigned sub = 0;
            for (int e : block) sub |= 1u << (e - 1);
            blocks *= cumulant_from_moments(table, sub);
        }
        total += blocks;
        return true;
    });
    return total;
}

CumulantEstimate estimate_mixed_cumulant(const std::vector<std::vector<cplx>>& streams, int n,
                                         int jackknife_blocks) {
    if (n < 1 || n > 4) throw OrderTooHigh("mixed cumulant estimation supports n <= 4");
    if (static_cast<int>(streams.size()) != n) throw SpecInvalid("need one stream per argument");
    const long samples = static_cast<long>(streams.front().size());
    for (const auto& s : streams)
        if (static_cast<long>(s.size()) != samples) throw SpecInvalid("streams must be aligned");
    if (samples < 2) throw TooFewSamples("need at least 2 samples");

    const unsigned full = (1u << n) - 1u;
    const int blocks = static_cast<int>(std::min<long>(jackknife_blocks, samples));

    // one pass: per-subset totals and per-block partial totals
    std::vector<cplx> total(full + 1, cplx(0.0));
    std::vector<std::vector<cplx>> block_total(blocks, std::vector<cplx>(full + 1, cplx(0.0)));
    std::vector<long> block_size(blocks, 0);
    for (long t = 0; t < samples; ++t) {
        int block = static_cast<int>(static_cast<long long>(t) * blocks / samples);
        ++block_size[block];
        for (unsigned mask = 1; mask <= full; ++mask) {
            cplx prod = 1.0;
            for (int k = 0; k < n; ++k)
                if ((mask >> k) & 1u) prod *= streams[k][t];
            total[mask] += prod;
            block_total[block][mask] += prod;
        }
    }

    auto cumulant_of_means = [&](const std::vector<cplx>& sums, double count) {
        MomentTable table(n);
        for (unsigned mask = 1; mask <= full; ++mask) table.set_moment(mask, sums[mask] / count);
        return cumulant_from_moments(table, n);
    };

    CumulantEstimate est;
    est.n_samples = samples;
    est.value = cumulant_of_means(total, static_cast<double>(samples));

    if (blocks >= 2) {
        std::vector<cplx> deleted(full + 1);
        std::vector<cplx> jack(blocks);
        cplx jack_mean = 0.0;
        for (int b = 0; b < blocks; ++b) {
            for (unsigned mask = 1; mask <= full; ++mask) deleted[mask] = total[mask] - block_total[b][mask];
            jack[b] = cumulant_of_means(deleted, static_cast<double>(samples - block_size[b]));
            jack_mean += jack[b];
        }
        jack_mean /= static_cast<double>(blocks);
        double var = 0.0;
        for (int b = 0; b < blocks; ++b) var += std::norm(jack[b] - jack_mean);
        est.std_error = std::sqrt(var * (blocks - 1) / static_cast<double>(blocks));
    }
    return est;
}

}  // namespace fluctmat
