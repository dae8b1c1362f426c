#ifndef CANTORDIM_LEVEL_MEASURE_HPP
#define CANTORDIM_LEVEL_MEASURE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"

namespace cantordim {

/// Masses of a measure on the cylinders of every level 0..max_level.
///
/// masses[l][i] is the mass of word_from_index(i, l). Monte Carlo measures also
/// carry the raw hit counts behind each mass; exact measures leave hits empty.
struct LevelMeasure {
    std::size_t branch_count = 0;
    std::vector<std::vector<double>> masses;
    std::vector<std::vector<double>> hits;

    bool has_counts() const noexcept { return !hits.empty(); }
    std::size_t max_level() const noexcept { return masses.empty() ? 0 : masses.size() - 1; }

    double mass(std::size_t level, std::uint64_t index) const { return masses.at(level).at(index); }
    double count(std::size_t level, std::uint64_t index) const { return hits.at(level).at(index); }

    void require_level(std::size_t level) const {
        if (masses.empty() || level > max_level()) {
            throw InvalidArgument("measure recorded to level " + std::to_string(max_level()) +
                                  ", level " + std::to_string(level) + " requested");
        }
    }
};

/// Builds every coarser level from finest-level masses (and optional counts) by summing siblings.
inline LevelMeasure aggregate_levels(std::size_t branch_count, std::vector<double> finest,
                                     std::vector<double> finest_hits = {}) {
    LevelMeasure m;
    m.branch_count = branch_count;
    std::size_t level = 0;
    for (std::size_t n = finest.size(); n > 1; n /= branch_count) {
        if (n % branch_count != 0) {
            throw InvalidArgument("finest level size is not a power of the branch count");
        }
        ++level;
    }
    m.masses.resize(level + 1);
    m.masses[level] = std::move(finest);
    const bool counts = !finest_hits.empty();
    if (counts) {
        m.hits.resize(level + 1);
        m.hits[level] = std::move(finest_hits);
    }
    for (std::size_t l = level; l-- > 0;) {
        const auto& fine = m.masses[l + 1];
        auto& coarse = m.masses[l];
        coarse.assign(fine.size() / branch_count, 0.0);
        for (std::size_t i = 0; i < fine.size(); ++i) {
            coarse[i / branch_count] += fine[i];
        }
        if (counts) {
            const auto& hf = m.hits[l + 1];
            auto& hc = m.hits[l];
            hc.assign(hf.size() / branch_count, 0.0);
            for (std::size_t i = 0; i < hf.size(); ++i) {
                hc[i / branch_count] += hf[i];
            }
        }
    }
    return m;
}

}  // namespace cantordim

#endif  // CANTORDIM_LEVEL_MEASURE_HPP
