#pragma once

// Reverse-nearest-neighbor density estimation and density-gap prototype
// seeding. Brute-force O(n^2) neighbor search; chunk sizes stay in the
// low thousands so correctness wins over cleverness here.

#include <algorithm>

#include "icd3/chunk.hpp"
#include "icd3/competitive.hpp"

namespace icd3 {

struct NeighborTable {
    std::vector<int> nn;                 // single nearest neighbor per sample
    std::vector<std::vector<int>> rnn;   // inverse relation
};

struct DensityStats {
    std::vector<double> rho;    // local density in [0,1]
    std::vector<double> delta;  // density gap
};

inline NeighborTable compute_rnn(const Chunk& chunk) {
    const std::size_t n = chunk.size();
    if (n < 2) throw std::invalid_argument("compute_rnn: need at least 2 samples");
    NeighborTable table;
    table.nn.assign(n, -1);
    table.rnn.assign(n, {});
    for (std::size_t h = 0; h < n; ++h) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == h) continue;
            const double d = squared_distance(chunk.samples[h].features, chunk.samples[j].features);
            if (d < best_d) {  // lowest index wins ties
                best_d = d;
                best = static_cast<int>(j);
            }
        }
        table.nn[h] = best;
    }
    for (std::size_t j = 0; j < n; ++j) table.rnn[table.nn[j]].push_back(static_cast<int>(j));
    return table;
}

// rho_h = exp(-mean distance to the reverse nearest neighbors); 0 when the
// set is empty.
inline std::vector<double> local_density(const Chunk& chunk, const NeighborTable& table) {
    const std::size_t n = chunk.size();
    if (table.rnn.size() != n) throw std::invalid_argument("local_density: table does not match chunk");
    std::vector<double> rho(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        if (table.rnn[h].empty()) continue;
        double sum = 0.0;
        for (int j : table.rnn[h]) sum += distance(chunk.samples[h], chunk.samples[j]);
        rho[h] = std::exp(-sum / static_cast<double>(table.rnn[h].size()));
    }
    return rho;
}

// delta_h = min distance to any denser sample; the densest sample gets the
// max distance to any other sample instead. Density ties are ordered by
// index (lower index counts as denser): mutual nearest-neighbor pairs have
// exactly equal rho, and treating both as peaks would hand every such pair
// two top-delta slots, crowding genuine small-cluster peaks out of the
// seeding.
inline std::vector<double> density_gap(const Chunk& chunk, const std::vector<double>& rho) {
    const std::size_t n = chunk.size();
    if (rho.size() != n) throw std::invalid_argument("density_gap: rho does not match chunk");
    std::vector<double> delta(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        double best = std::numeric_limits<double>::infinity();
        double maxd = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == h) continue;
            const double d = distance(chunk.samples[h], chunk.samples[j]);
            maxd = std::max(maxd, d);
            if (rho[j] > rho[h] || (rho[j] == rho[h] && j < h)) best = std::min(best, d);
        }
        delta[h] = std::isinf(best) ? maxd : best;
    }
    return delta;
}

inline DensityStats density_stats(const Chunk& chunk) {
    DensityStats stats;
    stats.rho = local_density(chunk, compute_rnn(chunk));
    stats.delta = density_gap(chunk, stats.rho);
    return stats;
}

// Copies of the kappa0 samples with the largest density gaps (lowest index on
// ties), win counters zeroed.
inline PrototypeSet seed_prototypes(const Chunk& chunk, int kappa0) {
    const std::size_t n = chunk.size();
    if (kappa0 < 2 || static_cast<std::size_t>(kappa0) > n)
        throw std::invalid_argument("seed_prototypes: kappa0 out of range [2, n]");
    const DensityStats stats = density_stats(chunk);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return stats.delta[a] > stats.delta[b]; });
    PrototypeSet protos;
    idx.resize(kappa0);
    std::sort(idx.begin(), idx.end());
    for (int h : idx) {
        protos.prototypes.push_back(chunk.samples[h].features);
        protos.wins.push_back(0);
    }
    return protos;
}

// Ablation seeding: kappa0 distinct samples chosen uniformly at random.
inline PrototypeSet seed_prototypes_uniform(const Chunk& chunk, int kappa0, std::uint64_t seed) {
    const std::size_t n = chunk.size();
    if (kappa0 < 2 || static_cast<std::size_t>(kappa0) > n)
        throw std::invalid_argument("seed_prototypes_uniform: kappa0 out of range [2, n]");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(kappa0);
    std::sort(idx.begin(), idx.end());
    PrototypeSet protos;
    for (int h : idx) {
        protos.prototypes.push_back(chunk.samples[h].features);
        protos.wins.push_back(0);
    }
    return protos;
}

}  // namespace icd3
