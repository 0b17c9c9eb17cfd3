#pragma once

// Incremental competitive-penalize prototype learning. Prototypes compete for
// samples; the winner moves toward the sample, rivals are pushed away by a
// dynamic penalty. Prototypes that win nothing in an epoch are eliminated,
// and while everybody keeps winning the set grows by one prototype per epoch.

#include <cstdint>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>

#include "icd3/chunk.hpp"

namespace icd3 {

struct PrototypeSet {
    std::vector<std::vector<double>> prototypes;
    std::vector<long> wins;

    std::size_t size() const { return prototypes.size(); }
};

struct LearnConfig {
    int kappa0 = 5;            // initial prototype count
    double alpha = 0.05;       // learning rate, in (0,1)
    // Epoch cap. Also bounds growth (one prototype per epoch); long runs at a
    // constant learning rate let crowded prototypes random-walk out of small
    // clusters, so the default keeps the loop short.
    int max_iters = 15;
    int growth_cap = 0;        // max prototypes; 0 = auto min(n, 64)
    double penalty_power = 5.0;  // applied rival penalty = beta^power
    // Prototypes whose final cell holds fewer samples are dropped and their
    // samples reassigned. Growth places prototypes on worst-represented
    // samples, so extreme outliers otherwise end up as permanent one-sample
    // sub-clusters. 1 keeps every nonempty cell.
    int min_cell_size = 2;
    std::optional<std::uint64_t> shuffle_seed;  // unset = present samples in chunk order

    void validate() const {
        if (kappa0 < 2) throw std::invalid_argument("LearnConfig: kappa0 must be >= 2");
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("LearnConfig: alpha must be in (0,1)");
        if (max_iters < 1) throw std::invalid_argument("LearnConfig: max_iters must be >= 1");
        if (growth_cap < 0) throw std::invalid_argument("LearnConfig: growth_cap must be >= 0");
        if (!(penalty_power >= 1.0)) throw std::invalid_argument("LearnConfig: penalty_power must be >= 1");
        if (min_cell_size < 1) throw std::invalid_argument("LearnConfig: min_cell_size must be >= 1");
    }

    int effective_growth_cap(std::size_t n) const {
        if (growth_cap > 0) return growth_cap;
        return static_cast<int>(std::min<std::size_t>(n, 64));
    }
};

// One competitive update: which prototype won, which rival was penalized and
// how strongly, and how every prototype moved.
struct UpdateStep {
    int sample_id = -1;
    int winner = -1;
    int rival = -1;                                  // -1 when only one prototype exists
    std::vector<double> beta;                        // nonzero only at the rival slot
    std::vector<std::vector<double>> displacement;   // new - old, per prototype
};

inline int assign_winner(const PrototypeSet& protos, const Sample& x) {
    if (protos.prototypes.empty()) throw std::invalid_argument("assign_winner: empty prototype set");
    int best = 0;
    double best_d = squared_distance(protos.prototypes[0], x.features);
    for (std::size_t j = 1; j < protos.prototypes.size(); ++j) {
        const double d = squared_distance(protos.prototypes[j], x.features);
        if (d < best_d) {  // ties keep the lowest index
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

inline double penalty_coefficient(const std::vector<double>& s_j, const std::vector<double>& s_v,
                                  const std::vector<double>& x) {
    const double denom = squared_distance(s_v, s_j);
    if (denom == 0.0)
        throw std::invalid_argument("penalty_coefficient: identical prototypes (zero denominator)");
    const double num = squared_distance(s_j, x) - squared_distance(s_v, x);
    return std::exp(-num / denom);
}

// Applies one sample: the winner moves toward it, the rival (second-nearest
// prototype) is pushed away. The applied penalty is the raw coefficient
// raised to penalty_power: identical for truly contested samples (beta = 1 at
// the midpoint) and vanishing for samples far from the decision boundary.
// Without the sharpening the coefficient floors at exp(-1) for distant
// rivals, and the integrated push from a large cluster ejects any single
// prototype fronting a smaller one. Winner, rival and the penalty are all
// computed from the pre-update positions.
inline UpdateStep update_prototypes(PrototypeSet& protos, const Sample& x, double alpha,
                                    double penalty_power = 5.0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("update_prototypes: alpha must be in (0,1)");
    const int v = assign_winner(protos, x);
    const std::size_t k = protos.size();
    const std::size_t d = x.dim();

    UpdateStep step;
    step.sample_id = x.id;
    step.winner = v;
    step.beta.assign(k, 0.0);
    step.displacement.assign(k, std::vector<double>(d, 0.0));

    if (k > 1) {
        int rival = -1;
        double rival_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            if (static_cast<int>(j) == v) continue;
            const double dd = squared_distance(protos.prototypes[j], x.features);
            if (dd < rival_d) {  // lowest index on ties
                rival_d = dd;
                rival = static_cast<int>(j);
            }
        }
        step.rival = rival;
        const double raw = penalty_coefficient(protos.prototypes[rival], protos.prototypes[v], x.features);
        step.beta[rival] = std::pow(raw, penalty_power);
        for (std::size_t f = 0; f < d; ++f)
            step.displacement[rival][f] =
                -step.beta[rival] * alpha * (x.features[f] - protos.prototypes[rival][f]);
    }
    for (std::size_t f = 0; f < d; ++f)
        step.displacement[v][f] = alpha * (x.features[f] - protos.prototypes[v][f]);

    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t f = 0; f < d; ++f) protos.prototypes[j][f] += step.displacement[j][f];
    protos.wins[v] += 1;
    return step;
}

struct LearnResult {
    PrototypeSet prototypes;
    SubClusterPartition partition;
    int epochs_run = 0;
    bool growth_capped = false;
};

namespace detail {

inline SubClusterPartition assign_all(const PrototypeSet& protos, const Chunk& chunk) {
    SubClusterPartition part;
    part.assignment.resize(chunk.size());
    part.counts.assign(protos.size(), 0);
    for (std::size_t h = 0; h < chunk.size(); ++h) {
        const int j = assign_winner(protos, chunk.samples[h]);
        part.assignment[h] = j;
        part.counts[j] += 1;
    }
    return part;
}

}  // namespace detail

// Full learning loop over a (normalized) chunk starting from density seeds.
// Each epoch resets the win counters and streams every sample through one
// competitive update. An epoch ending with a zero-win prototype eliminates
// all zero-win prototypes and stops; otherwise one prototype is added at the
// sample with the worst quantization error and the next epoch begins.
inline LearnResult learn_prototypes(const Chunk& chunk, const LearnConfig& cfg, const PrototypeSet& seeds) {
    cfg.validate();
    if (seeds.prototypes.empty()) throw std::invalid_argument("learn_prototypes: no seed prototypes");
    const std::size_t n = chunk.size();
    const int cap = cfg.effective_growth_cap(n);

    LearnResult res;
    res.prototypes = seeds;
    std::fill(res.prototypes.wins.begin(), res.prototypes.wins.end(), 0L);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(cfg.shuffle_seed.value_or(0));

    for (int tau = 0; tau < cfg.max_iters; ++tau) {
        res.epochs_run = tau + 1;
        std::fill(res.prototypes.wins.begin(), res.prototypes.wins.end(), 0L);
        if (cfg.shuffle_seed) std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t h : order)
            update_prototypes(res.prototypes, chunk.samples[h], cfg.alpha, cfg.penalty_power);

        bool any_zero = false;
        for (long w : res.prototypes.wins)
            if (w == 0) { any_zero = true; break; }
        if (any_zero) {
            PrototypeSet kept;
            for (std::size_t j = 0; j < res.prototypes.size(); ++j) {
                if (res.prototypes.wins[j] == 0) continue;
                kept.prototypes.push_back(res.prototypes.prototypes[j]);
                kept.wins.push_back(res.prototypes.wins[j]);
            }
            res.prototypes = std::move(kept);
            break;
        }
        if (static_cast<int>(res.prototypes.size()) >= cap) {
            res.growth_capped = true;
            std::cerr << "icd3: warning: prototype growth cap (" << cap << ") reached\n";
            break;
        }
        // Grow at the sample with the largest distance to its winning
        // prototype (lowest index on ties).
        std::size_t worst = 0;
        double worst_d = -1.0;
        for (std::size_t h = 0; h < n; ++h) {
            const int j = assign_winner(res.prototypes, chunk.samples[h]);
            const double d = squared_distance(res.prototypes.prototypes[j], chunk.samples[h].features);
            if (d > worst_d) {
                worst_d = d;
                worst = h;
            }
        }
        if (worst_d <= 0.0) break;  // every sample coincides with a prototype
        res.prototypes.prototypes.push_back(chunk.samples[worst].features);
        res.prototypes.wins.push_back(0);
    }

    res.partition = detail::assign_all(res.prototypes, chunk);

    // A prototype can win during an epoch yet end up with an empty or
    // sub-minimum cell under the final static assignment; drop those and
    // reassign, provided at least two prototypes survive.
    auto count_surviving = [&](int min_cell) {
        int kept = 0;
        for (int c : res.partition.counts)
            if (c >= min_cell) ++kept;
        return kept;
    };
    int min_cell = cfg.min_cell_size;
    if (count_surviving(min_cell) < 2) min_cell = 1;
    if (count_surviving(min_cell) < static_cast<int>(res.prototypes.size())) {
        PrototypeSet kept;
        for (std::size_t j = 0; j < res.prototypes.size(); ++j) {
            if (res.partition.counts[j] < min_cell) continue;
            kept.prototypes.push_back(res.prototypes.prototypes[j]);
            kept.wins.push_back(res.prototypes.wins[j]);
        }
        res.prototypes = std::move(kept);
        res.partition = detail::assign_all(res.prototypes, chunk);
    }
    return res;
}

}  // namespace icd3
