#pragma once

// Merges fine-grained sub-clusters into final concepts. Separation between
// two sub-clusters is measured on the 1-D projection onto the line through
// their prototypes: a two-component Gaussian mixture is fitted to the
// projected samples and the reciprocal of the valley density between the
// component means is the separation. Low separation (dense valley) means the
// sub-clusters are density-connected and should merge first.

#include <array>
#include <numbers>
#include <utility>

#include "icd3/chunk.hpp"
#include "icd3/competitive.hpp"

namespace icd3 {

inline constexpr double kZetaCap = 1e12;
// Minimum projected component variance: std of 5 grid steps. Tiny sub-clusters
// would otherwise project to razor spikes whose valleys read as empty, making
// single-sample debris cells look maximally separated from everything and
// never merge.
inline constexpr double kVarianceFloor = 2.5e-3;
inline constexpr int kGridPoints = 101;  // -0.5 .. 0.5, step 0.01

struct ProjectedDensityModel {
    double mean_i = 0.0, var_i = 0.0, weight_i = 0.0;
    double mean_j = 0.0, var_j = 0.0, weight_j = 0.0;

    double pdf(double a) const {
        auto normal = [](double x, double m, double v) {
            return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2.0 * std::numbers::pi * v);
        };
        return weight_i * normal(a, mean_i, var_i) + weight_j * normal(a, mean_j, var_j);
    }
};

struct PairProjection {
    std::vector<double> positions_i;
    std::vector<double> positions_j;
};

// Projects the samples of sub-clusters i and j onto the line through their
// prototypes, mapping s_i to -0.5 and s_j to +0.5.
inline PairProjection project_pair(const Chunk& chunk, const SubClusterPartition& part, int i, int j,
                                   const PrototypeSet& protos) {
    if (i == j) throw std::invalid_argument("project_pair: i == j");
    const std::vector<double>& si = protos.prototypes.at(i);
    const std::vector<double>& sj = protos.prototypes.at(j);
    const double denom = squared_distance(si, sj);
    if (denom == 0.0) throw std::invalid_argument("project_pair: identical prototypes");
    PairProjection proj;
    for (std::size_t h = 0; h < chunk.size(); ++h) {
        const int a = part.assignment[h];
        if (a != i && a != j) continue;
        const std::vector<double>& x = chunk.samples[h].features;
        double dot = 0.0;
        for (std::size_t f = 0; f < x.size(); ++f) dot += (x[f] - si[f]) * (sj[f] - si[f]);
        const double p = dot / denom - 0.5;
        (a == i ? proj.positions_i : proj.positions_j).push_back(p);
    }
    return proj;
}

inline ProjectedDensityModel fit_projected_mixture(const std::vector<double>& positions_i,
                                                   const std::vector<double>& positions_j) {
    if (positions_i.empty() || positions_j.empty())
        throw std::invalid_argument("fit_projected_mixture: empty component");
    auto moments = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var /= static_cast<double>(v.size());
        return std::pair<double, double>{m, std::max(var, kVarianceFloor)};
    };
    ProjectedDensityModel model;
    std::tie(model.mean_i, model.var_i) = moments(positions_i);
    std::tie(model.mean_j, model.var_j) = moments(positions_j);
    const double total = static_cast<double>(positions_i.size() + positions_j.size());
    model.weight_i = static_cast<double>(positions_i.size()) / total;
    model.weight_j = static_cast<double>(positions_j.size()) / total;
    return model;
}

// zeta = 1 / (minimum mixture density on the 0.01-step grid between the two
// component means), capped when the valley underflows. When no grid point
// falls between the means (near-coincident components) the density at the
// midpoint of the means is used, so fully overlapped components get
// 1/pdf(mean) -- the minimum possible separation.
inline double pair_separation(const std::vector<double>& positions_i,
                              const std::vector<double>& positions_j) {
    const ProjectedDensityModel model = fit_projected_mixture(positions_i, positions_j);
    const double lo = std::min(model.mean_i, model.mean_j);
    const double hi = std::max(model.mean_i, model.mean_j);
    double valley = std::numeric_limits<double>::infinity();
    bool hit = false;
    for (int t = 0; t < kGridPoints; ++t) {
        const double a = -0.5 + 0.01 * t;
        if (a < lo - 1e-12 || a > hi + 1e-12) continue;
        valley = std::min(valley, model.pdf(a));
        hit = true;
    }
    if (!hit) valley = model.pdf(0.5 * (lo + hi));
    if (!(valley > 1.0 / kZetaCap)) return kZetaCap;
    return std::min(1.0 / valley, kZetaCap);
}

struct MergeStage {
    int eps = 0;                           // number of clusters in this state
    std::pair<int, int> merged = {-1, -1}; // group positions merged to reach it
    double sep = 0.0;
    double com = 0.0;
    std::vector<std::vector<int>> queues;  // prototype indices per cluster
};

struct FusionResult {
    int k_star = 1;
    std::vector<std::vector<int>> queues;
    std::vector<MergeStage> stages;
};

namespace detail {

struct GroupStats {
    std::vector<int> members;     // prototype indices, sorted
    std::vector<int> sample_ids;  // member sample indices
    std::vector<double> sum;      // per-feature sum of member samples
    double sumsq = 0.0;           // sum of squared norms
    long count = 0;

    std::vector<double> centroid() const {
        std::vector<double> c(sum.size());
        for (std::size_t f = 0; f < sum.size(); ++f) c[f] = sum[f] / static_cast<double>(count);
        return c;
    }
};

inline double wcss(const std::vector<GroupStats>& groups, std::size_t n) {
    double total = 0.0;
    for (const GroupStats& g : groups) {
        double c2 = 0.0;
        for (double s : g.sum) c2 += s * s;
        total += g.sumsq - c2 / static_cast<double>(g.count);
    }
    return total / static_cast<double>(n);
}

inline double pairwise_group_zeta(const std::vector<std::vector<double>>& zeta, const GroupStats& a,
                                  const GroupStats& b) {
    double best = std::numeric_limits<double>::infinity();
    for (int p : a.members)
        for (int q : b.members) best = std::min(best, zeta[p][q]);
    return best;
}

// Separation of two merged groups on the axis through their sample centroids.
// Complements the prototype-pair view: low-mass debris cells sitting inside a
// group's projected mass read as connected here even when every direct
// prototype-pair valley is empty.
inline double centroid_group_zeta(const Chunk& chunk, const GroupStats& a, const GroupStats& b) {
    const std::vector<double> ca = a.centroid();
    const std::vector<double> cb = b.centroid();
    const double denom = squared_distance(ca, cb);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    auto project = [&](const GroupStats& g) {
        std::vector<double> pos;
        pos.reserve(g.sample_ids.size());
        for (int h : g.sample_ids) {
            const std::vector<double>& x = chunk.samples[h].features;
            double dot = 0.0;
            for (std::size_t f = 0; f < x.size(); ++f) dot += (x[f] - ca[f]) * (cb[f] - ca[f]);
            pos.push_back(dot / denom - 0.5);
        }
        return pos;
    };
    return pair_separation(project(a), project(b));
}

inline double group_zeta(const Chunk& chunk, const std::vector<std::vector<double>>& zeta,
                         const GroupStats& a, const GroupStats& b) {
    return std::min(pairwise_group_zeta(zeta, a, b), centroid_group_zeta(chunk, a, b));
}

}  // namespace detail

// Greedy agglomeration from k sub-clusters down to one cluster. Cluster-level
// separation is the minimum of single linkage over the prototype-pair zeta
// matrix and the merged groups' centroid-axis separation. Records one stage
// per state, from eps = k to eps = 1.
inline std::vector<MergeStage> merge_hierarchy(const Chunk& chunk, const SubClusterPartition& part,
                                               const PrototypeSet& protos) {
    const int k = static_cast<int>(protos.size());
    if (k < 1) throw std::invalid_argument("merge_hierarchy: empty prototype set");
    const std::size_t n = chunk.size();

    std::vector<detail::GroupStats> groups(k);
    const std::size_t d = chunk.dim();
    for (int j = 0; j < k; ++j) {
        groups[j].members = {j};
        groups[j].sum.assign(d, 0.0);
    }
    for (std::size_t h = 0; h < n; ++h) {
        const int j = part.assignment[h];
        const std::vector<double>& x = chunk.samples[h].features;
        groups[j].sample_ids.push_back(static_cast<int>(h));
        for (std::size_t f = 0; f < d; ++f) groups[j].sum[f] += x[f];
        double sq = 0.0;
        for (double v : x) sq += v * v;
        groups[j].sumsq += sq;
        groups[j].count += 1;
    }
    for (int j = 0; j < k; ++j)
        if (groups[j].count == 0) throw std::invalid_argument("merge_hierarchy: empty sub-cluster " + std::to_string(j));

    // Prototype-pair separations, symmetric.
    std::vector<std::vector<double>> zeta(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const PairProjection proj = project_pair(chunk, part, i, j, protos);
            const double z = pair_separation(proj.positions_i, proj.positions_j);
            zeta[i][j] = zeta[j][i] = z;
        }

    // Cluster-level separation matrix, kept in sync with the group list.
    std::vector<std::vector<double>> gz(k, std::vector<double>(k, 0.0));
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            gz[a][b] = gz[b][a] = detail::group_zeta(chunk, zeta, groups[a], groups[b]);

    auto state_sep = [&]() {
        if (groups.size() < 2) return 0.0;
        double zmin = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < groups.size(); ++a)
            for (std::size_t b = a + 1; b < groups.size(); ++b) zmin = std::min(zmin, gz[a][b]);
        return 1.0 / zmin;
    };
    auto snapshot = [&]() {
        std::vector<std::vector<int>> q;
        q.reserve(groups.size());
        for (const detail::GroupStats& g : groups) q.push_back(g.members);
        return q;
    };

    std::vector<MergeStage> stages;
    stages.push_back({k, {-1, -1}, state_sep(), detail::wcss(groups, n), snapshot()});

    while (groups.size() > 1) {
        std::size_t best_a = 0, best_b = 1;
        double best_z = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < groups.size(); ++a)
            for (std::size_t b = a + 1; b < groups.size(); ++b) {
                if (gz[a][b] < best_z) {  // ties keep the lexicographically lowest pair
                    best_z = gz[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        detail::GroupStats& ga = groups[best_a];
        detail::GroupStats& gb = groups[best_b];
        ga.members.insert(ga.members.end(), gb.members.begin(), gb.members.end());
        std::sort(ga.members.begin(), ga.members.end());
        ga.sample_ids.insert(ga.sample_ids.end(), gb.sample_ids.begin(), gb.sample_ids.end());
        for (std::size_t f = 0; f < d; ++f) ga.sum[f] += gb.sum[f];
        ga.sumsq += gb.sumsq;
        ga.count += gb.count;
        groups.erase(groups.begin() + static_cast<long>(best_b));
        for (auto& row : gz) row.erase(row.begin() + static_cast<long>(best_b));
        gz.erase(gz.begin() + static_cast<long>(best_b));
        for (std::size_t b = 0; b < groups.size(); ++b) {
            if (b == best_a) continue;
            gz[best_a][b] = gz[b][best_a] = detail::group_zeta(chunk, zeta, groups[best_a], groups[b]);
        }

        stages.push_back({static_cast<int>(groups.size()),
                          {static_cast<int>(best_a), static_cast<int>(best_b)},
                          state_sep(), detail::wcss(groups, n), snapshot()});
    }
    return stages;
}

// k* = argmin over eps in [1, k-1] of normalized sep + normalized com, lowest
// eps on ties. Normalizers are the maxima over all recorded stages; an
// all-zero column contributes 0.
inline FusionResult select_k_star(const std::vector<MergeStage>& stages) {
    if (stages.empty()) throw std::invalid_argument("select_k_star: no stages");
    FusionResult res;
    res.stages = stages;
    const int k = stages.front().eps;
    if (k == 1) {
        res.k_star = 1;
        res.queues = stages.front().queues;
        return res;
    }
    double max_sep = 0.0, max_com = 0.0;
    for (const MergeStage& st : stages) {
        max_sep = std::max(max_sep, st.sep);
        max_com = std::max(max_com, st.com);
    }
    double best = std::numeric_limits<double>::infinity();
    int best_eps = 1;
    const MergeStage* best_stage = nullptr;
    for (const MergeStage& st : stages) {
        if (st.eps < 1 || st.eps > k - 1) continue;
        const double crit = (max_sep > 0.0 ? st.sep / max_sep : 0.0) +
                            (max_com > 0.0 ? st.com / max_com : 0.0);
        if (crit < best || (crit == best && st.eps < best_eps)) {
            best = crit;
            best_eps = st.eps;
            best_stage = &st;
        }
    }
    res.k_star = best_eps;
    res.queues = best_stage->queues;
    return res;
}

inline FusionResult fuse(const Chunk& chunk, const SubClusterPartition& part, const PrototypeSet& protos) {
    return select_k_star(merge_hierarchy(chunk, part, protos));
}

}  // namespace icd3
