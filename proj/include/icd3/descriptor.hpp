#pragma once

// Per-cluster one-cluster classifiers (descriptors). The default soft-ball
// descriptor is a closed ball at the cluster mean whose radius is the
// (1-nu)-quantile of the training distances. The optional kernel-svdd kind is
// a Gaussian-kernel support vector data description solved by pairwise
// coordinate ascent on the dual.

#include <iostream>

#include <json.hpp>

#include "icd3/chunk.hpp"

namespace icd3 {

inline constexpr double kMinRadius = 1e-3;  // floor for degenerate clusters

enum class DescriptorKind { soft_ball, kernel_svdd };

inline std::string to_string(DescriptorKind k) {
    return k == DescriptorKind::soft_ball ? "soft-ball" : "kernel-svdd";
}

inline DescriptorKind descriptor_kind_from_string(const std::string& s) {
    if (s == "soft-ball" || s == "soft_ball") return DescriptorKind::soft_ball;
    if (s == "kernel-svdd" || s == "kernel_svdd") return DescriptorKind::kernel_svdd;
    throw std::invalid_argument("unknown descriptor kind: " + s);
}

struct DescriptorConfig {
    DescriptorKind kind = DescriptorKind::soft_ball;
    double nu = 0.05;        // expected outlier fraction, in (0,1)
    double lambda = 1.0;     // slack trade-off (kernel-svdd box bound)
    double bandwidth = 1.0;  // Gaussian kernel width (kernel-svdd)

    void validate() const {
        if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("DescriptorConfig: nu must be in (0,1)");
        if (kind == DescriptorKind::kernel_svdd) {
            if (!(lambda > 0.0)) throw std::invalid_argument("DescriptorConfig: lambda must be > 0");
            if (!(bandwidth > 0.0)) throw std::invalid_argument("DescriptorConfig: bandwidth must be > 0");
        }
    }
};

struct Descriptor {
    DescriptorKind kind = DescriptorKind::soft_ball;
    int cluster = -1;
    long training_size = 0;

    // soft-ball state
    std::vector<double> center;
    double radius = 0.0;

    // kernel-svdd state
    double bandwidth = 1.0;
    std::vector<std::vector<double>> support_points;
    std::vector<double> alpha;
    double rho_offset = 0.0;  // decision(x) = rho_offset + 2 * sum_i alpha_i K(x_i, x)
};

namespace detail {

inline double gaussian_kernel(const std::vector<double>& a, const std::vector<double>& b, double bw) {
    return std::exp(-squared_distance(a, b) / (2.0 * bw * bw));
}

// Quantile with linear interpolation between order statistics
// (position q*(n-1) on the sorted values).
inline double interpolated_quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

inline Descriptor fit_soft_ball(const std::vector<std::vector<double>>& xs, const DescriptorConfig& cfg) {
    const std::size_t n = xs.size();
    const std::size_t d = xs.front().size();
    Descriptor desc;
    desc.kind = DescriptorKind::soft_ball;
    desc.training_size = static_cast<long>(n);
    desc.center.assign(d, 0.0);
    for (const auto& x : xs)
        for (std::size_t f = 0; f < d; ++f) desc.center[f] += x[f];
    for (std::size_t f = 0; f < d; ++f) desc.center[f] /= static_cast<double>(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = distance(xs[i], desc.center);
    desc.radius = std::max(interpolated_quantile(std::move(dist), 1.0 - cfg.nu), kMinRadius);
    return desc;
}

// Dual SVDD: minimize a^T K a subject to sum(a) = 1, 0 <= a_i <= C, Gaussian
// kernel (K_ii = 1). Most-violating-pair coordinate ascent; terminates when
// the primal-dual gap drops below 1e-6.
inline Descriptor fit_kernel_svdd(const std::vector<std::vector<double>>& xs, const DescriptorConfig& cfg) {
    const std::size_t n = xs.size();
    Descriptor desc;
    desc.kind = DescriptorKind::kernel_svdd;
    desc.training_size = static_cast<long>(n);
    desc.bandwidth = cfg.bandwidth;

    // Box bound; clamped so sum(a) = 1 stays feasible.
    const double C = std::max(cfg.lambda, 1.0 / static_cast<double>(n));

    std::vector<std::vector<double>> K(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            K[i][j] = K[j][i] = gaussian_kernel(xs[i], xs[j], cfg.bandwidth);

    std::vector<double> a(n, 1.0 / static_cast<double>(n));
    std::vector<double> Ka(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Ka[i] += K[i][j] * a[j];

    const double gap_tol = 1e-6;
    const long max_steps = 200000;
    double gap = std::numeric_limits<double>::infinity();
    for (long step = 0; step < max_steps; ++step) {
        // gradient of a^T K a is 2 Ka
        int up = -1, down = -1;
        double g_up = std::numeric_limits<double>::infinity();
        double g_down = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] < C - 1e-15 && Ka[i] < g_up) { g_up = Ka[i]; up = static_cast<int>(i); }
            if (a[i] > 1e-15 && Ka[i] > g_down) { g_down = Ka[i]; down = static_cast<int>(i); }
        }
        if (up < 0 || down < 0 || up == down) break;

        // primal-dual gap with R^2 chosen as the largest squared feature-space
        // distance among support vectors below the box bound
        if (step % 64 == 0) {
            const double quad = [&] {
                double q = 0.0;
                for (std::size_t i = 0; i < n; ++i) q += a[i] * Ka[i];
                return q;
            }();
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (a[i] > 1e-15 && a[i] < C - 1e-15)
                    r2 = std::max(r2, 1.0 - 2.0 * Ka[i] + quad);
            }
            if (r2 == 0.0) {
                for (std::size_t i = 0; i < n; ++i)
                    if (a[i] > 1e-15) r2 = std::max(r2, 1.0 - 2.0 * Ka[i] + quad);
            }
            double primal = r2;
            for (std::size_t i = 0; i < n; ++i)
                primal += C * std::max(0.0, (1.0 - 2.0 * Ka[i] + quad) - r2);
            const double dual = 1.0 - quad;
            gap = primal - dual;
            if (gap < gap_tol) break;
        }

        const double curv = K[up][up] + K[down][down] - 2.0 * K[up][down];
        double delta = curv > 1e-15 ? (g_down - g_up) / curv : C;
        delta = std::min({delta, C - a[up], a[down]});
        if (delta <= 0.0) break;
        a[up] += delta;
        a[down] -= delta;
        for (std::size_t i = 0; i < n; ++i) Ka[i] += delta * (K[i][up] - K[i][down]);
    }
    {
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) quad += a[i] * Ka[i];
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > 1e-15 && a[i] < C - 1e-15) r2 = std::max(r2, 1.0 - 2.0 * Ka[i] + quad);
        if (r2 == 0.0)
            for (std::size_t i = 0; i < n; ++i)
                if (a[i] > 1e-15) r2 = std::max(r2, 1.0 - 2.0 * Ka[i] + quad);
        double primal = r2;
        for (std::size_t i = 0; i < n; ++i)
            primal += C * std::max(0.0, (1.0 - 2.0 * Ka[i] + quad) - r2);
        gap = primal - (1.0 - quad);
    }
    if (!(gap < gap_tol))
        std::cerr << "icd3: warning: svdd solver stopped with duality gap " << gap << "\n";

    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) quad += a[i] * Ka[i];
    // R^2 averaged over unbounded support vectors (all positive ones if none)
    double r2 = 0.0;
    int free_svs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] > 1e-12 && a[i] < C - 1e-12) {
            r2 += 1.0 - 2.0 * Ka[i] + quad;
            ++free_svs;
        }
    }
    if (free_svs > 0) {
        r2 /= free_svs;
    } else {
        int svs = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > 1e-12) { r2 += 1.0 - 2.0 * Ka[i] + quad; ++svs; }
        r2 /= std::max(svs, 1);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] > 1e-12) {
            desc.support_points.push_back(xs[i]);
            desc.alpha.push_back(a[i]);
        }
    }
    // Nudge the radius up by a relative epsilon so support vectors sitting
    // exactly on the boundary classify as in-distribution (closed ball)
    // instead of flipping on rounding noise.
    r2 += 1e-9 * (1.0 + std::abs(r2));
    desc.rho_offset = r2 - 1.0 - quad;
    return desc;
}

}  // namespace detail

inline Descriptor fit_descriptor(const std::vector<std::vector<double>>& cluster_samples,
                                 const DescriptorConfig& cfg, int cluster_index = -1) {
    cfg.validate();
    if (cluster_samples.empty()) throw std::invalid_argument("fit_descriptor: empty cluster");
    Descriptor desc = cfg.kind == DescriptorKind::soft_ball
                          ? detail::fit_soft_ball(cluster_samples, cfg)
                          : detail::fit_kernel_svdd(cluster_samples, cfg);
    desc.cluster = cluster_index;
    return desc;
}

inline Descriptor fit_descriptor(const Chunk& chunk, const DescriptorConfig& cfg, int cluster_index = -1) {
    std::vector<std::vector<double>> xs;
    xs.reserve(chunk.size());
    for (const Sample& s : chunk.samples) xs.push_back(s.features);
    return fit_descriptor(xs, cfg, cluster_index);
}

// Positive = more out-of-distribution; score > 0 if and only if classify = 1.
inline double score(const Descriptor& desc, const std::vector<double>& x) {
    if (desc.kind == DescriptorKind::soft_ball) return distance(x, desc.center) - desc.radius;
    double decision = desc.rho_offset;
    for (std::size_t i = 0; i < desc.support_points.size(); ++i) {
        if (x.size() != desc.support_points[i].size())
            throw std::invalid_argument("score: dimension mismatch");
        decision += 2.0 * desc.alpha[i] * detail::gaussian_kernel(desc.support_points[i], x, desc.bandwidth);
    }
    return -decision;
}

inline double score(const Descriptor& desc, const Sample& x) { return score(desc, x.features); }

// 1 = out-of-distribution. The boundary itself counts as in-distribution.
inline int classify(const Descriptor& desc, const std::vector<double>& x) {
    return score(desc, x) > 0.0 ? 1 : 0;
}

inline int classify(const Descriptor& desc, const Sample& x) { return classify(desc, x.features); }

inline nlohmann::json descriptor_to_json(const Descriptor& desc) {
    nlohmann::json j;
    j["kind"] = to_string(desc.kind);
    j["cluster"] = desc.cluster;
    j["training_size"] = desc.training_size;
    if (desc.kind == DescriptorKind::soft_ball) {
        j["center"] = desc.center;
        j["radius"] = desc.radius;
    } else {
        j["bandwidth"] = desc.bandwidth;
        j["support_points"] = desc.support_points;
        j["alpha"] = desc.alpha;
        j["rho_offset"] = desc.rho_offset;
    }
    return j;
}

inline Descriptor descriptor_from_json(const nlohmann::json& j) {
    Descriptor desc;
    desc.kind = descriptor_kind_from_string(j.at("kind").get<std::string>());
    desc.cluster = j.at("cluster").get<int>();
    desc.training_size = j.at("training_size").get<long>();
    if (desc.kind == DescriptorKind::soft_ball) {
        desc.center = j.at("center").get<std::vector<double>>();
        desc.radius = j.at("radius").get<double>();
    } else {
        desc.bandwidth = j.at("bandwidth").get<double>();
        desc.support_points = j.at("support_points").get<std::vector<std::vector<double>>>();
        desc.alpha = j.at("alpha").get<std::vector<double>>();
        desc.rho_offset = j.at("rho_offset").get<double>();
    }
    return desc;
}

}  // namespace icd3
