#pragma once

// Core data representations: samples, chunks, partitions and per-chunk
// feature normalization shared by the whole pipeline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace icd3 {

struct Sample {
    std::vector<double> features;
    int id = 0;

    std::size_t dim() const { return features.size(); }
};

struct Chunk {
    std::vector<Sample> samples;
    int chunk_index = 0;
    std::optional<bool> drift_label;  // generator-produced streams only

    std::size_t size() const { return samples.size(); }
    std::size_t dim() const { return samples.empty() ? 0 : samples.front().dim(); }
};

inline Chunk make_chunk(const std::vector<std::vector<double>>& rows, int chunk_index = 0) {
    Chunk c;
    c.chunk_index = chunk_index;
    c.samples.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        c.samples.push_back({rows[i], static_cast<int>(i)});
    return c;
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("squared_distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
    return std::sqrt(squared_distance(a, b));
}

inline double distance(const Sample& a, const Sample& b) {
    return distance(a.features, b.features);
}

// Per-sample index of the assigned prototype plus per-prototype counts.
struct SubClusterPartition {
    std::vector<int> assignment;
    std::vector<int> counts;

    std::size_t num_clusters() const { return counts.size(); }
};

// Merged-cluster partition: assignment into 0..k*-1 plus the prototype-index
// queues that define each merged cluster.
struct ClusterPartition {
    std::vector<int> assignment;
    std::vector<std::vector<int>> member_queues;

    std::size_t num_clusters() const { return member_queues.size(); }
};

enum class NormalizerKind { standardize, min_max, identity };

inline std::string to_string(NormalizerKind k) {
    switch (k) {
        case NormalizerKind::standardize: return "standardize";
        case NormalizerKind::min_max: return "min-max";
        case NormalizerKind::identity: return "identity";
    }
    return "?";
}

inline NormalizerKind normalizer_kind_from_string(const std::string& s) {
    if (s == "standardize") return NormalizerKind::standardize;
    if (s == "min-max" || s == "minmax") return NormalizerKind::min_max;
    if (s == "identity") return NormalizerKind::identity;
    throw std::invalid_argument("unknown normalizer kind: " + s);
}

// Per-feature affine transform x -> (x - location) / scale.
// Degenerate (constant) features get scale 1 so the transform stays invertible.
struct Normalizer {
    NormalizerKind kind = NormalizerKind::standardize;
    std::vector<double> location;
    std::vector<double> scale;

    std::size_t dim() const { return location.size(); }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != location.size())
            throw std::invalid_argument("Normalizer::apply: dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - location[j]) / scale[j];
        return out;
    }

    std::vector<double> invert(const std::vector<double>& x) const {
        if (x.size() != location.size())
            throw std::invalid_argument("Normalizer::invert: dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] * scale[j] + location[j];
        return out;
    }
};

inline Normalizer fit_normalizer(const Chunk& base, NormalizerKind kind = NormalizerKind::standardize) {
    if (base.samples.empty()) throw std::invalid_argument("fit_normalizer: empty chunk");
    const std::size_t d = base.dim();
    const std::size_t n = base.size();
    Normalizer norm;
    norm.kind = kind;
    norm.location.assign(d, 0.0);
    norm.scale.assign(d, 1.0);
    if (kind == NormalizerKind::identity) return norm;

    if (kind == NormalizerKind::standardize) {
        std::vector<double> mean(d, 0.0);
        for (const Sample& s : base.samples) {
            if (s.dim() != d) throw std::invalid_argument("fit_normalizer: ragged chunk");
            for (std::size_t j = 0; j < d; ++j) mean[j] += s.features[j];
        }
        for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (const Sample& s : base.samples)
            for (std::size_t j = 0; j < d; ++j) {
                const double dv = s.features[j] - mean[j];
                var[j] += dv * dv;
            }
        for (std::size_t j = 0; j < d; ++j) {
            norm.location[j] = mean[j];
            const double sd = std::sqrt(var[j] / static_cast<double>(n));  // population std
            norm.scale[j] = sd > 0.0 ? sd : 1.0;
        }
    } else {  // min-max
        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (const Sample& s : base.samples) {
            if (s.dim() != d) throw std::invalid_argument("fit_normalizer: ragged chunk");
            for (std::size_t j = 0; j < d; ++j) {
                lo[j] = std::min(lo[j], s.features[j]);
                hi[j] = std::max(hi[j], s.features[j]);
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            norm.location[j] = lo[j];
            const double range = hi[j] - lo[j];
            norm.scale[j] = range > 0.0 ? range : 1.0;
        }
    }
    return norm;
}

inline Chunk apply_normalizer(const Normalizer& norm, const Chunk& chunk) {
    Chunk out;
    out.chunk_index = chunk.chunk_index;
    out.drift_label = chunk.drift_label;
    out.samples.reserve(chunk.size());
    for (const Sample& s : chunk.samples) out.samples.push_back({norm.apply(s.features), s.id});
    return out;
}

inline Chunk invert_normalizer(const Normalizer& norm, const Chunk& chunk) {
    Chunk out;
    out.chunk_index = chunk.chunk_index;
    out.drift_label = chunk.drift_label;
    out.samples.reserve(chunk.size());
    for (const Sample& s : chunk.samples) out.samples.push_back({norm.invert(s.features), s.id});
    return out;
}

}  // namespace icd3
