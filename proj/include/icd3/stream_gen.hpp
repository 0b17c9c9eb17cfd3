#pragma once

// Synthetic imbalanced drift-stream generator plus real-dataset ingestion
// with drift injection. Every chunk draws from its own counter-based
// substream of (seed, chunk index), so regenerating any chunk in isolation
// reproduces it exactly.

#include <array>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "icd3/chunk.hpp"
#include "icd3/io.hpp"

namespace icd3 {

inline constexpr std::array<double, 10> kIRGrid = {1, 3, 5, 7, 10, 15, 18, 20, 30, 40};

enum class DriftKind { mean, covariance, both, moon_noise };
enum class RealDriftKind { permute, substitute, both };

inline std::string to_string(DriftKind k) {
    switch (k) {
        case DriftKind::mean: return "mean";
        case DriftKind::covariance: return "covariance";
        case DriftKind::both: return "both";
        case DriftKind::moon_noise: return "moon-noise";
    }
    return "?";
}

inline DriftKind drift_kind_from_string(const std::string& s) {
    if (s == "mean") return DriftKind::mean;
    if (s == "covariance") return DriftKind::covariance;
    if (s == "both") return DriftKind::both;
    if (s == "moon-noise" || s == "moon_noise") return DriftKind::moon_noise;
    throw std::invalid_argument("unknown drift kind: " + s);
}

inline RealDriftKind real_drift_kind_from_string(const std::string& s) {
    if (s == "permute") return RealDriftKind::permute;
    if (s == "substitute") return RealDriftKind::substitute;
    if (s == "both") return RealDriftKind::both;
    throw std::invalid_argument("unknown real drift kind: " + s);
}

struct GaussianSpec {
    std::vector<double> mean;
    std::vector<std::vector<double>> cov;
};

struct MoonSpec {
    std::vector<double> center;  // 2-D
    double radius = 1.0;
    double noise_std = 0.1;
    double arc_start = 0.0;
    double arc_end = std::numbers::pi;
};

struct ClusterSpec {
    enum class Type { gaussian, moon };
    Type type = Type::gaussian;
    GaussianSpec gaussian;
    MoonSpec moon;
    double weight = 0.0;  // relative size; 0 = derive from the imbalance ratio

    std::size_t dim() const { return type == Type::gaussian ? gaussian.mean.size() : 2; }
};

struct StreamSpec {
    std::vector<ClusterSpec> clusters;
    double imbalance_ratio = 1.0;  // largest/smallest cluster size
    int base_size = 2000;
    int chunk_size = 500;
    int n_clean = 250;
    int n_drift = 250;
    DriftKind drift_kind = DriftKind::mean;
    int drift_target = -1;  // -1 = smallest cluster
    std::uint64_t seed = 0;

    // real-data ingestion
    int k_classes = 2;
    RealDriftKind real_drift = RealDriftKind::both;

    // When no per-cluster weights are given, the first cluster carries the
    // imbalance ratio and the rest weight 1.
    std::vector<double> effective_weights() const {
        std::vector<double> w(clusters.size(), 1.0);
        bool any = false;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            if (clusters[i].weight > 0.0) { w[i] = clusters[i].weight; any = true; }
        if (!any && !w.empty()) w[0] = imbalance_ratio;
        return w;
    }

    void validate() const {
        if (clusters.empty()) throw std::invalid_argument("StreamSpec: no clusters");
        if (imbalance_ratio < 1.0) throw std::invalid_argument("StreamSpec: imbalance_ratio must be >= 1");
        if (base_size < 1 || chunk_size < 1) throw std::invalid_argument("StreamSpec: sizes must be positive");
        if (n_clean < 0 || n_drift < 0) throw std::invalid_argument("StreamSpec: negative chunk counts");
        const std::size_t d = clusters.front().dim();
        for (const ClusterSpec& c : clusters) {
            if (c.dim() != d) throw std::invalid_argument("StreamSpec: mixed cluster dimensionality");
            if (c.type == ClusterSpec::Type::moon && d != 2)
                throw std::invalid_argument("StreamSpec: moon clusters are 2-D only");
        }
    }
};

struct DriftSpec {
    int target_cluster = -1;
    double u = 0.5;  // the generator draws from (0.1, 1)
    DriftKind kind = DriftKind::mean;
};

struct DriftMetadata {
    int chunk_index = -1;
    int target_cluster = -1;
    double u = 0.0;
    std::string kind;
    std::vector<double> shift;        // mean displacement, raw feature space
    std::vector<int> permutation;     // real streams: applied dimension involution
};

struct LabeledStream {
    std::vector<Chunk> chunks;                  // chunk 0 is the base chunk
    std::vector<std::vector<int>> class_labels; // per-chunk class/cluster ids
    std::vector<DriftMetadata> metadata;        // one entry per drifted chunk
};

namespace detail {

inline std::mt19937_64 substream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), purpose, index};
    return std::mt19937_64(seq);
}

// Largest-remainder rounding of n * w_i / sum(w), ties to the lowest index.
inline std::vector<int> proportional_counts(int n, const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> counts(weights.size());
    std::vector<std::pair<double, int>> rema(weights.size());
    int assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double ideal = static_cast<double>(n) * weights[i] / total;
        counts[i] = static_cast<int>(ideal);
        assigned += counts[i];
        rema[i] = {ideal - counts[i], static_cast<int>(i)};
    }
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int r = 0; r < n - assigned; ++r) counts[rema[r].second] += 1;
    return counts;
}

inline std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a) {
    const std::size_t d = a.size();
    std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) throw std::invalid_argument("cholesky: covariance not positive definite");
                l[i][j] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

inline std::vector<double> unit_vector(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

inline std::vector<double> sample_cluster_point(const ClusterSpec& spec,
                                                const std::vector<std::vector<double>>& chol,
                                                std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    if (spec.type == ClusterSpec::Type::gaussian) {
        const std::size_t d = spec.gaussian.mean.size();
        std::vector<double> z(d), x(spec.gaussian.mean);
        for (double& v : z) v = normal(rng);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j) x[i] += chol[i][j] * z[j];
        return x;
    }
    std::uniform_real_distribution<double> arc(spec.moon.arc_start, spec.moon.arc_end);
    const double t = arc(rng);
    return {spec.moon.center[0] + spec.moon.radius * std::cos(t) + spec.moon.noise_std * normal(rng),
            spec.moon.center[1] + spec.moon.radius * std::sin(t) + spec.moon.noise_std * normal(rng)};
}

}  // namespace detail

struct DriftedCluster {
    ClusterSpec spec;
    std::vector<double> shift;    // applied mean displacement
    double noise_fraction = 0.0;  // moon-noise: extra annulus samples as a fraction
};

// Produces the drifted version of one cluster spec. Mean drift moves the mean
// by u * (per-dimension std) along a random unit direction; covariance drift
// scales the covariance by (1+u)^2; moon-noise marks a fraction u of extra
// uniform annulus samples to be appended at generation time.
inline DriftedCluster inject_drift(const ClusterSpec& cluster, const DriftSpec& drift, std::mt19937_64& rng) {
    if (!(drift.u > 0.0 && drift.u < 1.0 + 1e-12))
        throw std::invalid_argument("inject_drift: u must be in (0,1]");
    DriftedCluster out;
    out.spec = cluster;
    const std::size_t d = cluster.dim();
    out.shift.assign(d, 0.0);

    if (drift.kind == DriftKind::moon_noise) {
        if (cluster.type != ClusterSpec::Type::moon)
            throw std::invalid_argument("inject_drift: moon-noise drift needs a moon cluster");
        out.noise_fraction = drift.u;
        return out;
    }
    if (cluster.type != ClusterSpec::Type::gaussian)
        throw std::invalid_argument("inject_drift: " + to_string(drift.kind) + " drift needs a gaussian cluster");

    if (drift.kind == DriftKind::mean || drift.kind == DriftKind::both) {
        const std::vector<double> dir = detail::unit_vector(d, rng);
        for (std::size_t j = 0; j < d; ++j) {
            const double sd = std::sqrt(cluster.gaussian.cov[j][j]);
            out.shift[j] = drift.u * sd * dir[j];
            out.spec.gaussian.mean[j] += out.shift[j];
        }
    }
    if (drift.kind == DriftKind::covariance || drift.kind == DriftKind::both) {
        const double s = (1.0 + drift.u) * (1.0 + drift.u);
        for (auto& row : out.spec.gaussian.cov)
            for (double& v : row) v *= s;
    }
    return out;
}

namespace detail {

struct GeneratedChunk {
    Chunk chunk;
    std::vector<int> labels;
};

// Samples are drawn cluster by cluster, then the chunk order is shuffled so
// the emitted stream is unordered the way real chunked collection is.
inline void shuffle_chunk(GeneratedChunk& gen, std::mt19937_64& rng) {
    const std::size_t n = gen.chunk.samples.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    GeneratedChunk out;
    out.chunk.chunk_index = gen.chunk.chunk_index;
    out.chunk.drift_label = gen.chunk.drift_label;
    out.chunk.samples.reserve(n);
    out.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Sample s = std::move(gen.chunk.samples[order[i]]);
        s.id = static_cast<int>(i);
        out.chunk.samples.push_back(std::move(s));
        out.labels.push_back(gen.labels[order[i]]);
    }
    gen = std::move(out);
}

inline GeneratedChunk generate_chunk(const std::vector<ClusterSpec>& clusters, const std::vector<int>& counts,
                                     std::mt19937_64& rng, int chunk_index, double moon_noise_fraction = 0.0,
                                     int noise_target = -1) {
    GeneratedChunk out;
    out.chunk.chunk_index = chunk_index;
    std::vector<std::vector<std::vector<double>>> chols(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c)
        if (clusters[c].type == ClusterSpec::Type::gaussian) chols[c] = cholesky(clusters[c].gaussian.cov);
    int id = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (int i = 0; i < counts[c]; ++i) {
            out.chunk.samples.push_back({sample_cluster_point(clusters[c], chols[c], rng), id++});
            out.labels.push_back(static_cast<int>(c));
        }
        if (static_cast<int>(c) == noise_target && moon_noise_fraction > 0.0) {
            const MoonSpec& m = clusters[c].moon;
            const int extra = static_cast<int>(std::ceil(moon_noise_fraction * counts[c]));
            std::uniform_real_distribution<double> arc(m.arc_start, m.arc_end);
            std::uniform_real_distribution<double> radial(0.5 * m.radius, 1.5 * m.radius);
            for (int i = 0; i < extra; ++i) {
                const double t = arc(rng);
                const double r = radial(rng);
                out.chunk.samples.push_back(
                    {{m.center[0] + r * std::cos(t), m.center[1] + r * std::sin(t)}, id++});
                out.labels.push_back(static_cast<int>(c));
            }
        }
    }
    shuffle_chunk(out, rng);
    return out;
}

}  // namespace detail

inline int default_drift_target(const StreamSpec& spec) {
    if (spec.drift_target >= 0) {
        if (spec.drift_target >= static_cast<int>(spec.clusters.size()))
            throw std::invalid_argument("drift target out of range");
        return spec.drift_target;
    }
    const std::vector<double> w = spec.effective_weights();
    int best = 0;
    for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i] < w[best]) best = static_cast<int>(i);  // smallest cluster, lowest index on ties
    return best;
}

inline Chunk gen_base(const StreamSpec& spec) {
    spec.validate();
    const std::vector<int> counts = detail::proportional_counts(spec.base_size, spec.effective_weights());
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] < 2)
            throw std::invalid_argument("gen_base: base_size too small, cluster " + std::to_string(c) +
                                        " would get " + std::to_string(counts[c]) + " samples");
    auto rng = detail::substream(spec.seed, 0xC0, 0);
    return detail::generate_chunk(spec.clusters, counts, rng, 0).chunk;
}

inline LabeledStream build_stream(const StreamSpec& spec) {
    spec.validate();
    const std::vector<double> weights = spec.effective_weights();
    const std::vector<int> base_counts = detail::proportional_counts(spec.base_size, weights);
    for (std::size_t c = 0; c < base_counts.size(); ++c)
        if (base_counts[c] < 2)
            throw std::invalid_argument("build_stream: base_size too small, cluster " + std::to_string(c) +
                                        " would get " + std::to_string(base_counts[c]) + " samples");
    const std::vector<int> chunk_counts = detail::proportional_counts(spec.chunk_size, weights);
    const int target = default_drift_target(spec);

    // Seeded shuffle of the clean/drift schedule.
    std::vector<bool> drifted(spec.n_clean, false);
    drifted.insert(drifted.end(), spec.n_drift, true);
    auto schedule_rng = detail::substream(spec.seed, 0x5C, 0);
    std::shuffle(drifted.begin(), drifted.end(), schedule_rng);

    LabeledStream stream;
    {
        auto rng = detail::substream(spec.seed, 0xC0, 0);
        detail::GeneratedChunk base = detail::generate_chunk(spec.clusters, base_counts, rng, 0);
        base.chunk.drift_label = false;
        stream.chunks.push_back(std::move(base.chunk));
        stream.class_labels.push_back(std::move(base.labels));
    }
    for (std::size_t t = 0; t < drifted.size(); ++t) {
        const int chunk_index = static_cast<int>(t) + 1;
        auto rng = detail::substream(spec.seed, 0xC0, static_cast<std::uint32_t>(chunk_index));
        detail::GeneratedChunk gen;
        if (!drifted[t]) {
            gen = detail::generate_chunk(spec.clusters, chunk_counts, rng, chunk_index);
            gen.chunk.drift_label = false;
        } else {
            std::uniform_real_distribution<double> margin(0.1, 1.0);
            const double u = margin(rng);  // fresh margin per drifted chunk
            const DriftedCluster dc = inject_drift(spec.clusters[target], {target, u, spec.drift_kind}, rng);
            std::vector<ClusterSpec> clusters = spec.clusters;
            clusters[target] = dc.spec;
            gen = detail::generate_chunk(clusters, chunk_counts, rng, chunk_index, dc.noise_fraction, target);
            gen.chunk.drift_label = true;
            DriftMetadata meta;
            meta.chunk_index = chunk_index;
            meta.target_cluster = target;
            meta.u = u;
            meta.kind = to_string(spec.drift_kind);
            meta.shift = dc.shift;
            stream.metadata.push_back(std::move(meta));
        }
        stream.chunks.push_back(std::move(gen.chunk));
        stream.class_labels.push_back(std::move(gen.labels));
    }
    return stream;
}

// ---------------------------------------------------------------------------
// Real-dataset ingestion with drift injection.

namespace detail {

// Random involution over dimensions: shuffled indices are paired up and each
// pair swapped, so applying the permutation twice restores the input.
inline std::vector<int> random_involution(std::size_t d, std::mt19937_64& rng) {
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i + 1 < d; i += 2) {
        perm[idx[i]] = idx[i + 1];
        perm[idx[i + 1]] = idx[i];
    }
    return perm;
}

}  // namespace detail

inline LabeledStream ingest_real(const std::string& csv_path, const std::string& class_column,
                                 const StreamSpec& spec) {
    if (spec.k_classes < 2) throw std::invalid_argument("ingest_real: k_classes must be >= 2");
    const RawTable table = read_csv_table(csv_path);
    const int class_idx = table.column_index(class_column);
    if (class_idx < 0) throw DataError(csv_path + ": no column named '" + class_column + "'");
    const std::size_t d = table.columns.size() - 1;
    if (d < 1) throw DataError(csv_path + ": no feature columns");

    // Feature matrix and per-class row pools, classes ordered by pool size
    // (descending, first appearance breaking ties).
    std::vector<std::vector<double>> rows(table.rows.size());
    std::vector<std::string> row_class(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        rows[r].reserve(d);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (static_cast<int>(c) == class_idx) continue;
            rows[r].push_back(parse_double(table.rows[r][c]));
        }
        row_class[r] = table.rows[r][class_idx];
    }
    std::vector<std::string> class_order;
    std::map<std::string, std::vector<int>> pools;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!pools.count(row_class[r])) class_order.push_back(row_class[r]);
        pools[row_class[r]].push_back(static_cast<int>(r));
    }
    std::stable_sort(class_order.begin(), class_order.end(), [&](const std::string& a, const std::string& b) {
        return pools[a].size() > pools[b].size();
    });
    if (static_cast<int>(class_order.size()) < spec.k_classes)
        throw DataError(csv_path + ": needs >= " + std::to_string(spec.k_classes) + " classes, found " +
                        std::to_string(class_order.size()));
    const std::vector<std::string> selected(class_order.begin(), class_order.begin() + spec.k_classes);
    const std::vector<std::string> held_out(class_order.begin() + spec.k_classes, class_order.end());

    std::vector<double> weights(selected.size(), 1.0);
    weights[0] = spec.imbalance_ratio;  // most frequent class carries the imbalance

    auto check_capacity = [&](const std::vector<int>& counts, const char* what) {
        std::string shortfall;
        for (std::size_t c = 0; c < selected.size(); ++c)
            if (static_cast<std::size_t>(counts[c]) > pools[selected[c]].size())
                shortfall += " class '" + selected[c] + "' needs " + std::to_string(counts[c]) + " has " +
                             std::to_string(pools[selected[c]].size()) + ";";
        if (!shortfall.empty())
            throw DataError(std::string("ingest_real: insufficient rows for ") + what + ":" + shortfall);
    };
    const std::vector<int> base_counts = detail::proportional_counts(spec.base_size, weights);
    const std::vector<int> chunk_counts = detail::proportional_counts(spec.chunk_size, weights);
    check_capacity(base_counts, "base chunk");
    check_capacity(chunk_counts, "incoming chunks");

    auto draw_chunk = [&](const std::vector<int>& counts, std::mt19937_64& rng, int chunk_index) {
        detail::GeneratedChunk out;
        out.chunk.chunk_index = chunk_index;
        int id = 0;
        for (std::size_t c = 0; c < selected.size(); ++c) {
            std::vector<int> picked;
            std::sample(pools[selected[c]].begin(), pools[selected[c]].end(), std::back_inserter(picked),
                        counts[c], rng);
            for (int r : picked) {
                out.chunk.samples.push_back({rows[r], id++});
                out.labels.push_back(static_cast<int>(c));
            }
        }
        detail::shuffle_chunk(out, rng);
        return out;
    };

    std::vector<bool> drifted(spec.n_clean, false);
    drifted.insert(drifted.end(), spec.n_drift, true);
    auto schedule_rng = detail::substream(spec.seed, 0x5C, 0);
    std::shuffle(drifted.begin(), drifted.end(), schedule_rng);

    LabeledStream stream;
    {
        auto rng = detail::substream(spec.seed, 0xC0, 0);
        detail::GeneratedChunk base = draw_chunk(base_counts, rng, 0);
        base.chunk.drift_label = false;
        stream.chunks.push_back(std::move(base.chunk));
        stream.class_labels.push_back(std::move(base.labels));
    }
    const bool want_permute = spec.real_drift != RealDriftKind::substitute;
    bool want_substitute = spec.real_drift != RealDriftKind::permute;
    if (want_substitute && held_out.empty()) {
        std::cerr << "icd3: warning: no held-out classes for substitution drift; using permutation only\n";
        want_substitute = false;
    }

    for (std::size_t t = 0; t < drifted.size(); ++t) {
        const int chunk_index = static_cast<int>(t) + 1;
        auto rng = detail::substream(spec.seed, 0xC0, static_cast<std::uint32_t>(chunk_index));
        detail::GeneratedChunk gen = draw_chunk(chunk_counts, rng, chunk_index);
        gen.chunk.drift_label = drifted[t];
        if (drifted[t]) {
            std::uniform_real_distribution<double> margin(0.1, 1.0);
            const double u = margin(rng);
            const int n = static_cast<int>(gen.chunk.samples.size());
            const int affected = static_cast<int>(std::ceil(u * n));
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);

            DriftMetadata meta;
            meta.chunk_index = chunk_index;
            meta.target_cluster = -1;
            meta.u = u;
            if (want_permute) {
                meta.permutation = detail::random_involution(d, rng);
                for (int i = 0; i < affected; ++i) {
                    std::vector<double>& x = gen.chunk.samples[order[i]].features;
                    std::vector<double> y(d);
                    for (std::size_t f = 0; f < d; ++f) y[f] = x[meta.permutation[f]];
                    x = std::move(y);
                }
            }
            if (want_substitute) {
                std::uniform_int_distribution<int> pick_class(0, static_cast<int>(held_out.size()) - 1);
                for (int i = 0; i < affected; ++i) {
                    const std::vector<int>& pool = pools[held_out[pick_class(rng)]];
                    std::uniform_int_distribution<int> pick_row(0, static_cast<int>(pool.size()) - 1);
                    gen.chunk.samples[order[i]].features = rows[pool[pick_row(rng)]];
                }
            }
            meta.kind = want_permute && want_substitute ? "permute+substitute"
                       : want_permute                   ? "permute"
                                                        : "substitute";
            stream.metadata.push_back(std::move(meta));
        }
        stream.chunks.push_back(std::move(gen.chunk));
        stream.class_labels.push_back(std::move(gen.labels));
    }
    return stream;
}

// ---------------------------------------------------------------------------
// Spec / stream serialization.

inline ClusterSpec cluster_spec_from_json(const nlohmann::json& j) {
    ClusterSpec c;
    const std::string type = j.value("type", "gaussian");
    if (type == "gaussian") {
        c.type = ClusterSpec::Type::gaussian;
        c.gaussian.mean = j.at("mean").get<std::vector<double>>();
        if (j.contains("cov")) {
            c.gaussian.cov = j.at("cov").get<std::vector<std::vector<double>>>();
        } else {
            // "std" shorthand: diagonal covariance
            const auto sd = j.value("std", std::vector<double>(c.gaussian.mean.size(), 1.0));
            c.gaussian.cov.assign(sd.size(), std::vector<double>(sd.size(), 0.0));
            for (std::size_t i = 0; i < sd.size(); ++i) c.gaussian.cov[i][i] = sd[i] * sd[i];
        }
    } else if (type == "moon") {
        c.type = ClusterSpec::Type::moon;
        c.moon.center = j.at("center").get<std::vector<double>>();
        c.moon.radius = j.value("radius", 1.0);
        c.moon.noise_std = j.value("noise_std", 0.1);
        c.moon.arc_start = j.value("arc_start", 0.0);
        c.moon.arc_end = j.value("arc_end", std::numbers::pi);
    } else {
        throw std::invalid_argument("unknown cluster type: " + type);
    }
    c.weight = j.value("weight", 0.0);
    return c;
}

inline nlohmann::json cluster_spec_to_json(const ClusterSpec& c) {
    nlohmann::json j;
    if (c.type == ClusterSpec::Type::gaussian) {
        j["type"] = "gaussian";
        j["mean"] = c.gaussian.mean;
        j["cov"] = c.gaussian.cov;
    } else {
        j["type"] = "moon";
        j["center"] = c.moon.center;
        j["radius"] = c.moon.radius;
        j["noise_std"] = c.moon.noise_std;
        j["arc_start"] = c.moon.arc_start;
        j["arc_end"] = c.moon.arc_end;
    }
    if (c.weight > 0.0) j["weight"] = c.weight;
    return j;
}

inline StreamSpec stream_spec_from_json(const nlohmann::json& j) {
    StreamSpec spec;
    for (const auto& cj : j.at("clusters")) spec.clusters.push_back(cluster_spec_from_json(cj));
    spec.imbalance_ratio = j.value("imbalance_ratio", 1.0);
    spec.base_size = j.value("base_size", 2000);
    spec.chunk_size = j.value("chunk_size", 500);
    spec.n_clean = j.value("n_clean", 250);
    spec.n_drift = j.value("n_drift", 250);
    spec.drift_kind = drift_kind_from_string(j.value("drift_kind", "mean"));
    spec.drift_target = j.value("drift_target", -1);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.k_classes = j.value("k_classes", 2);
    spec.real_drift = real_drift_kind_from_string(j.value("real_drift", "both"));
    spec.validate();
    return spec;
}

inline nlohmann::json stream_spec_to_json(const StreamSpec& spec) {
    nlohmann::json j;
    j["clusters"] = nlohmann::json::array();
    for (const ClusterSpec& c : spec.clusters) j["clusters"].push_back(cluster_spec_to_json(c));
    j["imbalance_ratio"] = spec.imbalance_ratio;
    j["base_size"] = spec.base_size;
    j["chunk_size"] = spec.chunk_size;
    j["n_clean"] = spec.n_clean;
    j["n_drift"] = spec.n_drift;
    j["drift_kind"] = to_string(spec.drift_kind);
    j["drift_target"] = spec.drift_target;
    j["seed"] = spec.seed;
    j["k_classes"] = spec.k_classes;
    return j;
}

// Writes chunk CSVs, the stream manifest and the ground-truth drift metadata
// into a directory.
inline std::string write_stream(const std::string& dir, const LabeledStream& stream) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<ManifestEntry> entries;
    for (std::size_t t = 0; t < stream.chunks.size(); ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "chunk_%04zu.csv", t);
        write_chunk_csv((fs::path(dir) / name).string(), stream.chunks[t], stream.class_labels[t]);
        entries.push_back({name, stream.chunks[t].drift_label.value_or(false)});
    }
    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    write_manifest(manifest_path, entries);

    nlohmann::json meta = nlohmann::json::array();
    for (const DriftMetadata& m : stream.metadata) {
        nlohmann::json mj{{"chunk_index", m.chunk_index}, {"target_cluster", m.target_cluster},
                          {"u", m.u},                     {"kind", m.kind}};
        if (!m.shift.empty()) mj["shift"] = m.shift;
        if (!m.permutation.empty()) mj["permutation"] = m.permutation;
        meta.push_back(std::move(mj));
    }
    std::ofstream mout(fs::path(dir) / "metadata.json");
    mout << meta.dump(2) << "\n";
    return manifest_path;
}

}  // namespace icd3
