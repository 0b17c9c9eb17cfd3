#pragma once

// Drift detection against a trained concept model: incoming chunks are
// partitioned by the inherited prototypes, merged by the recorded fusion
// queues, and each merged cluster is scored by its own descriptor. Clusters
// whose out-of-distribution proportion exceeds the threshold are reported as
// drifted, with the offending samples and their displacement vectors.

#include <json.hpp>

#include "icd3/chunk.hpp"
#include "icd3/competitive.hpp"
#include "icd3/density.hpp"
#include "icd3/descriptor.hpp"
#include "icd3/fusion.hpp"

namespace icd3 {

struct DetectorConfig {
    double gamma = 0.2;           // drift threshold on the OOD proportion
    bool alarm_on_empty = false;  // treat a vanished incoming cluster as drift

    void validate() const {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("DetectorConfig: gamma must be in (0,1)");
    }
};

struct ConceptModel {
    Normalizer normalizer;
    PrototypeSet prototypes;
    FusionResult fusion;
    std::vector<Descriptor> descriptors;   // one per merged cluster
    ClusterPartition base_membership;      // merged partition of the base chunk
    int base_chunk_index = 0;

    int k_star() const { return fusion.k_star; }
};

struct ClusterDriftStat {
    int cluster = 0;
    double theta = 0.0;
    long member_count = 0;
    bool empty_alarm = false;
};

struct RegionVector {
    int sample_id = 0;
    int cluster = 0;
    int prototype = 0;
    std::vector<double> displacement;  // x - nearest prototype, model space
    double magnitude = 0.0;
};

struct DriftReport {
    int chunk_index = 0;
    bool drifted = false;
    double max_theta = 0.0;  // continuous chunk-level drift score
    std::vector<ClusterDriftStat> stats;
    std::vector<int> drifted_clusters;                 // O
    std::vector<std::vector<int>> drift_samples;       // sample ids per drifted cluster
    std::vector<RegionVector> region_vectors;
};

// Which training path produces the concept model. `full` is the standard
// pipeline; the others are the ablation variants of the benchmark suite.
enum class PipelineVariant { full, random_init, kmeans, single_descriptor };

inline std::string to_string(PipelineVariant v) {
    switch (v) {
        case PipelineVariant::full: return "FULL";
        case PipelineVariant::random_init: return "A-random-init";
        case PipelineVariant::kmeans: return "B-kmeans";
        case PipelineVariant::single_descriptor: return "C-single-descriptor";
    }
    return "?";
}

struct TrainOptions {
    NormalizerKind normalizer = NormalizerKind::standardize;
    LearnConfig learn;
    DescriptorConfig descriptor;
    PipelineVariant variant = PipelineVariant::full;
    std::uint64_t seed = 0;  // used by random-init seeding and k-means init

    void validate() const {
        learn.validate();
        descriptor.validate();
    }
};

namespace detail {

// Small chunks routinely leave thin clusters empty, so cap the log noise.
inline void warn_empty_cluster(int cluster, int chunk_index) {
    static int budget = 20;
    if (budget < 0) return;
    if (budget-- == 0) {
        std::cerr << "icd3: warning: further empty-cluster warnings suppressed\n";
        return;
    }
    std::cerr << "icd3: warning: incoming cluster " << cluster << " is empty in chunk " << chunk_index
              << "\n";
}

inline ClusterPartition merge_partition(const SubClusterPartition& part,
                                        const std::vector<std::vector<int>>& queues) {
    std::size_t k = 0;
    for (const auto& q : queues) k += q.size();
    std::vector<int> proto_to_cluster(k, -1);
    for (std::size_t c = 0; c < queues.size(); ++c)
        for (int p : queues[c]) proto_to_cluster[p] = static_cast<int>(c);
    ClusterPartition merged;
    merged.member_queues = queues;
    merged.assignment.resize(part.assignment.size());
    for (std::size_t h = 0; h < part.assignment.size(); ++h)
        merged.assignment[h] = proto_to_cluster[part.assignment[h]];
    return merged;
}

inline std::vector<Descriptor> fit_cluster_descriptors(const Chunk& normalized,
                                                       const ClusterPartition& membership,
                                                       const DescriptorConfig& cfg) {
    const std::size_t k = membership.num_clusters();
    std::vector<std::vector<std::vector<double>>> per_cluster(k);
    for (std::size_t h = 0; h < normalized.size(); ++h)
        per_cluster[membership.assignment[h]].push_back(normalized.samples[h].features);
    std::vector<Descriptor> descs;
    descs.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (per_cluster[c].empty())
            throw std::runtime_error("fit_cluster_descriptors: empty base cluster " + std::to_string(c));
        descs.push_back(fit_descriptor(per_cluster[c], cfg, static_cast<int>(c)));
    }
    return descs;
}

// Lloyd iterations for the k-means ablation. Empty clusters are reseated at
// the sample farthest from its assigned centroid.
inline std::pair<PrototypeSet, SubClusterPartition> lloyd_kmeans(const Chunk& chunk, int k,
                                                                 std::uint64_t seed, int max_iters = 100) {
    const std::size_t n = chunk.size();
    const std::size_t d = chunk.dim();
    if (k < 1 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("lloyd_kmeans: bad k");

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    PrototypeSet protos;
    for (int c = 0; c < k; ++c) {
        protos.prototypes.push_back(chunk.samples[idx[c]].features);
        protos.wins.push_back(0);
    }

    SubClusterPartition part;
    part.assignment.assign(n, -1);
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        part.counts.assign(k, 0);
        for (std::size_t h = 0; h < n; ++h) {
            const int j = assign_winner(protos, chunk.samples[h]);
            if (j != part.assignment[h]) changed = true;
            part.assignment[h] = j;
            part.counts[j] += 1;
        }
        for (int c = 0; c < k; ++c) {
            if (part.counts[c] > 0) continue;
            std::size_t worst = 0;
            double worst_d = -1.0;
            for (std::size_t h = 0; h < n; ++h) {
                const double dd = squared_distance(chunk.samples[h].features,
                                                   protos.prototypes[part.assignment[h]]);
                if (dd > worst_d && part.counts[part.assignment[h]] > 1) {
                    worst_d = dd;
                    worst = h;
                }
            }
            if (worst_d < 0.0) continue;  // nothing stealable
            part.counts[part.assignment[worst]] -= 1;
            part.assignment[worst] = c;
            part.counts[c] = 1;
            protos.prototypes[c] = chunk.samples[worst].features;
            changed = true;
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
        for (std::size_t h = 0; h < n; ++h)
            for (std::size_t f = 0; f < d; ++f) sums[part.assignment[h]][f] += chunk.samples[h].features[f];
        for (int c = 0; c < k; ++c) {
            if (part.counts[c] == 0) continue;
            for (std::size_t f = 0; f < d; ++f)
                protos.prototypes[c][f] = sums[c][f] / static_cast<double>(part.counts[c]);
        }
        if (!changed) break;
    }
    part.counts.assign(k, 0);
    for (std::size_t h = 0; h < n; ++h) {
        part.assignment[h] = assign_winner(protos, chunk.samples[h]);
        part.counts[part.assignment[h]] += 1;
    }
    return {std::move(protos), std::move(part)};
}

}  // namespace detail

inline ConceptModel train_concept_model(const Chunk& base, const TrainOptions& opts) {
    opts.validate();
    if (base.samples.empty()) throw std::invalid_argument("train_concept_model: empty base chunk");

    ConceptModel model;
    model.base_chunk_index = base.chunk_index;
    model.normalizer = fit_normalizer(base, opts.normalizer);
    const Chunk normalized = apply_normalizer(model.normalizer, base);

    switch (opts.variant) {
        case PipelineVariant::full:
        case PipelineVariant::random_init: {
            const PrototypeSet seeds = opts.variant == PipelineVariant::full
                                           ? seed_prototypes(normalized, opts.learn.kappa0)
                                           : seed_prototypes_uniform(normalized, opts.learn.kappa0, opts.seed);
            LearnResult learned = learn_prototypes(normalized, opts.learn, seeds);
            model.prototypes = std::move(learned.prototypes);
            model.fusion = fuse(normalized, learned.partition, model.prototypes);
            model.base_membership = detail::merge_partition(learned.partition, model.fusion.queues);
            break;
        }
        case PipelineVariant::kmeans: {
            // DCDL replaced by plain Lloyd clustering; fusion is skipped and
            // every centroid is its own final cluster.
            auto [protos, part] = detail::lloyd_kmeans(normalized, opts.learn.kappa0, opts.seed);
            model.prototypes = std::move(protos);
            model.fusion.k_star = static_cast<int>(model.prototypes.size());
            model.fusion.queues.clear();
            for (int c = 0; c < model.fusion.k_star; ++c) model.fusion.queues.push_back({c});
            model.base_membership = detail::merge_partition(part, model.fusion.queues);
            break;
        }
        case PipelineVariant::single_descriptor: {
            // One descriptor for the whole chunk (the masking-prone baseline).
            model.prototypes.prototypes = {std::vector<double>(normalized.dim(), 0.0)};
            model.prototypes.wins = {static_cast<long>(normalized.size())};
            model.fusion.k_star = 1;
            model.fusion.queues = {{0}};
            model.base_membership.member_queues = model.fusion.queues;
            model.base_membership.assignment.assign(normalized.size(), 0);
            break;
        }
    }
    model.descriptors = detail::fit_cluster_descriptors(normalized, model.base_membership, opts.descriptor);
    return model;
}

// Expects a chunk already normalized with the model's normalizer.
inline ClusterPartition partition_incoming(const ConceptModel& model, const Chunk& incoming) {
    SubClusterPartition sub;
    sub.assignment.resize(incoming.size());
    sub.counts.assign(model.prototypes.size(), 0);
    for (std::size_t h = 0; h < incoming.size(); ++h) {
        const int j = assign_winner(model.prototypes, incoming.samples[h]);
        sub.assignment[h] = j;
        sub.counts[j] += 1;
    }
    return detail::merge_partition(sub, model.fusion.queues);
}

inline double ood_proportion(const Descriptor& desc, const std::vector<std::vector<double>>& cluster_samples) {
    if (cluster_samples.empty()) return 0.0;
    long out = 0;
    for (const auto& x : cluster_samples) out += classify(desc, x);
    return static_cast<double>(out) / static_cast<double>(cluster_samples.size());
}

inline std::vector<RegionVector> region_vectors(const ConceptModel& model, const Chunk& normalized,
                                                const std::vector<std::vector<int>>& drift_samples,
                                                const std::vector<int>& drifted_clusters) {
    std::vector<RegionVector> out;
    for (std::size_t g = 0; g < drifted_clusters.size(); ++g) {
        for (int id : drift_samples[g]) {
            const Sample& x = normalized.samples[id];
            RegionVector rv;
            rv.sample_id = id;
            rv.cluster = drifted_clusters[g];
            rv.prototype = assign_winner(model.prototypes, x);
            rv.displacement.resize(x.dim());
            const std::vector<double>& s = model.prototypes.prototypes[rv.prototype];
            for (std::size_t f = 0; f < x.dim(); ++f) rv.displacement[f] = x.features[f] - s[f];
            rv.magnitude = std::sqrt(squared_distance(x.features, s));
            out.push_back(std::move(rv));
        }
    }
    return out;
}

inline DriftReport detect(const ConceptModel& model, const Chunk& incoming, const DetectorConfig& cfg) {
    cfg.validate();
    if (incoming.samples.empty()) throw std::invalid_argument("detect: empty incoming chunk");
    const Chunk normalized = apply_normalizer(model.normalizer, incoming);
    const ClusterPartition membership = partition_incoming(model, normalized);
    const int k = model.k_star();

    std::vector<std::vector<int>> member_ids(k);
    std::vector<std::vector<std::vector<double>>> member_xs(k);
    for (std::size_t h = 0; h < normalized.size(); ++h) {
        const int c = membership.assignment[h];
        member_ids[c].push_back(static_cast<int>(h));
        member_xs[c].push_back(normalized.samples[h].features);
    }

    DriftReport report;
    report.chunk_index = incoming.chunk_index;
    for (int c = 0; c < k; ++c) {
        ClusterDriftStat stat;
        stat.cluster = c;
        stat.member_count = static_cast<long>(member_ids[c].size());
        if (member_ids[c].empty()) {
            stat.theta = 0.0;
            if (cfg.alarm_on_empty) {
                stat.empty_alarm = true;
            } else {
                detail::warn_empty_cluster(c, incoming.chunk_index);
            }
        } else {
            stat.theta = ood_proportion(model.descriptors[c], member_xs[c]);
        }
        report.max_theta = std::max(report.max_theta, stat.theta);
        const bool drifted = stat.theta > cfg.gamma || stat.empty_alarm;
        if (drifted) {
            report.drifted_clusters.push_back(c);
            std::vector<int> ids;
            for (std::size_t m = 0; m < member_ids[c].size(); ++m)
                if (classify(model.descriptors[c], member_xs[c][m]) == 1) ids.push_back(member_ids[c][m]);
            report.drift_samples.push_back(std::move(ids));
        }
        report.stats.push_back(std::move(stat));
    }
    report.drifted = !report.drifted_clusters.empty();
    report.region_vectors = region_vectors(model, normalized, report.drift_samples, report.drifted_clusters);
    return report;
}

struct TrainEvent {
    int chunk_index = 0;
    bool success = true;
    int k_star = 0;
    int num_prototypes = 0;
};

struct StreamOptions {
    TrainOptions train;
    DetectorConfig detector;
    // Detect-then-train: promote every drifted chunk to the new base chunk.
    // Off = every chunk is scored against the initial base model, the
    // protocol used by the benchmark suite.
    bool retrain_on_drift = true;
};

struct StreamResult {
    std::vector<DriftReport> reports;   // one per chunk after the base chunk
    std::vector<TrainEvent> history;    // base-chunk (re)trainings
    std::vector<std::pair<int, FusionResult>> fusions;  // fusion per trained base chunk
};

inline StreamResult process_stream(const std::vector<Chunk>& stream, const StreamOptions& opts) {
    if (stream.empty()) throw std::invalid_argument("process_stream: empty stream");
    StreamResult result;
    ConceptModel model = train_concept_model(stream.front(), opts.train);
    result.history.push_back({stream.front().chunk_index, true, model.k_star(),
                              static_cast<int>(model.prototypes.size())});
    result.fusions.emplace_back(stream.front().chunk_index, model.fusion);
    for (std::size_t t = 1; t < stream.size(); ++t) {
        DriftReport report = detect(model, stream[t], opts.detector);
        const bool promote = report.drifted && opts.retrain_on_drift;
        result.reports.push_back(std::move(report));
        if (promote) {
            try {
                model = train_concept_model(stream[t], opts.train);
                result.history.push_back({stream[t].chunk_index, true, model.k_star(),
                                          static_cast<int>(model.prototypes.size())});
                result.fusions.emplace_back(stream[t].chunk_index, model.fusion);
            } catch (const std::exception& e) {
                std::cerr << "icd3: warning: retraining on chunk " << stream[t].chunk_index
                          << " failed (" << e.what() << "); keeping previous model\n";
                result.history.push_back({stream[t].chunk_index, false, model.k_star(),
                                          static_cast<int>(model.prototypes.size())});
            }
        }
    }
    return result;
}

inline nlohmann::json drift_report_to_json(const DriftReport& r) {
    nlohmann::json j;
    j["chunk_index"] = r.chunk_index;
    j["drifted"] = r.drifted;
    j["max_theta"] = r.max_theta;
    j["stats"] = nlohmann::json::array();
    for (const ClusterDriftStat& s : r.stats)
        j["stats"].push_back({{"cluster", s.cluster},
                              {"theta", s.theta},
                              {"member_count", s.member_count},
                              {"empty_alarm", s.empty_alarm}});
    j["drifted_clusters"] = r.drifted_clusters;
    j["drift_samples"] = r.drift_samples;
    j["region_vectors"] = nlohmann::json::array();
    for (const RegionVector& v : r.region_vectors)
        j["region_vectors"].push_back({{"sample_id", v.sample_id},
                                       {"cluster", v.cluster},
                                       {"prototype", v.prototype},
                                       {"displacement", v.displacement},
                                       {"magnitude", v.magnitude}});
    return j;
}

inline nlohmann::json fusion_to_json(const FusionResult& f) {
    nlohmann::json j;
    j["k_star"] = f.k_star;
    j["queues"] = f.queues;
    j["stages"] = nlohmann::json::array();
    for (const MergeStage& st : f.stages)
        j["stages"].push_back({{"eps", st.eps},
                               {"merged", {st.merged.first, st.merged.second}},
                               {"sep", st.sep},
                               {"com", st.com},
                               {"queues", st.queues}});
    return j;
}

}  // namespace icd3
