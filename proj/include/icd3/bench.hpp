#pragma once

// Ablation variants and parameter sweeps. The ablation variants share one
// code path: run_variant dispatches to process_stream with the matching
// pipeline variant, so the FULL variant is the detector itself.
//
// Sweep protocols: the gamma sweep runs detection once and re-thresholds the
// recorded per-chunk scores; the IR sweep regenerates the stream and reruns
// the whole pipeline per grid value.

#include "icd3/detector.hpp"
#include "icd3/metrics.hpp"
#include "icd3/stream_gen.hpp"

namespace icd3 {

using AblationVariant = PipelineVariant;

struct BenchConfig {
    TrainOptions train;
    DetectorConfig detector;
    // The benchmark protocol scores every chunk against the initial base
    // model; see StreamOptions::retrain_on_drift.
    bool retrain_on_drift = false;
};

struct VariantResult {
    AblationVariant variant = AblationVariant::full;
    ChunkVerdicts verdicts;
    double accuracy = 0.0;
    double gmean = 0.0;
    double auc = 0.0;
    StreamResult stream;
};

inline ChunkVerdicts verdicts_from_stream(const StreamResult& result, const std::vector<Chunk>& chunks) {
    ChunkVerdicts v;
    for (std::size_t t = 1; t < chunks.size(); ++t) {
        const DriftReport& r = result.reports[t - 1];
        v.predicted.push_back(r.drifted);
        v.score.push_back(r.max_theta);
        if (!chunks[t].drift_label)
            throw std::invalid_argument("verdicts_from_stream: chunk without drift label");
        v.label.push_back(*chunks[t].drift_label);
    }
    return v;
}

inline VariantResult run_variant(AblationVariant variant, const std::vector<Chunk>& chunks,
                                 const BenchConfig& cfg) {
    StreamOptions opts;
    opts.train = cfg.train;
    opts.train.variant = variant;
    opts.detector = cfg.detector;
    opts.retrain_on_drift = cfg.retrain_on_drift;

    VariantResult res;
    res.variant = variant;
    res.stream = process_stream(chunks, opts);
    res.verdicts = verdicts_from_stream(res.stream, chunks);
    res.accuracy = accuracy(res.verdicts);
    res.gmean = gmean(res.verdicts);
    res.auc = auc(res.verdicts);
    return res;
}

inline VariantResult run_variant(AblationVariant variant, const LabeledStream& stream, const BenchConfig& cfg) {
    return run_variant(variant, stream.chunks, cfg);
}

struct SweepRow {
    double axis_value = 0.0;
    double accuracy = 0.0;
    double gmean = 0.0;
    double auc = 0.0;
};

struct SweepTable {
    std::string axis;
    std::vector<SweepRow> rows;
};

// Re-thresholds the scores of a single detection run across the gamma grid.
// A chunk alarms at gamma iff its max theta exceeds gamma, so one model
// history serves every grid value.
inline SweepTable sweep_gamma(const std::vector<Chunk>& chunks, const BenchConfig& cfg,
                              const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep_gamma: empty grid");
    VariantResult ref = run_variant(AblationVariant::full, chunks, cfg);
    SweepTable table;
    table.axis = "gamma";
    for (double g : grid) {
        if (!(g > 0.0 && g < 1.0)) throw std::invalid_argument("sweep_gamma: gamma values must be in (0,1)");
        ChunkVerdicts v = ref.verdicts;
        for (std::size_t i = 0; i < v.predicted.size(); ++i) v.predicted[i] = v.score[i] > g;
        table.rows.push_back({g, accuracy(v), gmean(v), auc(v)});
    }
    return table;
}

// Regenerates the stream for each imbalance ratio and reruns detection.
inline SweepTable sweep_ir(const StreamSpec& template_spec, const BenchConfig& cfg,
                           const std::vector<double>& grid, AblationVariant variant = AblationVariant::full) {
    if (grid.empty()) throw std::invalid_argument("sweep_ir: empty grid");
    SweepTable table;
    table.axis = "ir";
    for (double ir : grid) {
        StreamSpec spec = template_spec;
        spec.imbalance_ratio = ir;
        for (ClusterSpec& c : spec.clusters) c.weight = 0.0;  // re-derive from the ratio
        const LabeledStream stream = build_stream(spec);
        const VariantResult res = run_variant(variant, stream, cfg);
        table.rows.push_back({ir, res.accuracy, res.gmean, res.auc});
    }
    return table;
}

inline std::string sweep_table_csv(const SweepTable& table) {
    std::string out = table.axis + ",accuracy,gmean,auc\n";
    for (const SweepRow& r : table.rows)
        out += fmt_double(r.axis_value) + "," + fmt_double(r.accuracy) + "," + fmt_double(r.gmean) + "," +
               fmt_double(r.auc) + "\n";
    return out;
}

// Per-chunk trace (verdicts plus running accuracy) for accuracy-over-time
// plots.
inline std::string trace_csv(const ChunkVerdicts& v) {
    std::string out = "chunk,label,predicted,score,correct,cumulative_accuracy\n";
    long correct = 0;
    for (std::size_t i = 0; i < v.predicted.size(); ++i) {
        const bool ok = v.predicted[i] == v.label[i];
        correct += ok ? 1 : 0;
        out += std::to_string(i + 1) + "," + (v.label[i] ? "1" : "0") + "," + (v.predicted[i] ? "1" : "0") +
               "," + fmt_double(v.score[i]) + "," + (ok ? "1" : "0") + "," +
               fmt_double(static_cast<double>(correct) / static_cast<double>(i + 1)) + "\n";
    }
    return out;
}

}  // namespace icd3
