// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion carries a wall-clock budget that is part of
// its pass condition.
//
// Shared fixture: a 2-D two-Gaussian stream, majority at the origin and the
// minority 8 sigma away, imbalance ratio 15, covariance drift on the minority
// with a fresh margin per drifted chunk, fixed seed. Detection runs with
// descriptor quantile nu = 0.1 (boundary tight enough that the gamma
// sensitivity shape is visible) and every chunk scored against the initial
// base model, the protocol the comparison tables use.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "icd3/icd3.hpp"

using namespace icd3;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, double seconds, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", number, name.c_str(), seconds,
                detail.c_str());
    if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name, double budget_seconds,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = Clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (seconds > budget_seconds) {
        pass = false;
        detail += " [over budget of " + std::to_string(budget_seconds) + "s]";
    }
    report(number, name, pass, seconds, detail);
}

ClusterSpec gauss(double mx, double my, double weight = 0.0) {
    ClusterSpec c;
    c.gaussian.mean = {mx, my};
    c.gaussian.cov = {{1, 0}, {0, 1}};
    c.weight = weight;
    return c;
}

StreamSpec masking_spec(int n_each, std::uint64_t seed = 5) {
    StreamSpec spec;
    spec.clusters = {gauss(0, 0), gauss(8, 0)};
    spec.imbalance_ratio = 15;
    spec.base_size = 2000;
    spec.chunk_size = 500;
    spec.n_clean = n_each;
    spec.n_drift = n_each;
    spec.drift_kind = DriftKind::covariance;
    spec.seed = seed;
    return spec;
}

BenchConfig bench_config() {
    BenchConfig cfg;
    cfg.train.descriptor.nu = 0.1;
    cfg.train.seed = 5;
    return cfg;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// frozen across criteria 1, 2 and 4
LabeledStream& masking_stream() {
    static LabeledStream stream = build_stream(masking_spec(100));
    return stream;
}

}  // namespace

// --- criterion 1: masking-effect reproduction -------------------------------

static std::pair<bool, std::string> criterion1() {
    const LabeledStream& stream = masking_stream();
    const BenchConfig cfg = bench_config();
    const VariantResult full = run_variant(AblationVariant::full, stream, cfg);
    const VariantResult single = run_variant(AblationVariant::single_descriptor, stream, cfg);
    const bool pass = full.accuracy >= 0.80 && full.auc >= 0.85 && single.accuracy <= 0.60;
    return {pass, "FULL acc=" + fmt(full.accuracy) + " (>=0.80), auc=" + fmt(full.auc) +
                      " (>=0.85); single-descriptor acc=" + fmt(single.accuracy) + " (<=0.60)"};
}

// --- criterion 2: gamma sensitivity shape ------------------------------------

static std::pair<bool, std::string> criterion2() {
    const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8};
    const SweepTable table = sweep_gamma(masking_stream().chunks, bench_config(), grid);
    double best_mid = 0.0;
    for (const SweepRow& r : table.rows)
        if (r.axis_value >= 0.2 - 1e-12 && r.axis_value <= 0.4 + 1e-12)
            best_mid = std::max(best_mid, r.accuracy);
    const double at01 = table.rows.front().accuracy;
    const double at08 = table.rows.back().accuracy;
    const bool pass = best_mid >= at01 + 0.05 && best_mid >= at08 + 0.05;
    std::string cols;
    for (const SweepRow& r : table.rows) cols += fmt(r.accuracy) + " ";
    return {pass, "accuracy over {0.1..0.8}: " + cols + "; best mid " + fmt(best_mid) +
                      " vs gamma=0.1 " + fmt(at01) + " and gamma=0.8 " + fmt(at08) + " (margin 0.05)"};
}

// --- criterion 3: imbalance-ratio robustness ---------------------------------

static std::pair<bool, std::string> criterion3() {
    StreamSpec tpl = masking_spec(40, 11);
    BenchConfig cfg = bench_config();
    cfg.train.seed = 11;
    const std::vector<double> grid = {1, 5, 15, 40};
    const SweepTable full = sweep_ir(tpl, cfg, grid, AblationVariant::full);
    const SweepTable single = sweep_ir(tpl, cfg, grid, AblationVariant::single_descriptor);
    const double f1 = full.rows.front().accuracy, f40 = full.rows.back().accuracy;
    const double c1 = single.rows.front().accuracy, c40 = single.rows.back().accuracy;
    const bool pass = f40 >= f1 - 0.15 && (c1 - c40) >= 0.25;
    std::string detail = "FULL acc: ";
    for (const SweepRow& r : full.rows) detail += fmt(r.accuracy) + " ";
    detail += "(IR40 >= IR1-0.15); single: ";
    for (const SweepRow& r : single.rows) detail += fmt(r.accuracy) + " ";
    detail += "(degrades >= 0.25)";
    return {pass, detail};
}

// --- criterion 4: ablation ordering ------------------------------------------

static std::pair<bool, std::string> criterion4() {
    const LabeledStream& stream = masking_stream();
    const BenchConfig cfg = bench_config();
    const double full = run_variant(AblationVariant::full, stream, cfg).accuracy;
    const double a = run_variant(AblationVariant::random_init, stream, cfg).accuracy;
    const double c = run_variant(AblationVariant::single_descriptor, stream, cfg).accuracy;
    const bool pass = full >= a && a >= c - 0.05 && (full - c) >= 0.2;
    return {pass, "FULL=" + fmt(full) + " >= A=" + fmt(a) + " >= C-0.05 (C=" + fmt(c) +
                      "); FULL-C=" + fmt(full - c) + " (>=0.2)"};
}

// --- criterion 5: k* recovery ------------------------------------------------

static std::pair<bool, std::string> criterion5() {
    auto recover = [](const std::vector<double>& weights, std::uint64_t seed) {
        StreamSpec spec;
        spec.clusters = {gauss(0, 0, weights[0]), gauss(8, 0, weights[1]), gauss(4, 7, weights[2])};
        spec.base_size = 2000;
        spec.seed = seed;
        const Chunk base = gen_base(spec);
        const Chunk nb = apply_normalizer(fit_normalizer(base), base);
        const LearnResult lr = learn_prototypes(nb, LearnConfig{}, seed_prototypes(nb, 5));
        return fuse(nb, lr.partition, lr.prototypes).k_star;
    };
    int balanced = 0, imbalanced = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        balanced += recover({1, 1, 1}, s) == 3 ? 1 : 0;
        imbalanced += recover({15, 15, 1}, s) == 3 ? 1 : 0;
    }
    const bool pass = balanced >= 9 && imbalanced >= 8;
    return {pass, "k*=3 in " + std::to_string(balanced) + "/10 balanced (>=9) and " +
                      std::to_string(imbalanced) + "/10 at 15:1 (>=8)"};
}

// --- criterion 6: oracle equivalence suites ----------------------------------

namespace oracle {

double mixture_pdf(double a, double m1, double v1, double w1, double m2, double v2, double w2) {
    auto npdf = [](double x, double m, double v) {
        return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2.0 * std::numbers::pi * v);
    };
    return w1 * npdf(a, m1, v1) + w2 * npdf(a, m2, v2);
}

double zeta(const std::vector<double>& pos_i, const std::vector<double>& pos_j) {
    auto moments = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= v.size();
        double var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        return std::pair<double, double>{m, std::max(var / v.size(), kVarianceFloor)};
    };
    auto [m1, v1] = moments(pos_i);
    auto [m2, v2] = moments(pos_j);
    const double w1 = double(pos_i.size()) / (pos_i.size() + pos_j.size());
    const double lo = std::min(m1, m2), hi = std::max(m1, m2);
    double valley = std::numeric_limits<double>::infinity();
    bool hit = false;
    for (int t = 0; t <= 100; ++t) {
        const double a = -0.5 + 0.01 * t;
        if (a < lo - 1e-12 || a > hi + 1e-12) continue;
        valley = std::min(valley, mixture_pdf(a, m1, v1, w1, m2, v2, 1.0 - w1));
        hit = true;
    }
    if (!hit) valley = mixture_pdf(0.5 * (lo + hi), m1, v1, w1, m2, v2, 1.0 - w1);
    if (!(valley > 1.0 / kZetaCap)) return kZetaCap;
    return std::min(1.0 / valley, kZetaCap);
}

}  // namespace oracle

static std::pair<bool, std::string> criterion6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);

    // 6a: RNN / density vs brute-force oracle
    for (int t = 0; t < 50; ++t) {
        std::uniform_int_distribution<int> size(2, 200);
        const int n = size(rng);
        std::vector<std::vector<double>> rows(n, std::vector<double>(2));
        for (auto& r : rows)
            for (double& v : r) v = uni(rng);
        const Chunk c = make_chunk(rows);
        const NeighborTable table = compute_rnn(c);
        const DensityStats stats = density_stats(c);
        // oracle: full distance matrix, independent loops
        std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dist[i][j] = std::hypot(rows[i][0] - rows[j][0], rows[i][1] - rows[j][1]);
        for (int i = 0; i < n; ++i) {
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j)
                if (j != i && dist[i][j] < bd) { bd = dist[i][j]; best = j; }
            if (table.nn[i] != best) return {false, "nn mismatch vs oracle"};
        }
        std::vector<double> rho(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            long cnt = 0;
            for (int j = 0; j < n; ++j)
                if (j != i && table.nn[j] == i) { sum += dist[i][j]; ++cnt; }
            rho[i] = cnt ? std::exp(-sum / cnt) : 0.0;
            if (std::abs(rho[i] - stats.rho[i]) > 1e-9) return {false, "rho mismatch vs oracle"};
        }
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity(), maxd = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                maxd = std::max(maxd, dist[i][j]);
                if (rho[j] > rho[i] || (rho[j] == rho[i] && j < i)) best = std::min(best, dist[i][j]);
            }
            const double want = std::isinf(best) ? maxd : best;
            if (std::abs(want - stats.delta[i]) > 1e-9) return {false, "delta mismatch vs oracle"};
        }
    }

    // 6b: pair separation vs the dense-grid mixture oracle
    std::uniform_int_distribution<int> psize(1, 50);
    for (int t = 0; t < 300; ++t) {
        std::uniform_real_distribution<double> pos(-1.0, 1.0);
        std::vector<double> a(psize(rng)), b(psize(rng));
        for (double& v : a) v = pos(rng);
        for (double& v : b) v = pos(rng);
        const double got = pair_separation(a, b);
        const double want = oracle::zeta(a, b);
        if (std::abs(got / want - 1.0) > 1e-6) return {false, "zeta mismatch vs oracle"};
    }

    // 6c: classify/score consistency and training containment
    std::uniform_real_distribution<double> pick_nu(0.02, 0.3);
    std::uniform_int_distribution<int> csize(2, 150);
    for (int t = 0; t < 50; ++t) {
        const int n = csize(rng);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<std::vector<double>> xs;
        for (int i = 0; i < n; ++i) xs.push_back({normal(rng), normal(rng)});
        DescriptorConfig cfg;
        cfg.nu = pick_nu(rng);
        const Descriptor d = fit_descriptor(xs, cfg);
        long out = 0;
        for (const auto& x : xs) {
            const int cls = classify(d, x);
            if ((cls == 1) != (score(d, x) > 0.0)) return {false, "classify/score inconsistent"};
            out += cls;
        }
        if (out > static_cast<long>(std::ceil(cfg.nu * n)) + 1)
            return {false, "containment bound violated: " + std::to_string(out) + " outliers"};
    }
    return {true, "rnn/density exact vs oracle; zeta within 1e-6; containment <= ceil(nu*n)+1"};
}

// --- criterion 7: determinism and replay identity ----------------------------

static std::pair<bool, std::string> criterion7() {
    StreamSpec spec = masking_spec(10, 1234);
    const LabeledStream stream = build_stream(spec);
    StreamOptions opts;  // detect-then-train defaults
    opts.train.descriptor.nu = 0.1;
    auto serialize = [](const StreamResult& r) {
        std::string out;
        for (const DriftReport& rep : r.reports) out += drift_report_to_json(rep).dump() + "\n";
        return out;
    };
    const std::string a = serialize(process_stream(stream.chunks, opts));
    const std::string b = serialize(process_stream(stream.chunks, opts));
    if (a != b) return {false, "two runs produced different report bytes"};

    const ConceptModel model = train_concept_model(stream.chunks[0], opts.train);
    const DriftReport replay = detect(model, stream.chunks[0], opts.detector);
    if (replay.drifted) return {false, "base chunk drifted against its own model"};
    return {true, "byte-identical reports across runs; base-chunk replay is drift-free"};
}

// --- criterion 8: false-alarm calibration ------------------------------------

static std::pair<bool, std::string> criterion8() {
    StreamSpec spec = masking_spec(50, 808);
    spec.n_drift = 0;
    spec.n_clean = 50;
    const LabeledStream stream = build_stream(spec);
    StreamOptions opts;  // nu = 0.05, gamma = 0.2 defaults, detect-then-train on
    const StreamResult res = process_stream(stream.chunks, opts);
    long alarms = 0;
    for (const DriftReport& r : res.reports) alarms += r.drifted ? 1 : 0;
    const double rate = static_cast<double>(alarms) / static_cast<double>(res.reports.size());
    return {rate <= 0.1, "false-alarm rate " + fmt(rate) + " over 50 clean chunks (<= 0.1)"};
}

// --- criterion 9: drift localization and region vectors ----------------------

static std::pair<bool, std::string> criterion9() {
    // the worked 8-sample fixture: exactly 3 of 8 outside -> theta = 0.375
    Descriptor ball;
    ball.kind = DescriptorKind::soft_ball;
    ball.center = {0.0, 0.0};
    ball.radius = 1.0;
    const std::vector<std::vector<double>> eight = {{0, 0},   {0.3, 0.2}, {-0.5, 0}, {0, 0.9},
                                                    {1.0, 0}, {2.0, 0},   {0, -1.5}, {1.2, 1.2}};
    if (ood_proportion(ball, eight) != 0.375) return {false, "8-sample fixture theta != 0.375"};

    int localized = 0;
    double cos_sum = 0.0;
    int cos_count = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        StreamSpec spec = masking_spec(1, 900 + s);
        const Chunk base = gen_base(spec);
        TrainOptions train;
        train.descriptor.nu = 0.1;
        const ConceptModel model = train_concept_model(base, train);

        const std::vector<double> shift = {4.0, 4.0};  // well beyond the descriptor radius
        StreamSpec moved = spec;
        moved.clusters[1].gaussian.mean = {8.0 + shift[0], 0.0 + shift[1]};
        moved.n_clean = 1;
        moved.n_drift = 0;
        const Chunk incoming = build_stream(moved).chunks[1];
        const DriftReport r = detect(model, incoming, DetectorConfig{});

        // which model cluster is the minority: the one containing (8, 0)
        const ClusterPartition probe =
            partition_incoming(model, apply_normalizer(model.normalizer, make_chunk({{8.0, 0.0}})));
        const int minority_cluster = probe.assignment[0];
        if (r.drifted && r.drifted_clusters == std::vector<int>{minority_cluster}) ++localized;

        if (!r.region_vectors.empty()) {
            std::vector<double> mean_g(2, 0.0);
            for (const RegionVector& v : r.region_vectors)
                for (int f = 0; f < 2; ++f) mean_g[f] += v.displacement[f] / r.region_vectors.size();
            const std::vector<double> shift_norm = {shift[0] / model.normalizer.scale[0],
                                                    shift[1] / model.normalizer.scale[1]};
            double dot = 0, na = 0, nb = 0;
            for (int f = 0; f < 2; ++f) {
                dot += mean_g[f] * shift_norm[f];
                na += mean_g[f] * mean_g[f];
                nb += shift_norm[f] * shift_norm[f];
            }
            cos_sum += dot / std::sqrt(na * nb);
            ++cos_count;
        }
    }
    const double mean_cos = cos_count ? cos_sum / cos_count : 0.0;
    const bool pass = localized >= 9 && mean_cos > 0.9;
    return {pass, "exact minority localization in " + std::to_string(localized) +
                      "/10 seeds (>=9); mean region-vector cosine " + fmt(mean_cos) + " (>0.9); theta=0.375 exact"};
}

int main() {
    run_criterion(1, "masking-effect reproduction", 180, criterion1);
    run_criterion(2, "gamma sensitivity shape", 300, criterion2);
    run_criterion(3, "imbalance-ratio robustness", 600, criterion3);
    run_criterion(4, "ablation ordering", 180, criterion4);
    run_criterion(5, "k* recovery", 60, criterion5);
    run_criterion(6, "oracle equivalence suites", 30, criterion6);
    run_criterion(7, "determinism and replay identity", 120, criterion7);
    run_criterion(8, "false-alarm calibration", 120, criterion8);
    run_criterion(9, "drift localization and region vectors", 120, criterion9);
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
