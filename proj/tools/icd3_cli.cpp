// Command-line driver: stream generation, drift detection, ablation
// benchmarks, parameter sweeps and SVG reports. A JSON config file supplies
// defaults; explicitly passed flags override matching keys. Exit codes:
// 0 success, 1 usage/config error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "icd3/icd3.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir;
    std::string spec_path;
    std::string manifest_path;
    long long seed = -1;

    icd3::TrainOptions train;
    icd3::DetectorConfig detector;
    bool retrain_on_drift = true;

    // raw flag storage for override detection
    std::string normalizer = "standardize";
    std::string descriptor_kind = "soft-ball";
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw icd3::DataError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw icd3::DataError(path + ": " + e.what());
    }
    return j;
}

void apply_config_file(CliState& st, const json& j) {
    if (j.contains("seed")) st.seed = j.at("seed").get<long long>();
    if (j.contains("out_dir")) st.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("normalizer")) st.normalizer = j.at("normalizer").get<std::string>();
    if (j.contains("retrain_on_drift")) st.retrain_on_drift = j.at("retrain_on_drift").get<bool>();
    if (j.contains("learn")) {
        const json& l = j.at("learn");
        st.train.learn.kappa0 = l.value("kappa0", st.train.learn.kappa0);
        st.train.learn.alpha = l.value("alpha", st.train.learn.alpha);
        st.train.learn.max_iters = l.value("max_iters", st.train.learn.max_iters);
        st.train.learn.growth_cap = l.value("growth_cap", st.train.learn.growth_cap);
        st.train.learn.penalty_power = l.value("penalty_power", st.train.learn.penalty_power);
        st.train.learn.min_cell_size = l.value("min_cell_size", st.train.learn.min_cell_size);
        if (l.contains("shuffle_seed") && !l.at("shuffle_seed").is_null())
            st.train.learn.shuffle_seed = l.at("shuffle_seed").get<std::uint64_t>();
    }
    if (j.contains("descriptor")) {
        const json& d = j.at("descriptor");
        st.descriptor_kind = d.value("kind", st.descriptor_kind);
        st.train.descriptor.nu = d.value("nu", st.train.descriptor.nu);
        st.train.descriptor.lambda = d.value("lambda", st.train.descriptor.lambda);
        st.train.descriptor.bandwidth = d.value("bandwidth", st.train.descriptor.bandwidth);
    }
    if (j.contains("detector")) {
        const json& d = j.at("detector");
        st.detector.gamma = d.value("gamma", st.detector.gamma);
        st.detector.alarm_on_empty = d.value("alarm_on_empty", st.detector.alarm_on_empty);
    }
}

std::string resolve_out_dir(const CliState& st) {
    if (!st.out_dir.empty()) return st.out_dir;
    if (const char* env = std::getenv("ICD3_OUT_DIR"); env && *env) return env;
    return ".";
}

icd3::StreamSpec load_spec(const CliState& st) {
    if (st.spec_path.empty()) throw std::invalid_argument("--spec is required");
    icd3::StreamSpec spec = icd3::stream_spec_from_json(load_json_file(st.spec_path));
    if (st.seed >= 0) spec.seed = static_cast<std::uint64_t>(st.seed);
    return spec;
}

void require_seed(const CliState& st) {
    if (st.seed < 0) throw std::invalid_argument("a seed is required (--seed or config \"seed\")");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw icd3::DataError("cannot write " + path);
    out << text;
}

std::string summary_csv(const icd3::StreamResult& result) {
    std::string csv = "chunk_index,drifted,max_theta,n_drifted_clusters,drifted_clusters\n";
    csv += "0,0,0,0,\n";  // base chunk row
    for (const icd3::DriftReport& r : result.reports) {
        std::string ids;
        for (std::size_t i = 0; i < r.drifted_clusters.size(); ++i)
            ids += (i ? ";" : "") + std::to_string(r.drifted_clusters[i]);
        csv += std::to_string(r.chunk_index) + "," + (r.drifted ? "1" : "0") + "," +
               icd3::fmt_double(r.max_theta) + "," + std::to_string(r.drifted_clusters.size()) + "," + ids +
               "\n";
    }
    return csv;
}

int cmd_generate(const CliState& st) {
    require_seed(st);
    const icd3::StreamSpec spec = load_spec(st);
    const icd3::LabeledStream stream = icd3::build_stream(spec);
    const std::string dir = resolve_out_dir(st);
    const std::string manifest = icd3::write_stream(dir, stream);
    write_text((fs::path(dir) / "spec_used.json").string(), icd3::stream_spec_to_json(spec).dump(2) + "\n");
    std::cout << manifest << "\n";
    return 0;
}

icd3::StreamOptions stream_options(const CliState& st) {
    icd3::StreamOptions opts;
    opts.train = st.train;
    opts.train.normalizer = icd3::normalizer_kind_from_string(st.normalizer);
    opts.train.descriptor.kind = icd3::descriptor_kind_from_string(st.descriptor_kind);
    opts.train.seed = st.seed >= 0 ? static_cast<std::uint64_t>(st.seed) : 0;
    opts.detector = st.detector;
    opts.retrain_on_drift = st.retrain_on_drift;
    opts.train.validate();
    opts.detector.validate();
    return opts;
}

int cmd_detect(const CliState& st, bool dump_fusion) {
    require_seed(st);
    if (st.manifest_path.empty()) throw std::invalid_argument("--manifest is required");
    const std::vector<icd3::Chunk> chunks = icd3::load_stream(st.manifest_path);
    const icd3::StreamOptions opts = stream_options(st);
    const icd3::StreamResult result = icd3::process_stream(chunks, opts);

    const std::string dir = resolve_out_dir(st);
    fs::create_directories(dir);
    for (const icd3::DriftReport& r : result.reports) {
        char name[32];
        std::snprintf(name, sizeof name, "report_%04d.json", r.chunk_index);
        write_text((fs::path(dir) / name).string(), icd3::drift_report_to_json(r).dump(2) + "\n");
    }
    write_text((fs::path(dir) / "summary.csv").string(), summary_csv(result));
    json hist = json::array();
    for (const icd3::TrainEvent& e : result.history)
        hist.push_back({{"chunk_index", e.chunk_index},
                        {"success", e.success},
                        {"k_star", e.k_star},
                        {"num_prototypes", e.num_prototypes}});
    write_text((fs::path(dir) / "history.json").string(), hist.dump(2) + "\n");
    if (dump_fusion) {
        for (const auto& [chunk_index, fusion] : result.fusions) {
            char name[32];
            std::snprintf(name, sizeof name, "fusion_%04d.json", chunk_index);
            write_text((fs::path(dir) / name).string(), icd3::fusion_to_json(fusion).dump(2) + "\n");
        }
    }
    long drifted = 0;
    for (const icd3::DriftReport& r : result.reports) drifted += r.drifted ? 1 : 0;
    std::cout << "chunks=" << chunks.size() << " drifted=" << drifted
              << " retrainings=" << result.history.size() - 1 << "\n";
    return 0;
}

int cmd_bench(const CliState& st) {
    require_seed(st);
    if (st.manifest_path.empty()) throw std::invalid_argument("--manifest is required");
    const std::vector<icd3::Chunk> chunks = icd3::load_stream(st.manifest_path);
    icd3::BenchConfig cfg;
    {
        const icd3::StreamOptions opts = stream_options(st);
        cfg.train = opts.train;
        cfg.detector = opts.detector;
    }
    const std::string dir = resolve_out_dir(st);
    fs::create_directories(dir);
    std::string table = "variant,accuracy,gmean,auc\n";
    for (auto v : {icd3::AblationVariant::full, icd3::AblationVariant::random_init,
                   icd3::AblationVariant::kmeans, icd3::AblationVariant::single_descriptor}) {
        const icd3::VariantResult res = icd3::run_variant(v, chunks, cfg);
        table += icd3::to_string(v) + "," + icd3::fmt_double(res.accuracy) + "," +
                 icd3::fmt_double(res.gmean) + "," + icd3::fmt_double(res.auc) + "\n";
        write_text((fs::path(dir) / ("trace_" + icd3::to_string(v) + ".csv")).string(),
                   icd3::trace_csv(res.verdicts));
        std::cout << icd3::to_string(v) << " acc=" << res.accuracy << " gmean=" << res.gmean
                  << " auc=" << res.auc << "\n";
    }
    write_text((fs::path(dir) / "bench_metrics.csv").string(), table);
    return 0;
}

int cmd_sweep(const CliState& st, const std::string& axis, std::vector<double> grid) {
    require_seed(st);
    icd3::BenchConfig cfg;
    {
        CliState tmp = st;
        const icd3::StreamOptions opts = stream_options(tmp);
        cfg.train = opts.train;
        cfg.detector = opts.detector;
    }
    const std::string dir = resolve_out_dir(st);
    fs::create_directories(dir);
    icd3::SweepTable table;
    if (axis == "gamma") {
        if (st.manifest_path.empty()) throw std::invalid_argument("gamma sweep needs --manifest");
        if (grid.empty()) grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8};
        table = icd3::sweep_gamma(icd3::load_stream(st.manifest_path), cfg, grid);
    } else if (axis == "ir") {
        if (grid.empty()) grid.assign(icd3::kIRGrid.begin(), icd3::kIRGrid.end());
        table = icd3::sweep_ir(load_spec(st), cfg, grid);
    } else {
        throw std::invalid_argument("--axis must be gamma or ir");
    }
    const std::string path = (fs::path(dir) / ("sweep_" + axis + ".csv")).string();
    write_text(path, icd3::sweep_table_csv(table));
    std::cout << path << "\n";
    return 0;
}

int cmd_report(const std::string& table_path, const std::string& x_col, std::string y_cols,
               const std::string& out_file, const std::string& kind, std::string title) {
    const icd3::RawTable table = icd3::read_csv_table(table_path);
    std::vector<std::string> ys;
    std::stringstream ss(y_cols);
    std::string item;
    while (std::getline(ss, item, ',')) ys.push_back(item);
    if (ys.empty()) throw std::invalid_argument("--y needs at least one column");
    if (title.empty()) title = fs::path(table_path).stem().string();
    const icd3::PlotData data = icd3::plot_from_table(table, x_col, ys, title);
    write_text(out_file, icd3::render_svg(data, kind == "bar"));
    std::cout << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"icd3 - imbalanced cluster descriptor drift detection"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may appear after the subcommand

    CliState st;
    bool dump_fusion = false;
    std::string axis = "gamma", grid_arg;
    std::string table_path, x_col = "gamma", y_cols = "accuracy", out_file = "plot.svg",
                plot_kind = "line", title;

    app.add_option("--config", st.config_path, "JSON config file");
    app.add_option("--seed", st.seed, "RNG seed (overrides config)");
    app.add_option("--out", st.out_dir, "output directory (default $ICD3_OUT_DIR or .)");
    app.add_option("--kappa0", st.train.learn.kappa0, "initial prototype count");
    app.add_option("--alpha", st.train.learn.alpha, "competitive learning rate");
    app.add_option("--max-iters", st.train.learn.max_iters, "learning epoch cap");
    app.add_option("--growth-cap", st.train.learn.growth_cap, "max prototypes (0 = auto)");
    app.add_option("--nu", st.train.descriptor.nu, "descriptor outlier fraction");
    app.add_option("--descriptor-kind", st.descriptor_kind, "soft-ball | kernel-svdd");
    app.add_option("--lambda", st.train.descriptor.lambda, "svdd slack trade-off");
    app.add_option("--bandwidth", st.train.descriptor.bandwidth, "svdd kernel bandwidth");
    app.add_option("--gamma", st.detector.gamma, "drift threshold");
    app.add_option("--normalizer", st.normalizer, "standardize | min-max | identity");
    app.add_flag("--alarm-on-empty", st.detector.alarm_on_empty, "alarm when an incoming cluster vanishes");
    auto* retrain_flag = app.add_flag("--retrain,!--no-retrain", st.retrain_on_drift,
                                      "retrain on detected drift (detect-then-train)");

    CLI::App* generate = app.add_subcommand("generate", "generate a labeled stream from a spec");
    generate->add_option("--spec", st.spec_path, "stream spec JSON")->required();

    CLI::App* detect = app.add_subcommand("detect", "run drift detection over a stream manifest");
    detect->add_option("--manifest", st.manifest_path, "stream manifest JSON")->required();
    detect->add_flag("--dump-fusion", dump_fusion, "write merge dendrogram JSON per trained model");

    CLI::App* bench = app.add_subcommand("bench", "run all ablation variants and emit metrics");
    bench->add_option("--manifest", st.manifest_path, "stream manifest JSON")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "gamma or imbalance-ratio sweep");
    sweep->add_option("--axis", axis, "gamma | ir")->required();
    sweep->add_option("--manifest", st.manifest_path, "stream manifest (gamma axis)");
    sweep->add_option("--spec", st.spec_path, "stream spec (ir axis)");
    sweep->add_option("--grid", grid_arg, "comma-separated grid values");

    CLI::App* report = app.add_subcommand("report", "render an SVG plot from a CSV table");
    report->add_option("--table", table_path, "input CSV")->required();
    report->add_option("--x", x_col, "x column name");
    report->add_option("--y", y_cols, "comma-separated y column names");
    report->add_option("--out-file", out_file, "output SVG path");
    report->add_option("--kind", plot_kind, "line | bar");
    report->add_option("--title", title, "plot title");

    // Flags that were passed explicitly must win over the config file, so
    // remember defaults, parse, then re-apply in order: defaults -> config ->
    // explicit flags. CLI11 already wrote flag values into CliState; the
    // config file only fills keys whose flags were not passed.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!st.config_path.empty()) {
            CliState from_config = st;
            apply_config_file(from_config, load_json_file(st.config_path));
            // explicit flags override the config
            auto passed = [&](const std::string& name) {
                return app.count_all() && app.get_option(name)->count() > 0;
            };
            if (!passed("--seed")) st.seed = from_config.seed;
            if (!passed("--out")) st.out_dir = from_config.out_dir;
            if (!passed("--kappa0")) st.train.learn.kappa0 = from_config.train.learn.kappa0;
            if (!passed("--alpha")) st.train.learn.alpha = from_config.train.learn.alpha;
            if (!passed("--max-iters")) st.train.learn.max_iters = from_config.train.learn.max_iters;
            if (!passed("--growth-cap")) st.train.learn.growth_cap = from_config.train.learn.growth_cap;
            st.train.learn.penalty_power = from_config.train.learn.penalty_power;
            st.train.learn.min_cell_size = from_config.train.learn.min_cell_size;
            st.train.learn.shuffle_seed = from_config.train.learn.shuffle_seed;
            if (!passed("--nu")) st.train.descriptor.nu = from_config.train.descriptor.nu;
            if (!passed("--descriptor-kind")) st.descriptor_kind = from_config.descriptor_kind;
            if (!passed("--lambda")) st.train.descriptor.lambda = from_config.train.descriptor.lambda;
            if (!passed("--bandwidth")) st.train.descriptor.bandwidth = from_config.train.descriptor.bandwidth;
            if (!passed("--gamma")) st.detector.gamma = from_config.detector.gamma;
            if (!passed("--normalizer")) st.normalizer = from_config.normalizer;
            if (!app.get_option("--alarm-on-empty")->count())
                st.detector.alarm_on_empty = from_config.detector.alarm_on_empty;
            if (!retrain_flag->count()) st.retrain_on_drift = from_config.retrain_on_drift;
        }

        if (generate->parsed()) return cmd_generate(st);
        if (detect->parsed()) return cmd_detect(st, dump_fusion);
        if (bench->parsed()) return cmd_bench(st);
        if (sweep->parsed()) {
            std::vector<double> grid;
            if (!grid_arg.empty()) {
                std::stringstream ss(grid_arg);
                std::string item;
                while (std::getline(ss, item, ',')) grid.push_back(icd3::parse_double(item));
            }
            return cmd_sweep(st, axis, grid);
        }
        if (report->parsed()) return cmd_report(table_path, x_col, y_cols, out_file, plot_kind, title);
        std::cerr << "icd3: no subcommand\n";
        return 1;
    } catch (const icd3::DataError& e) {
        std::cerr << "icd3: data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "icd3: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "icd3: error: " << e.what() << "\n";
        return 2;
    }
}
