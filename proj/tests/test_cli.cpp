#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icd3/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ICD3_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_spec(const fs::path& p) {
    std::ofstream out(p);
    out << R"({
      "clusters": [
        {"type": "gaussian", "mean": [0, 0], "cov": [[1, 0], [0, 1]]},
        {"type": "gaussian", "mean": [8, 0], "cov": [[1, 0], [0, 1]]}
      ],
      "imbalance_ratio": 8,
      "base_size": 600,
      "chunk_size": 250,
      "n_clean": 4,
      "n_drift": 4,
      "drift_kind": "covariance",
      "seed": 77
    })";
}

}  // namespace

TEST(Cli, GenerateDetectEndToEnd) {
    TempDir dir("icd3_cli_e2e");
    write_spec(dir.path / "spec.json");
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "stream").string() + " --seed 77"),
              0);
    ASSERT_TRUE(fs::exists(dir.path / "stream" / "manifest.json"));
    ASSERT_TRUE(fs::exists(dir.path / "stream" / "chunk_0000.csv"));
    ASSERT_TRUE(fs::exists(dir.path / "stream" / "metadata.json"));

    ASSERT_EQ(run_cli("detect --manifest " + (dir.path / "stream" / "manifest.json").string() + " --out " +
                      (dir.path / "run").string() + " --seed 77 --nu 0.1 --dump-fusion"),
              0);
    ASSERT_TRUE(fs::exists(dir.path / "run" / "summary.csv"));
    ASSERT_TRUE(fs::exists(dir.path / "run" / "history.json"));
    ASSERT_TRUE(fs::exists(dir.path / "run" / "report_0001.json"));
    ASSERT_TRUE(fs::exists(dir.path / "run" / "fusion_0000.json"));

    const icd3::RawTable summary = icd3::read_csv_table((dir.path / "run" / "summary.csv").string());
    EXPECT_EQ(summary.rows.size(), 9u);  // base row + 8 chunks
    EXPECT_EQ(summary.rows[0][0], "0");
    EXPECT_EQ(summary.rows[0][1], "0");
}

TEST(Cli, StationaryStreamSummaryHasNoAlarmsAfterRowZero) {
    TempDir dir("icd3_cli_stationary");
    {
        std::ofstream out(dir.path / "spec.json");
        out << R"({"clusters": [{"type":"gaussian","mean":[0,0],"cov":[[1,0],[0,1]]},
                               {"type":"gaussian","mean":[8,0],"cov":[[1,0],[0,1]]}],
                   "imbalance_ratio": 4, "base_size": 600, "chunk_size": 250,
                   "n_clean": 5, "n_drift": 0, "seed": 5})";
    }
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "stream").string() + " --seed 5"),
              0);
    ASSERT_EQ(run_cli("detect --manifest " + (dir.path / "stream" / "manifest.json").string() + " --out " +
                      (dir.path / "run").string() + " --seed 5"),
              0);
    const icd3::RawTable summary = icd3::read_csv_table((dir.path / "run" / "summary.csv").string());
    for (const auto& row : summary.rows) EXPECT_EQ(row[1], "0");
}

TEST(Cli, DeterministicOutputs) {
    TempDir dir("icd3_cli_determinism");
    write_spec(dir.path / "spec.json");
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "s1").string() + " --seed 7"),
              0);
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "s2").string() + " --seed 7"),
              0);
    for (const char* name : {"chunk_0000.csv", "chunk_0003.csv", "manifest.json", "metadata.json"})
        EXPECT_EQ(slurp(dir.path / "s1" / name), slurp(dir.path / "s2" / name)) << name;

    for (const char* run : {"r1", "r2"})
        ASSERT_EQ(run_cli("detect --manifest " + (dir.path / "s1" / "manifest.json").string() + " --out " +
                          (dir.path / run).string() + " --seed 7"),
                  0);
    EXPECT_EQ(slurp(dir.path / "r1" / "summary.csv"), slurp(dir.path / "r2" / "summary.csv"));
    EXPECT_EQ(slurp(dir.path / "r1" / "report_0004.json"), slurp(dir.path / "r2" / "report_0004.json"));
}

TEST(Cli, BenchAndSweepAndReport) {
    TempDir dir("icd3_cli_bench");
    write_spec(dir.path / "spec.json");
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "stream").string() + " --seed 77"),
              0);
    ASSERT_EQ(run_cli("bench --manifest " + (dir.path / "stream" / "manifest.json").string() + " --out " +
                      (dir.path / "bench").string() + " --seed 77 --nu 0.1"),
              0);
    const icd3::RawTable metrics = icd3::read_csv_table((dir.path / "bench" / "bench_metrics.csv").string());
    ASSERT_EQ(metrics.rows.size(), 4u);  // FULL, A, B, C
    EXPECT_TRUE(fs::exists(dir.path / "bench" / "trace_FULL.csv"));

    ASSERT_EQ(run_cli("sweep --axis gamma --manifest " + (dir.path / "stream" / "manifest.json").string() +
                      " --out " + (dir.path / "sweep").string() + " --seed 77 --nu 0.1"),
              0);
    const icd3::RawTable sweep = icd3::read_csv_table((dir.path / "sweep" / "sweep_gamma.csv").string());
    EXPECT_EQ(sweep.rows.size(), 7u);  // the default gamma grid

    ASSERT_EQ(run_cli("report --table " + (dir.path / "sweep" / "sweep_gamma.csv").string() +
                      " --x gamma --y accuracy,gmean --out-file " + (dir.path / "plot.svg").string()),
              0);
    const std::string svg = slurp(dir.path / "plot.svg");
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    TempDir dir("icd3_cli_exitcodes");
    // usage error: missing required option
    EXPECT_EQ(run_cli("generate"), 1);
    // usage error: seed is mandatory
    write_spec(dir.path / "spec.json");
    EXPECT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --out " +
                      (dir.path / "x").string()),
              1);
    // data error: unreadable manifest
    EXPECT_EQ(run_cli("detect --manifest " + (dir.path / "missing.json").string() + " --seed 1"), 2);
    // data error: malformed spec file
    {
        std::ofstream out(dir.path / "bad.json");
        out << "{ not json";
    }
    EXPECT_EQ(run_cli("generate --spec " + (dir.path / "bad.json").string() + " --seed 1"), 2);
}

TEST(Cli, OutDirEnvFallback) {
    TempDir dir("icd3_cli_envdir");
    write_spec(dir.path / "spec.json");
    const std::string cmd = "ICD3_OUT_DIR=" + (dir.path / "from_env").string() + " " + ICD3_CLI_PATH +
                            " generate --spec " + (dir.path / "spec.json").string() +
                            " --seed 77 >/dev/null 2>&1";
    ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    EXPECT_TRUE(fs::exists(dir.path / "from_env" / "manifest.json"));
}

TEST(Cli, ConfigFileWithFlagOverride) {
    TempDir dir("icd3_cli_config");
    write_spec(dir.path / "spec.json");
    {
        std::ofstream out(dir.path / "config.json");
        out << R"({"seed": 77, "detector": {"gamma": 0.2}, "descriptor": {"nu": 0.1},
                   "out_dir": ")" << (dir.path / "from_config").string() << R"("})";
    }
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --config " +
                      (dir.path / "config.json").string()),
              0);
    EXPECT_TRUE(fs::exists(dir.path / "from_config" / "manifest.json"));
    // flag overrides config out_dir
    ASSERT_EQ(run_cli("generate --spec " + (dir.path / "spec.json").string() + " --config " +
                      (dir.path / "config.json").string() + " --out " + (dir.path / "flag_wins").string()),
              0);
    EXPECT_TRUE(fs::exists(dir.path / "flag_wins" / "manifest.json"));
}
