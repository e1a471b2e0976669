#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gia/cli.hpp"
#include "gia/error.hpp"
#include "gia/schema.hpp"

namespace fs = std::filesystem;
using gia::cli::KeyValueConfig;
using gia::cli::RunConfig;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gia_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small, fast run shared by the command tests.
std::vector<std::string> small_run_args(const std::string& cmd, const fs::path& out) {
    return {cmd,
            "--set", "dataset.synthetic.n_nodes=200",
            "--set", "dataset.synthetic.connect_radius=0.08",
            "--set", "train.epochs=25",
            "--set", "n_seeds=2",
            "--out", out.string()};
}

}  // namespace

TEST_CASE("key-value config parses files with comments and overrides") {
    const fs::path dir = scratch_dir("kv");
    {
        std::ofstream out(dir / "run.cfg");
        out << "# comment line\n"
            << "task=occurrence\n"
            << "train.epochs = 120\n"
            << "\n"
            << "pe_mode=linear\n";
    }
    KeyValueConfig kv = KeyValueConfig::from_file(dir / "run.cfg");
    kv.set_pair("pe_mode=gia");
    CHECK(kv.get_string("task", "") == "occurrence");
    CHECK(kv.get_int("train.epochs", 0) == 120);
    CHECK(kv.get_string("pe_mode", "") == "gia");  // override wins
}

TEST_CASE("malformed config lines and values are rejected") {
    const fs::path dir = scratch_dir("kvbad");
    {
        std::ofstream out(dir / "run.cfg");
        out << "task occurrence\n";
    }
    CHECK_THROWS_AS(KeyValueConfig::from_file(dir / "run.cfg"), gia::ConfigError);

    KeyValueConfig kv;
    kv.set("train.epochs", "soon");
    CHECK_THROWS_AS(kv.get_int("train.epochs", 1), gia::ConfigError);
    kv.set("model.use_qkv", "maybe");
    CHECK_THROWS_AS(kv.get_bool("model.use_qkv", true), gia::ConfigError);
}

TEST_CASE("unknown keys are reported by name") {
    KeyValueConfig kv;
    kv.set("train.epochz", "10");
    CHECK_THROWS_WITH_AS(RunConfig::parse(kv), doctest::Contains("train.epochz"), gia::ConfigError);
}

TEST_CASE("run config defaults follow the task") {
    KeyValueConfig kv;
    kv.set("task", "severity");
    const RunConfig rc = RunConfig::parse(kv);
    CHECK(rc.model.n_classes == 8);
    CHECK(rc.train.metric_average == gia::MetricAverage::kMacro);
    CHECK(rc.synth.has_value());
    CHECK(rc.synth->n_classes == 8);

    KeyValueConfig kv2;
    const RunConfig rc2 = RunConfig::parse(kv2);
    CHECK(rc2.model.n_classes == 2);
    CHECK(rc2.train.metric_average == gia::MetricAverage::kBinaryPositive);
    CHECK(rc2.train.epochs == 500);
    CHECK(rc2.n_seeds == 5);
    CHECK(rc2.model.d_latent == 16);
}

TEST_CASE("dataset path and synthetic config are mutually exclusive") {
    KeyValueConfig kv;
    kv.set("dataset.path", "/tmp/somewhere");
    kv.set("dataset.synthetic.n_nodes", "100");
    CHECK_THROWS_AS(RunConfig::parse(kv), gia::ConfigError);
}

TEST_CASE("gen emits byte-identical datasets for a fixed seed") {
    const fs::path a = scratch_dir("gen_a");
    const fs::path b = scratch_dir("gen_b");
    auto args = [&](const fs::path& out) {
        return std::vector<std::string>{"gen",
                                        "--set", "dataset.synthetic.n_nodes=150",
                                        "--set", "dataset.synthetic.connect_radius=0.1",
                                        "--set", "seed=4",
                                        "--out", out.string()};
    };
    REQUIRE(gia::cli::run(args(a)) == 0);
    REQUIRE(gia::cli::run(args(b)) == 0);
    CHECK(slurp(a / "nodes.csv") == slurp(b / "nodes.csv"));
    CHECK(slurp(a / "edges.csv") == slurp(b / "edges.csv"));
    CHECK(slurp(a / "metadata.json") == slurp(b / "metadata.json"));

    // summary counts match the files
    const auto g = gia::load_graph(a);
    std::ifstream meta(a / "metadata.json");
    const auto j = nlohmann::json::parse(meta);
    CHECK(g.n_nodes == j["config"]["n_nodes"].get<std::size_t>());
}

TEST_CASE("train writes results.json that validates against the schema") {
    const fs::path out = scratch_dir("train_schema");
    REQUIRE(gia::cli::run(small_run_args("train", out)) == 0);

    const auto results = nlohmann::json::parse(slurp(out / "results.json"));
    std::ifstream schema_in(fs::path(GIA_SOURCE_DIR) / "schemas" / "results.schema.json");
    REQUIRE(schema_in.good());
    const auto schema = nlohmann::json::parse(schema_in);
    const auto violations = gia::schema_violations(results, schema);
    for (const auto& v : violations) MESSAGE(v);
    CHECK(violations.empty());

    CHECK(results["n_seeds"] == 2);
    CHECK(results["per_seed"].size() == 2);
    CHECK(fs::exists(out / "report_seed0.json"));
    CHECK(fs::exists(out / "report_seed1.json"));
}

TEST_CASE("train is deterministic across runs") {
    const fs::path a = scratch_dir("train_det_a");
    const fs::path b = scratch_dir("train_det_b");
    REQUIRE(gia::cli::run(small_run_args("train", a)) == 0);
    REQUIRE(gia::cli::run(small_run_args("train", b)) == 0);
    CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
    CHECK(slurp(a / "report_seed0.json") == slurp(b / "report_seed0.json"));
}

TEST_CASE("a single seed reports zero standard deviation") {
    const fs::path out = scratch_dir("train_one_seed");
    auto args = small_run_args("train", out);
    args.push_back("--set");
    args.push_back("n_seeds=1");
    REQUIRE(gia::cli::run(args) == 0);
    const auto results = nlohmann::json::parse(slurp(out / "results.json"));
    CHECK(results["std"]["test_f1"].get<double>() == 0.0);
}

TEST_CASE("baseline comparison adds delta fields") {
    const fs::path none_dir = scratch_dir("delta_none");
    auto none_args = small_run_args("train", none_dir);
    none_args.push_back("--set");
    none_args.push_back("pe_mode=none");
    REQUIRE(gia::cli::run(none_args) == 0);

    const fs::path gia_dir = scratch_dir("delta_gia");
    auto gia_args = small_run_args("train", gia_dir);
    gia_args.push_back("--set");
    gia_args.push_back("pe_mode=gia");
    gia_args.push_back("--baseline");
    gia_args.push_back((none_dir / "results.json").string());
    REQUIRE(gia::cli::run(gia_args) == 0);

    const auto none_results = nlohmann::json::parse(slurp(none_dir / "results.json"));
    const auto gia_results = nlohmann::json::parse(slurp(gia_dir / "results.json"));
    REQUIRE(gia_results.contains("delta"));
    const double expected =
        gia_results["mean"]["test_f1"].get<double>() - none_results["mean"]["test_f1"].get<double>();
    CHECK(gia_results["delta"]["test_f1"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ablate emits four rows with a zero delta for none") {
    const fs::path out = scratch_dir("ablate");
    auto args = small_run_args("ablate", out);
    args.push_back("--set");
    args.push_back("train.epochs=15");
    REQUIRE(gia::cli::run(args) == 0);

    std::ifstream in(out / "ablation.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "mode,mean_f1,delta_f1_vs_none");
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("none,", 0) == 0);
    CHECK(rows[1].rfind("linear,", 0) == 0);
    CHECK(rows[2].rfind("sinusoidal,", 0) == 0);
    CHECK(rows[3].rfind("gia,", 0) == 0);
    // delta of the none row is exactly 0
    CHECK(rows[0].substr(rows[0].rfind(',') + 1) == "0");
}

TEST_CASE("bench subcommand writes csv and summary") {
    const fs::path out = scratch_dir("bench_cmd");
    const std::vector<std::string> args{"bench", "--n-list", "64,128,256", "--d",   "8",
                                        "--reps", "5",        "--no-pin",  "--out", out.string()};
    REQUIRE(gia::cli::run(args) == 0);
    CHECK(fs::exists(out / "bench.csv"));
    const auto summary = nlohmann::json::parse(slurp(out / "bench_summary.json"));
    CHECK(summary["exponents"].contains("cca"));
    CHECK(summary["exponents"].contains("tca"));
}

TEST_CASE("severity task reports macro F1 and a null AUC") {
    const fs::path out = scratch_dir("severity");
    auto args = small_run_args("train", out);
    args.push_back("--set");
    args.push_back("task=severity");
    args.push_back("--set");
    args.push_back("dataset.synthetic.n_nodes=400");
    REQUIRE(gia::cli::run(args) == 0);
    const auto results = nlohmann::json::parse(slurp(out / "results.json"));
    CHECK(results["task"] == "severity");
    CHECK(results["mean"]["test_auc"].is_null());
    CHECK(results["per_seed"][0]["test_auc"].is_null());
    CHECK(results["mean"]["test_f1"].get<double>() > 0.0);

    const auto report = nlohmann::json::parse(slurp(out / "report_seed0.json"));
    CHECK(report["val_auc"].size() == 25);
    CHECK(report["val_auc"][0].is_null());
}

TEST_CASE("generation at city scale finishes well inside a minute") {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out = scratch_dir("gen_city");
    const std::vector<std::string> args{"gen",
                                        "--set", "dataset.synthetic.n_nodes=8461",
                                        "--set", "dataset.synthetic.connect_radius=0.012",
                                        "--set", "seed=6",
                                        "--out", out.string()};
    REQUIRE(gia::cli::run(args) == 0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 60.0);
    const auto g = gia::load_graph(out);
    CHECK(g.n_nodes == 8461);
    CHECK(g.edges.size() > 0);
}

TEST_CASE("the mean-aggregation host trains through the cli") {
    const fs::path out = scratch_dir("mean_agg");
    auto args = small_run_args("train", out);
    args.push_back("--set");
    args.push_back("host=mean-agg");
    REQUIRE(gia::cli::run(args) == 0);
    const auto results = nlohmann::json::parse(slurp(out / "results.json"));
    CHECK(results["host"] == "mean-agg");
    CHECK(results["mean"]["test_f1"].get<double>() >= 0.0);
}

TEST_CASE("exit codes distinguish validation from runtime failures") {
    // unknown config key → 1
    const fs::path out = scratch_dir("exit_codes");
    CHECK(gia::cli::run({"train", "--set", "not.a.key=1", "--out", out.string()}) == 1);
    // bench with too few reps → 1
    CHECK(gia::cli::run({"bench", "--n-list", "64,128,256", "--reps", "2", "--out", out.string()}) == 1);
    // missing dataset directory → runtime failure → 2
    CHECK(gia::cli::run({"train", "--set", "dataset.path=/nonexistent/gia", "--out", out.string()}) == 2);
    // unknown subcommand → 1
    CHECK(gia::cli::run({"frobnicate"}) == 1);
}
