#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gia/bench.hpp"
#include "gia/error.hpp"

namespace fs = std::filesystem;
using gia::BenchConfig;
using gia::BenchPass;
using gia::BenchReport;
using gia::BenchRow;
using gia::Mechanism;

namespace {

BenchReport synthetic_report(double exponent) {
    BenchReport r;
    for (std::size_t n : {1024u, 2048u, 4096u, 8192u}) {
        BenchRow row;
        row.mechanism = Mechanism::kTca;
        row.n = n;
        row.d = 16;
        row.median_ns = 3.0 * std::pow(static_cast<double>(n), exponent);
        row.min_ns = row.median_ns;
        r.rows.push_back(row);
    }
    return r;
}

}  // namespace

TEST_CASE("fit recovers exponent one from linear timings") {
    const double e = gia::fit_scaling_exponent(synthetic_report(1.0), Mechanism::kTca);
    CHECK(std::abs(e - 1.0) < 1e-9);
}

TEST_CASE("fit recovers exponent two from quadratic timings") {
    const double e = gia::fit_scaling_exponent(synthetic_report(2.0), Mechanism::kTca);
    CHECK(std::abs(e - 2.0) < 1e-9);
}

TEST_CASE("fit needs at least three surviving points") {
    BenchReport r = synthetic_report(1.0);
    r.rows.resize(2);
    CHECK_THROWS_AS(gia::fit_scaling_exponent(r, Mechanism::kTca), gia::ValidationError);
    CHECK_THROWS_AS(gia::fit_scaling_exponent(synthetic_report(1.0), Mechanism::kCca), gia::ValidationError);
}

TEST_CASE("run_bench validates its configuration") {
    BenchConfig bad;
    bad.n_values = {64, 128};
    CHECK_THROWS_AS(gia::run_bench(bad), gia::ValidationError);
    bad.n_values = {128, 64, 256};
    CHECK_THROWS_AS(gia::run_bench(bad), gia::ValidationError);
    bad.n_values = {64, 128, 256};
    bad.reps = 3;
    CHECK_THROWS_AS(gia::run_bench(bad), gia::ValidationError);
}

TEST_CASE("allocation accounting matches the complexity contract") {
    BenchConfig cfg;
    cfg.n_values = {1024, 2048, 4096};
    cfg.d = 16;
    cfg.reps = 5;
    cfg.pin_core = false;
    const BenchReport report = gia::run_bench(cfg);
    REQUIRE(report.rows.size() == 6);

    for (const auto& row : report.rows) {
        REQUIRE_FALSE(row.skipped);
        CHECK(row.median_ns > 0.0);
        CHECK(row.min_ns > 0.0);
        CHECK(row.min_ns <= row.median_ns);
        const auto nd = static_cast<std::int64_t>(row.n * row.d);
        const auto dd = static_cast<std::int64_t>(row.d * row.d);
        if (row.mechanism == Mechanism::kTca) {
            CHECK(row.peak_alloc_elems >= nd);
            CHECK(row.peak_alloc_elems <= 5 * (nd + dd));
        } else {
            CHECK(row.peak_alloc_elems >= static_cast<std::int64_t>(row.n * row.n));
        }
    }
}

TEST_CASE("a tight memory budget turns cca rows into skipped rows") {
    BenchConfig cfg;
    cfg.n_values = {256, 512, 1024};
    cfg.d = 8;
    cfg.reps = 5;
    cfg.pin_core = false;
    cfg.mem_budget_bytes = 600 * 1024;  // fits tca, far too small for any N² buffer
    const BenchReport report = gia::run_bench(cfg);

    std::size_t skipped_cca = 0, timed_tca = 0;
    for (const auto& row : report.rows) {
        if (row.mechanism == Mechanism::kCca) {
            CHECK(row.skipped);
            CHECK(row.skip_reason == "memory");
            ++skipped_cca;
        } else if (!row.skipped) {
            ++timed_tca;
        }
    }
    CHECK(skipped_cca == 3);
    CHECK(timed_tca == 3);

    // tca still fits three points, so its exponent is still defined
    CHECK_NOTHROW(gia::fit_scaling_exponent(report, Mechanism::kTca));
    CHECK_THROWS_AS(gia::fit_scaling_exponent(report, Mechanism::kCca), gia::ValidationError);
}

TEST_CASE("csv and summary emission") {
    BenchConfig cfg;
    cfg.n_values = {128, 256, 512};
    cfg.d = 8;
    cfg.reps = 5;
    cfg.pin_core = false;
    const BenchReport report = gia::run_bench(cfg);

    const fs::path dir = fs::temp_directory_path() / "gia_test_bench";
    fs::create_directories(dir);
    gia::write_bench_csv(report, dir / "bench.csv");

    std::ifstream in(dir / "bench.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "mechanism,n,d,pass,median_ns,min_ns,peak_alloc_elems");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == report.rows.size());

    const auto summary = gia::bench_summary_json(report);
    REQUIRE(summary.contains("exponents"));
    CHECK(summary["exponents"].contains("cca"));
    CHECK(summary["exponents"].contains("tca"));
}

TEST_CASE("skipped rows serialize with the skip reason in place of timings") {
    BenchReport r;
    BenchRow row;
    row.mechanism = Mechanism::kCca;
    row.n = 4096;
    row.d = 16;
    row.skipped = true;
    row.skip_reason = "memory";
    r.rows.push_back(row);
    const fs::path path = fs::temp_directory_path() / "gia_test_bench_skip.csv";
    gia::write_bench_csv(r, path);
    std::ifstream in(path);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(line == "cca,4096,16,forward,skipped: memory,,");
}

TEST_CASE("forward+backward pass rows carry their own label") {
    BenchConfig cfg;
    cfg.n_values = {64, 128, 256};
    cfg.d = 4;
    cfg.reps = 5;
    cfg.pin_core = false;
    cfg.passes = {BenchPass::kForward, BenchPass::kForwardBackward};
    const BenchReport report = gia::run_bench(cfg);
    std::size_t fwd = 0, fwdbwd = 0;
    for (const auto& row : report.rows) {
        fwd += row.pass == BenchPass::kForward;
        fwdbwd += row.pass == BenchPass::kForwardBackward;
    }
    CHECK(fwd == 6);
    CHECK(fwdbwd == 6);
}
