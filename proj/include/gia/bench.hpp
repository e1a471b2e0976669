#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gia {

enum class Mechanism { kCca, kTca };
enum class BenchPass { kForward, kForwardBackward };

std::string_view to_string(Mechanism m);
std::string_view to_string(BenchPass p);

struct BenchRow {
    Mechanism mechanism = Mechanism::kTca;
    std::size_t n = 0;
    std::size_t d = 0;
    BenchPass pass = BenchPass::kForward;
    double median_ns = 0.0;
    double min_ns = 0.0;
    std::int64_t peak_alloc_elems = 0;  // exact, via the Matrix allocation counter
    bool skipped = false;
    std::string skip_reason;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

struct BenchConfig {
    std::vector<std::size_t> n_values{2048, 4096, 8192, 16384};
    std::size_t d = 16;
    std::size_t reps = 5;
    std::vector<BenchPass> passes{BenchPass::kForward};
    std::uint64_t seed = 0;
    // Rows whose projected footprint exceeds this are recorded as
    // "skipped: memory" instead of risking the OOM killer. 0 → auto-detect
    // from available memory.
    std::size_t mem_budget_bytes = 0;
    bool pin_core = true;
};

// Median/min wall time over reps with fresh random inputs per rep and
// identical inputs across mechanisms. Single-threaded.
BenchReport run_bench(const BenchConfig& config);

// Least-squares slope of log(median time) vs log(N). Needs >= 3 timed rows.
double fit_scaling_exponent(const BenchReport& report, Mechanism mechanism, BenchPass pass = BenchPass::kForward);

// header: mechanism,n,d,pass,median_ns,min_ns,peak_alloc_elems
void write_bench_csv(const BenchReport& report, const std::filesystem::path& path);
nlohmann::json bench_summary_json(const BenchReport& report);

std::size_t default_mem_budget_bytes();
std::size_t projected_peak_bytes(Mechanism mechanism, BenchPass pass, std::size_t n, std::size_t d);

}  // namespace gia
