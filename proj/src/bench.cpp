#include "gia/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <new>
#include <string>

#ifdef __linux__
#include <sched.h>
#endif

#include "gia/alloc_stats.hpp"
#include "gia/attention.hpp"
#include "gia/error.hpp"
#include "gia/rng.hpp"
#include "gia/tape.hpp"

namespace gia {

std::string_view to_string(Mechanism m) { return m == Mechanism::kCca ? "cca" : "tca"; }
std::string_view to_string(BenchPass p) { return p == BenchPass::kForward ? "forward" : "forward+backward"; }

std::size_t default_mem_budget_bytes() {
#ifdef __linux__
    std::ifstream meminfo("/proc/meminfo");
    std::string key;
    std::size_t kb = 0;
    while (meminfo >> key >> kb) {
        if (key == "MemAvailable:") {
            meminfo.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            return kb * 1024 / 10 * 8;  // 80% of available
        }
        meminfo.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    }
#endif
    return static_cast<std::size_t>(4) << 30;
}

std::size_t projected_peak_bytes(Mechanism mechanism, BenchPass pass, std::size_t n, std::size_t d) {
    // Live elements: inputs and Q/K/V/output are N×d; CCA holds the N×N
    // scores and their softmax at once. Backward roughly doubles the live
    // set (the tape keeps values, gradients mirror them).
    const std::size_t nd = n * d;
    std::size_t elems = mechanism == Mechanism::kCca ? 2 * n * n + 7 * nd : 7 * nd + 4 * d * d;
    if (pass == BenchPass::kForwardBackward) elems *= 2;
    return elems * sizeof(double);
}

namespace {

struct Inputs {
    Matrix x_hat, p_hat;
    GiaParams params;
};

Inputs make_inputs(std::size_t n, std::size_t d, Rng rng) {
    Inputs in;
    in.x_hat = Matrix(n, d);
    in.p_hat = Matrix(n, d);
    for (std::size_t i = 0; i < in.x_hat.size(); ++i) in.x_hat.data()[i] = rng.normal();
    for (std::size_t i = 0; i < in.p_hat.size(); ++i) in.p_hat.data()[i] = rng.normal();
    // Q/K/V stay enabled so the comparison isolates the score-matrix shape.
    in.params = GiaParams::init(d, d, rng.stream("params"));
    in.params.use_qkv = true;
    return in;
}

double run_forward(Mechanism mech, const Inputs& in) {
    const auto t0 = std::chrono::steady_clock::now();
    Matrix out = mech == Mechanism::kCca ? conventional_cross_attention(in.x_hat, in.p_hat, in.params)
                                         : transpose_cross_attention(in.x_hat, in.p_hat, in.params);
    const auto t1 = std::chrono::steady_clock::now();
    if (out.rows() != in.x_hat.rows() || out.cols() != in.x_hat.cols() || !out.all_finite()) {
        throw TrainingError("bench: mechanism produced an invalid output");
    }
    return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

double run_forward_backward(Mechanism mech, const Inputs& in) {
    const auto t0 = std::chrono::steady_clock::now();
    Tape tape;
    GiaParamNodes ids = register_gia_params(tape, in.params);
    Tape::NodeId x = tape.constant(in.x_hat);
    Tape::NodeId p = tape.constant(in.p_hat);
    Tape::NodeId out = mech == Mechanism::kCca ? conventional_cross_attention(tape, x, p, ids, in.params)
                                               : transpose_cross_attention(tape, x, p, ids, in.params);
    Tape::NodeId loss = tape.sum(out);
    const std::vector<Tape::NodeId> wrt{ids.w_q, ids.w_k, ids.w_v};
    std::vector<Matrix> grads = tape.gradients(loss, wrt);
    const auto t1 = std::chrono::steady_clock::now();
    if (grads.empty() || !grads[0].all_finite()) {
        throw TrainingError("bench: backward produced an invalid gradient");
    }
    return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

#ifdef __linux__
struct CoreGuard {
    cpu_set_t previous;
    bool active = false;

    explicit CoreGuard(bool pin) {
        if (!pin) return;
        if (sched_getaffinity(0, sizeof previous, &previous) != 0) return;
        cpu_set_t one;
        CPU_ZERO(&one);
        CPU_SET(0, &one);
        if (sched_setaffinity(0, sizeof one, &one) == 0) active = true;
    }
    ~CoreGuard() {
        if (active) sched_setaffinity(0, sizeof previous, &previous);
    }
};
#else
struct CoreGuard {
    explicit CoreGuard(bool) {}
};
#endif

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
    if (config.n_values.size() < 3) throw ValidationError("bench: need at least 3 N values");
    if (!std::is_sorted(config.n_values.begin(), config.n_values.end())) {
        throw ValidationError("bench: N values must be sorted ascending");
    }
    if (config.reps < 5) throw ValidationError("bench: need at least 5 reps");

    const std::size_t budget = config.mem_budget_bytes > 0 ? config.mem_budget_bytes : default_mem_budget_bytes();
    CoreGuard guard(config.pin_core);

    BenchReport report;
    for (BenchPass pass : config.passes) {
        for (std::size_t n : config.n_values) {
            for (Mechanism mech : {Mechanism::kCca, Mechanism::kTca}) {
                BenchRow row;
                row.mechanism = mech;
                row.n = n;
                row.d = config.d;
                row.pass = pass;

                if (projected_peak_bytes(mech, pass, n, config.d) > budget) {
                    row.skipped = true;
                    row.skip_reason = "memory";
                    report.rows.push_back(std::move(row));
                    continue;
                }

                std::vector<double> times;
                times.reserve(config.reps);
                std::int64_t peak = 0;
                bool oom = false;
                for (std::size_t rep = 0; rep < config.reps && !oom; ++rep) {
                    // Same stream for both mechanisms: identical inputs.
                    Inputs in = make_inputs(n, config.d, Rng(config.seed).stream("bench", n * 131 + rep));
                    const std::int64_t baseline = alloc::current_elems();
                    alloc::reset_peak();
                    try {
                        times.push_back(pass == BenchPass::kForward ? run_forward(mech, in)
                                                                    : run_forward_backward(mech, in));
                    } catch (const std::bad_alloc&) {
                        oom = true;
                        break;
                    }
                    peak = std::max(peak, alloc::peak_elems() - baseline);
                }
                if (oom) {
                    row.skipped = true;
                    row.skip_reason = "memory";
                    report.rows.push_back(std::move(row));
                    continue;
                }

                std::sort(times.begin(), times.end());
                const std::size_t mid = times.size() / 2;
                row.median_ns = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
                row.min_ns = times.front();
                row.peak_alloc_elems = peak;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

double fit_scaling_exponent(const BenchReport& report, Mechanism mechanism, BenchPass pass) {
    std::vector<double> xs, ys;
    for (const auto& row : report.rows) {
        if (row.mechanism != mechanism || row.pass != pass || row.skipped) continue;
        xs.push_back(std::log(static_cast<double>(row.n)));
        ys.push_back(std::log(row.median_ns));
    }
    if (xs.size() < 3) {
        throw ValidationError("fit_scaling_exponent: need at least 3 timed points, got " +
                              std::to_string(xs.size()));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

void write_bench_csv(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "mechanism,n,d,pass,median_ns,min_ns,peak_alloc_elems\n";
    for (const auto& row : report.rows) {
        out << to_string(row.mechanism) << ',' << row.n << ',' << row.d << ',' << to_string(row.pass) << ',';
        if (row.skipped) {
            out << "skipped: " << row.skip_reason << ",,";
        } else {
            out << row.median_ns << ',' << row.min_ns << ',' << row.peak_alloc_elems;
        }
        out << '\n';
    }
    if (!out.good()) throw IoError("write failed: " + path.string());
}

nlohmann::json bench_summary_json(const BenchReport& report) {
    nlohmann::json j;
    for (BenchPass pass : {BenchPass::kForward, BenchPass::kForwardBackward}) {
        for (Mechanism mech : {Mechanism::kCca, Mechanism::kTca}) {
            bool any = false;
            for (const auto& row : report.rows) {
                any = any || (row.pass == pass && row.mechanism == mech && !row.skipped);
            }
            if (!any) continue;
            const std::string key = std::string(to_string(mech)) +
                                    (pass == BenchPass::kForward ? "" : "_backward");
            try {
                j["exponents"][key] = fit_scaling_exponent(report, mech, pass);
            } catch (const ValidationError&) {
                j["exponents"][key] = nullptr;  // fewer than 3 surviving points
            }
        }
    }
    return j;
}

}  // namespace gia
