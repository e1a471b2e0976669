#include "gia/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gia/bench.hpp"
#include "gia/error.hpp"

namespace gia::cli {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    KeyValueConfig kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim_copy(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + " line " + std::to_string(line_no) + ": expected key=value, got '" +
                              t + "'");
        }
        kv.set(trim_copy(t.substr(0, eq)), trim_copy(t.substr(eq + 1)));
    }
    return kv;
}

void KeyValueConfig::set_pair(const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' must have the form key=value");
    }
    set(trim_copy(assignment.substr(0, eq)), trim_copy(assignment.substr(eq + 1)));
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    if (key.empty()) throw ConfigError("empty config key");
    values_[key] = value;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long v = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + it->second + "'");
    }
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key '" + key + "': expected number, got '" + it->second + "'");
    }
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key '" + key + "': expected true|false, got '" + it->second + "'");
}

void KeyValueConfig::require_all_consumed() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) {
        throw ConfigError("unknown config keys: " + unknown);
    }
}

RunConfig RunConfig::parse(const KeyValueConfig& kv) {
    RunConfig rc;
    const std::string task = kv.get_string("task", "occurrence");
    if (task == "occurrence") {
        rc.task = Task::kOccurrence;
    } else if (task == "severity") {
        rc.task = Task::kSeverity;
    } else {
        throw ConfigError("task must be occurrence|severity, got '" + task + "'");
    }

    rc.model.pe_mode = pe_mode_from_string(kv.get_string("pe_mode", "gia"));
    rc.model.host = host_from_string(kv.get_string("host", "gcn"));
    rc.model.d_latent = static_cast<std::size_t>(kv.get_int("model.d_latent", 16));
    rc.model.n_conv_layers = static_cast<std::size_t>(kv.get_int("model.conv_layers", 2));
    rc.model.use_qkv = kv.get_bool("model.use_qkv", true);
    const std::string res = kv.get_string("model.residual_source", "features");
    if (res == "features") {
        rc.model.residual_source = ResidualSource::kFeatures;
    } else if (res == "features_plus_positions") {
        rc.model.residual_source = ResidualSource::kFeaturesPlusPositions;
    } else {
        throw ConfigError("model.residual_source must be features|features_plus_positions");
    }
    rc.model.n_classes = rc.task == Task::kOccurrence ? 2 : 8;

    rc.train.epochs = static_cast<std::size_t>(kv.get_int("train.epochs", 500));
    rc.train.learning_rate = kv.get_double("train.learning_rate", 0.01);
    rc.train.class_weighting = class_weighting_from_string(kv.get_string("train.class_weighting", "inverse-frequency"));
    rc.train.metric_average = metric_average_from_string(
        kv.get_string("train.metric_average", rc.task == Task::kOccurrence ? "binary-positive" : "macro"));

    const std::string norm = kv.get_string("normalize.mode", "fit-on-train");
    if (norm == "fit-on-train") {
        rc.normalize = NormalizeMode::kFitOnTrain;
    } else if (norm == "per-split") {
        rc.normalize = NormalizeMode::kPerSplit;
    } else {
        throw ConfigError("normalize.mode must be fit-on-train|per-split");
    }

    const std::string ratios = kv.get_string("split.ratios", "0.6,0.2,0.2");
    {
        std::stringstream ss(ratios);
        std::string cell;
        std::vector<double> parts;
        while (std::getline(ss, cell, ',')) parts.push_back(std::stod(cell));
        if (parts.size() != 3) throw ConfigError("split.ratios must have 3 comma-separated values");
        rc.split_ratios = {parts[0], parts[1], parts[2]};
    }

    rc.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));
    rc.n_seeds = static_cast<std::size_t>(kv.get_int("n_seeds", 5));
    if (rc.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    rc.output_dir = kv.get_string("output_dir", "out");

    const std::string dataset_path = kv.get_string("dataset.path", "");
    const bool has_synth = kv.has("dataset.synthetic.n_nodes");
    SynthConfig synth;
    synth.n_nodes = static_cast<std::size_t>(kv.get_int("dataset.synthetic.n_nodes", 2000));
    synth.connect_radius = kv.get_double("dataset.synthetic.connect_radius", 0.03);
    synth.n_clusters = static_cast<std::size_t>(kv.get_int("dataset.synthetic.n_clusters", 8));
    synth.label_noise = kv.get_double("dataset.synthetic.label_noise", 0.1);
    synth.feature_dim = static_cast<std::size_t>(kv.get_int("dataset.synthetic.feature_dim", 8));
    synth.informativeness = kv.get_double("dataset.synthetic.informativeness", 0.3);
    synth.hotspot_radius = kv.get_double("dataset.synthetic.hotspot_radius", 0.0);
    synth.target_positive_rate = kv.get_double("dataset.synthetic.target_positive_rate", 0.15);
    synth.n_classes = rc.task == Task::kOccurrence ? 2 : 8;
    synth.seed = Rng::derive(rc.seed, "generator");

    if (!dataset_path.empty() && has_synth) {
        throw ConfigError("config must set either dataset.path or dataset.synthetic.*, not both");
    }
    if (!dataset_path.empty()) {
        rc.dataset_path = dataset_path;
    } else {
        rc.synth = synth;  // synthetic is the default dataset source
    }

    kv.require_all_consumed();
    return rc;
}

namespace {

std::string_view to_string(Task task) { return task == Task::kOccurrence ? "occurrence" : "severity"; }

Graph obtain_graph(const RunConfig& rc) {
    if (rc.dataset_path) {
        Graph g = load_graph(*rc.dataset_path);
        const int expected = rc.task == Task::kOccurrence ? 2 : 8;
        if (g.n_classes != expected) {
            throw ValidationError("dataset at " + rc.dataset_path->string() + " has " +
                                  std::to_string(g.n_classes) + " classes but task " + std::string(to_string(rc.task)) +
                                  " expects " + std::to_string(expected));
        }
        return g;
    }
    return generate(*rc.synth).graph;
}

struct SeedOutcome {
    std::uint64_t seed = 0;
    TrainReport report;
};

// Runs one seed end to end: split → normalize → train.
SeedOutcome run_seed(const Graph& graph, const RunConfig& rc, std::uint64_t seed) {
    SplitMasks masks = stratified_split(graph.labels, rc.split_ratios, Rng::derive(seed, "split"));
    Graph normalized = minmax_normalize(graph, masks, rc.normalize);
    TrainConfig tc = rc.train;
    tc.seed = seed;
    auto [params, report] = train(normalized, masks, rc.model, tc);
    return SeedOutcome{seed, std::move(report)};
}

// Seeds are independent; run them on a small worker pool and merge by index.
std::vector<SeedOutcome> run_all_seeds(const Graph& graph, const RunConfig& rc) {
    std::vector<SeedOutcome> outcomes(rc.n_seeds);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const std::size_t workers = std::min<std::size_t>(
        rc.n_seeds, std::max<std::size_t>(1, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t k = next.fetch_add(1);
                if (k >= rc.n_seeds) return;
                try {
                    outcomes[k] = run_seed(graph, rc, rc.seed + k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return outcomes;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Population std, so a single seed reports exactly 0.
double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

nlohmann::json aggregate(const std::vector<SeedOutcome>& outcomes, bool with_auc) {
    std::vector<double> f1, auc;
    for (const auto& o : outcomes) {
        f1.push_back(o.report.test_f1);
        if (with_auc) auc.push_back(o.report.test_auc);
    }
    const bool auc_ok = with_auc && std::none_of(auc.begin(), auc.end(), [](double x) { return std::isnan(x); });
    const double nan = std::numeric_limits<double>::quiet_NaN();
    nlohmann::json j;
    j["mean"] = {{"test_f1", mean_of(f1)}, {"test_auc", auc_ok ? mean_of(auc) : nan}};
    j["std"] = {{"test_f1", std_of(f1)}, {"test_auc", auc_ok ? std_of(auc) : nan}};
    j["median"] = {{"test_f1", median_of(f1)}, {"test_auc", auc_ok ? median_of(auc) : nan}};
    return j;
}

nlohmann::json results_json(const RunConfig& rc, const std::vector<SeedOutcome>& outcomes) {
    nlohmann::json j;
    j["task"] = std::string(to_string(rc.task));
    j["pe_mode"] = std::string(gia::to_string(rc.model.pe_mode));
    j["host"] = std::string(gia::to_string(rc.model.host));
    j["n_seeds"] = rc.n_seeds;
    j["epochs"] = rc.train.epochs;
    j["seeds"] = nlohmann::json::array();
    j["per_seed"] = nlohmann::json::array();
    for (const auto& o : outcomes) {
        j["seeds"].push_back(o.seed);
        j["per_seed"].push_back({{"seed", o.seed},
                                 {"test_f1", o.report.test_f1},
                                 {"test_auc", o.report.test_auc},
                                 {"best_epoch", o.report.best_epoch}});
    }
    const nlohmann::json agg = aggregate(outcomes, rc.task == Task::kOccurrence);
    j["mean"] = agg["mean"];
    j["std"] = agg["std"];
    j["median"] = agg["median"];
    return j;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out.good()) throw IoError("write failed: " + path.string());
}

}  // namespace

int cmd_gen(const RunConfig& rc) {
    if (!rc.synth) {
        throw ConfigError("gen requires a synthetic dataset config (dataset.synthetic.*)");
    }
    std::filesystem::create_directories(rc.output_dir);
    SynthResult result = generate(*rc.synth);
    save_graph(result.graph, rc.output_dir);
    save_metadata(result, *rc.synth, rc.output_dir);

    const Graph& g = result.graph;
    std::cout << "dataset: " << rc.output_dir.string() << "\n";
    std::cout << "nodes: " << g.n_nodes << "\nedges: " << g.edges.size() << "\n";
    if (g.n_classes == 2) {
        std::size_t pos = 0;
        for (int y : g.labels) pos += y;
        std::cout << "positive rate: " << static_cast<double>(pos) / static_cast<double>(g.n_nodes) << "\n";
    } else {
        std::vector<std::size_t> hist(g.n_classes, 0);
        for (int y : g.labels) ++hist[y];
        std::cout << "label histogram:";
        for (std::size_t h : hist) std::cout << ' ' << h;
        std::cout << "\n";
    }
    return 0;
}

int cmd_train(const RunConfig& rc, const std::optional<std::filesystem::path>& baseline) {
    std::filesystem::create_directories(rc.output_dir);
    const Graph graph = obtain_graph(rc);
    const std::vector<SeedOutcome> outcomes = run_all_seeds(graph, rc);

    for (const auto& o : outcomes) {
        write_json(report_to_json(o.report), rc.output_dir / ("report_seed" + std::to_string(o.seed) + ".json"));
    }

    nlohmann::json j = results_json(rc, outcomes);
    if (baseline) {
        std::ifstream in(*baseline);
        if (!in) throw IoError("cannot open baseline results " + baseline->string());
        nlohmann::json base = nlohmann::json::parse(in);
        nlohmann::json delta;
        delta["test_f1"] = j["mean"]["test_f1"].get<double>() - base["mean"]["test_f1"].get<double>();
        if (j["mean"]["test_auc"].is_number() && base["mean"]["test_auc"].is_number()) {
            delta["test_auc"] = j["mean"]["test_auc"].get<double>() - base["mean"]["test_auc"].get<double>();
        } else {
            delta["test_auc"] = nullptr;
        }
        j["delta"] = delta;
    }
    write_json(j, rc.output_dir / "results.json");

    std::cout << "pe_mode=" << gia::to_string(rc.model.pe_mode) << " host=" << gia::to_string(rc.model.host)
              << " seeds=" << rc.n_seeds << "\n";
    std::cout << "test F1 mean=" << j["mean"]["test_f1"].get<double>()
              << " std=" << j["std"]["test_f1"].get<double>() << "\n";
    if (j["mean"]["test_auc"].is_number() && !std::isnan(j["mean"]["test_auc"].get<double>())) {
        std::cout << "test AUC mean=" << j["mean"]["test_auc"].get<double>()
                  << " std=" << j["std"]["test_auc"].get<double>() << "\n";
    }
    return 0;
}

int cmd_ablate(const RunConfig& rc) {
    std::filesystem::create_directories(rc.output_dir);
    const Graph graph = obtain_graph(rc);

    const std::array<PeMode, 4> modes{PeMode::kNone, PeMode::kLinear, PeMode::kSinusoidal, PeMode::kGia};
    std::vector<double> mean_f1(modes.size(), 0.0);
    for (std::size_t m = 0; m < modes.size(); ++m) {
        RunConfig arm = rc;
        arm.model.pe_mode = modes[m];
        const auto outcomes = run_all_seeds(graph, arm);
        std::vector<double> f1;
        for (const auto& o : outcomes) f1.push_back(o.report.test_f1);
        mean_f1[m] = mean_of(f1);
        write_json(results_json(arm, outcomes),
                   rc.output_dir / ("results_" + std::string(gia::to_string(modes[m])) + ".json"));
    }

    const auto csv_path = rc.output_dir / "ablation.csv";
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write " + csv_path.string());
    out << "mode,mean_f1,delta_f1_vs_none\n";
    for (std::size_t m = 0; m < modes.size(); ++m) {
        out << gia::to_string(modes[m]) << ',' << mean_f1[m] << ',' << mean_f1[m] - mean_f1[0] << '\n';
    }
    if (!out.good()) throw IoError("write failed: " + csv_path.string());

    std::cout << "ablation written to " << csv_path.string() << "\n";
    for (std::size_t m = 0; m < modes.size(); ++m) {
        std::cout << gia::to_string(modes[m]) << ": mean F1 " << mean_f1[m] << " (delta "
                  << mean_f1[m] - mean_f1[0] << ")\n";
    }
    return 0;
}

namespace {

RunConfig config_from_cli(const std::string& config_path, const std::vector<std::string>& overrides,
                          const std::string& out_dir) {
    KeyValueConfig kv = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::from_file(config_path);
    for (const auto& assignment : overrides) kv.set_pair(assignment);
    if (!out_dir.empty()) kv.set("output_dir", out_dir);
    return RunConfig::parse(kv);
}

std::vector<BenchPass> parse_passes(const std::string& text) {
    std::vector<BenchPass> passes;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell == "forward") {
            passes.push_back(BenchPass::kForward);
        } else if (cell == "backward" || cell == "forward+backward" || cell == "forward_backward") {
            passes.push_back(BenchPass::kForwardBackward);
        } else {
            throw ConfigError("unknown pass '" + cell + "' (expected forward|backward)");
        }
    }
    if (passes.empty()) throw ConfigError("--passes must name at least one pass");
    return passes;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Geographic-attention GNN pipeline: generate, train, ablate, benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_dir, baseline;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key=value config file");
        cmd->add_option("--set", overrides, "override a config key (key=value), repeatable");
        cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    add_common(gen);
    CLI::App* trn = app.add_subcommand("train", "train and evaluate over seeds");
    add_common(trn);
    trn->add_option("--baseline", baseline, "existing results.json; adds delta fields (this - baseline)");
    CLI::App* abl = app.add_subcommand("ablate", "run all pe_mode arms with shared seeds");
    add_common(abl);

    CLI::App* ben = app.add_subcommand("bench", "time cca vs tca over a grid of N");
    std::string n_list = "2048,4096,8192,16384";
    std::size_t bench_d = 16, bench_reps = 5;
    std::string passes_spec = "forward";
    std::string bench_out = ".";
    std::uint64_t bench_seed = 0;
    double mem_budget_gb = 0.0;
    bool no_pin = false;
    ben->add_option("--n-list", n_list, "comma-separated N values, ascending");
    ben->add_option("--d", bench_d, "latent dimension");
    ben->add_option("--reps", bench_reps, "repetitions per point (>= 5)");
    ben->add_option("--passes", passes_spec, "forward and/or backward, comma-separated");
    ben->add_option("--out", bench_out, "output directory");
    ben->add_option("--seed", bench_seed, "input seed");
    ben->add_option("--mem-budget-gb", mem_budget_gb, "memory budget; larger rows become skipped: memory");
    ben->add_flag("--no-pin", no_pin, "do not pin to one core");

    try {
        std::vector<std::string> argv_like(args.rbegin(), args.rend());
        app.parse(argv_like);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(config_from_cli(config_path, overrides, out_dir));
        if (trn->parsed()) {
            std::optional<std::filesystem::path> base;
            if (!baseline.empty()) base = baseline;
            return cmd_train(config_from_cli(config_path, overrides, out_dir), base);
        }
        if (abl->parsed()) return cmd_ablate(config_from_cli(config_path, overrides, out_dir));
        if (ben->parsed()) {
            BenchConfig bc;
            bc.n_values.clear();
            std::stringstream ss(n_list);
            std::string cell;
            while (std::getline(ss, cell, ',')) bc.n_values.push_back(std::stoul(cell));
            bc.d = bench_d;
            bc.reps = bench_reps;
            bc.passes = parse_passes(passes_spec);
            bc.seed = bench_seed;
            bc.pin_core = !no_pin;
            if (mem_budget_gb > 0.0) {
                bc.mem_budget_bytes = static_cast<std::size_t>(mem_budget_gb * 1024.0 * 1024.0 * 1024.0);
            }
            std::filesystem::create_directories(bench_out);
            BenchReport report = run_bench(bc);
            write_bench_csv(report, std::filesystem::path(bench_out) / "bench.csv");
            write_json(bench_summary_json(report), std::filesystem::path(bench_out) / "bench_summary.json");
            std::cout << bench_summary_json(report).dump(2) << "\n";
            return 0;
        }
        return 1;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace gia::cli
