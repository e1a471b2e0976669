#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gia/gnn.hpp"
#include "gia/preprocess.hpp"
#include "gia/synthgen.hpp"
#include "gia/training.hpp"

namespace gia::cli {

// Flat dotted-key configuration (train.epochs=500). Lines starting with '#'
// are comments. Typed getters record which keys were consumed so typos can
// be reported.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::filesystem::path& path);

    void set_pair(const std::string& assignment);  // "key=value"
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long get_int(const std::string& key, long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    // Throws ConfigError listing any key that was never consumed.
    void require_all_consumed() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

enum class Task { kOccurrence, kSeverity };

struct RunConfig {
    Task task = Task::kOccurrence;
    ModelConfig model;
    TrainConfig train;
    NormalizeMode normalize = NormalizeMode::kFitOnTrain;
    std::array<double, 3> split_ratios{0.6, 0.2, 0.2};
    std::uint64_t seed = 0;
    std::size_t n_seeds = 5;
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> dataset_path;  // exclusive with synth
    std::optional<SynthConfig> synth;

    static RunConfig parse(const KeyValueConfig& kv);
};

int cmd_gen(const RunConfig& config);
int cmd_train(const RunConfig& config, const std::optional<std::filesystem::path>& baseline);
int cmd_ablate(const RunConfig& config);

// Entry point used by main() and by tests; returns the process exit code
// (0 ok, 1 validation/config error, 2 runtime failure).
int run(const std::vector<std::string>& args);

}  // namespace gia::cli
