#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gia {

// Deterministic random source. All distributions are implemented here on top
// of std::mt19937_64 (whose output sequence the standard pins down), so runs
// are reproducible across compilers and standard libraries. Sub-streams are
// derived by name from a root seed, letting components vary independently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Derived seed for a named component; stable across runs.
    static std::uint64_t derive(std::uint64_t root, std::string_view name);
    static std::uint64_t derive(std::uint64_t root, std::string_view name, std::uint64_t index);

    Rng stream(std::string_view name) const { return Rng(derive(seed_, name)); }
    Rng stream(std::string_view name, std::uint64_t index) const { return Rng(derive(seed_, name, index)); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0,1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; draws two uniforms per call.
    double normal();

    // Uniform integer in [lo, hi], unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, i - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace gia
