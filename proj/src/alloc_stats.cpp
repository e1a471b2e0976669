#include "gia/alloc_stats.hpp"

#include <algorithm>

namespace gia::alloc {

namespace {
thread_local Stats g_stats;
}

Stats stats() noexcept { return g_stats; }
std::int64_t current_elems() noexcept { return g_stats.current_elems; }
std::int64_t peak_elems() noexcept { return g_stats.peak_elems; }

void reset_peak() noexcept { g_stats.peak_elems = g_stats.current_elems; }

void record_alloc(std::size_t elems) noexcept {
    g_stats.current_elems += static_cast<std::int64_t>(elems);
    g_stats.peak_elems = std::max(g_stats.peak_elems, g_stats.current_elems);
}

void record_free(std::size_t elems) noexcept {
    g_stats.current_elems -= static_cast<std::int64_t>(elems);
}

}  // namespace gia::alloc
