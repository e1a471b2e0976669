#pragma once

#include <cstddef>
#include <cstdint>
#include <new>

namespace gia::alloc {

// Per-thread element accounting for Matrix buffers. Benchmarks read peak
// minus a baseline to get the auxiliary allocation of a single call.
struct Stats {
    std::int64_t current_elems = 0;
    std::int64_t peak_elems = 0;
};

Stats stats() noexcept;
std::int64_t current_elems() noexcept;
std::int64_t peak_elems() noexcept;

// Sets peak = current so a following call can be measured in isolation.
void reset_peak() noexcept;

void record_alloc(std::size_t elems) noexcept;
void record_free(std::size_t elems) noexcept;

// std::vector allocator that feeds the counters above.
template <class T>
struct Counting {
    using value_type = T;

    Counting() = default;
    template <class U>
    Counting(const Counting<U>&) noexcept {}

    T* allocate(std::size_t n) {
        T* p = static_cast<T*>(::operator new(n * sizeof(T)));
        record_alloc(n);
        return p;
    }
    void deallocate(T* p, std::size_t n) noexcept {
        record_free(n);
        ::operator delete(p);
    }

    template <class U>
    bool operator==(const Counting<U>&) const noexcept {
        return true;
    }
};

}  // namespace gia::alloc
