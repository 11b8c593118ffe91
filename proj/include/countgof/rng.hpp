#pragma once

#include <array>
#include <cstdint>

namespace countgof {

// Philox 4x64 counter-based generator, 10 rounds.
//
// Output block i is a pure function of (key, counter prefix, i), so streams
// keyed by (seed, cell, replication) are reproducible under any scheduling
// and provably non-overlapping: each stream owns a distinct 128-bit counter
// prefix and walks its own 2^128 block range.
class CounterRng {
public:
    // Stream for one unit of work. The (cell, replication) pair is placed in
    // the high counter words; the key carries the master seed.
    CounterRng(std::uint64_t master_seed, std::uint64_t cell_id,
               std::uint64_t replication) noexcept
        : key_{master_seed, 0x7061706572326370ULL},
          ctr_{0, 0, cell_id, replication} {}

    // Raw block access used by the known-answer tests.
    static std::array<std::uint64_t, 4> block(
        const std::array<std::uint64_t, 2>& key,
        const std::array<std::uint64_t, 4>& counter) noexcept;

    std::uint64_t next_u64() noexcept {
        if (have_ == 0) refill();
        return buf_[4 - have_--];
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection from the top range.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    bool next_bernoulli(double p) noexcept { return next_double() < p; }

private:
    void refill() noexcept {
        buf_ = block(key_, ctr_);
        if (++ctr_[0] == 0) ++ctr_[1];
        have_ = 4;
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_;
    std::array<std::uint64_t, 4> buf_{};
    int have_ = 0;
};

}  // namespace countgof
