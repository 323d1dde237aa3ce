#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011) plus a
// Box-Muller mapping onto standard normal pairs.  Output depends only on
// (key, counter), never on call order, which is what makes replica/lane
// streams replayable and worker-count independent.

#include <array>
#include <cmath>
#include <cstdint>

namespace shelab {

struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// Two independent N(0,1) values from one Philox block.
inline void normal_pair(std::uint64_t block_index, std::uint32_t stream_hi,
                        std::uint32_t stream_lo, std::uint64_t key, double* out2) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_index),
        static_cast<std::uint32_t>(block_index >> 32), stream_lo, stream_hi};
    const std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key),
                                            static_cast<std::uint32_t>(key >> 32)};
    const auto r = Philox4x32::block(ctr, k);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    // u1 in (0,1], u2 in [0,1)
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    out2[0] = rad * std::cos(ang);
    out2[1] = rad * std::sin(ang);
}

}  // namespace shelab
