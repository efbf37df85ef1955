#ifndef CHANCEKIT_RNG_HPP
#define CHANCEKIT_RNG_HPP

#include <cstdint>

namespace chancekit {

/// Philox4x32-10 counter-based generator.
///
/// Counter-based so that every draw is addressable: the stream is a pure
/// function of (key, counter). Per-trial substreams are derived from
/// (master seed, stream index) without any shared state, which keeps
/// experiment trials reproducible and order-independent.
class Philox {
  public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        ctr_[0] = ctr_[1] = 0;
        ctr_[2] = static_cast<std::uint32_t>(stream);
        ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
        buf_pos_ = 4;
    }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) {
            block(ctr_, key_, buf_);
            increment();
            buf_pos_ = 0;
        }
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    static void round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
        const std::uint64_t m0 = 0xD2511F53ULL * ctr[0];
        const std::uint64_t m1 = 0xCD9E8D57ULL * ctr[2];
        const std::uint32_t out0 = static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ key[0];
        const std::uint32_t out1 = static_cast<std::uint32_t>(m1);
        const std::uint32_t out2 = static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ key[1];
        const std::uint32_t out3 = static_cast<std::uint32_t>(m0);
        ctr[0] = out0;
        ctr[1] = out1;
        ctr[2] = out2;
        ctr[3] = out3;
    }

    static void block(const std::uint32_t ctr_in[4], const std::uint32_t key_in[2],
                      std::uint32_t out[4]) {
        std::uint32_t c[4] = {ctr_in[0], ctr_in[1], ctr_in[2], ctr_in[3]};
        std::uint32_t k[2] = {key_in[0], key_in[1]};
        for (int r = 0; r < 10; ++r) {
            round(c, k);
            k[0] += 0x9E3779B9u; // golden ratio
            k[1] += 0xBB67AE85u; // sqrt(3)-1
        }
        out[0] = c[0];
        out[1] = c[1];
        out[2] = c[2];
        out[3] = c[3];
    }

    void increment() {
        if (++ctr_[0] == 0)
            if (++ctr_[1] == 0)
                if (++ctr_[2] == 0)
                    ++ctr_[3];
    }

    std::uint32_t key_[2];
    std::uint32_t ctr_[4];
    std::uint32_t buf_[4];
    int buf_pos_;
};

/// Stateless mix of (seed, index) into a child seed (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace chancekit

#endif
