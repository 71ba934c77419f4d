#pragma once

// Deterministic random streams.  Every Monte Carlo trial draws from its own
// substream derived from (seed, stream name, trial index), so results do not
// depend on scheduling or on how many draws earlier trials consumed.
//
// Engine: xoshiro256++ seeded through splitmix64 (Blackman & Vigna).

#include <cstdint>
#include <cmath>
#include <string_view>

namespace uavris::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a, used to turn substream names into mixing constants.
inline std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) {
        std::uint64_t sm = seed;
        sm ^= 0x6a09e667f3bcc909ULL + splitmix64(stream_id);
        sm += splitmix64(index) ^ (index * 0x9e3779b97f4a7c15ULL);
        for (auto& word : s_) word = splitmix64(sm);
    }

    Stream(std::uint64_t seed, std::string_view name, std::uint64_t index)
        : Stream(seed, hash_name(name), index) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); never returns an exact endpoint,
    // so logs and divisions on the result are safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Marsaglia polar method; the spare value is
    // cached, which is fine because streams are per-trial.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace uavris::rng
