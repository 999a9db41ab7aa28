// rng.hpp — counter-based keyed random number generation.
//
// Every random draw in the library is addressed by a key (seed, trial, agent,
// iteration, purpose). Two runs with the same keys produce bitwise-identical
// draws regardless of thread scheduling or draw order across streams, which is
// what makes paired-noise sampler comparisons and byte-stable replays possible.
// splitmix64 is used both as the key mixer and as the per-stream generator;
// normals come from a hand-rolled Box-Muller so results do not depend on the
// standard library's unspecified normal_distribution algorithm.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace dsgld {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Draw purposes keep logically distinct streams from colliding.
enum class Purpose : std::uint64_t {
    AgentInit = 1,    // initial iterate draw
    Langevin = 2,     // injected Langevin noise
    Minibatch = 3,    // minibatch index selection
    GraphTopology = 4,// random edges in schedule generators
    DataGen = 5,      // synthetic dataset generation
    Direct = 6,       // direct posterior sampling (baselines)
    NoiseProbe = 7,   // gradient-noise estimation
};

struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::uint64_t agent = 0;
    std::uint64_t iteration = 0;
    Purpose purpose = Purpose::AgentInit;

    std::uint64_t fold() const {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ (trial + 0x638f6d2e4cbed41fULL));
        h = splitmix64(h ^ (agent + 0xa2b7e8b2c1f0d96dULL));
        h = splitmix64(h ^ (iteration + 0x1d8e4e27c47d124fULL));
        h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
        return h;
    }
};

// One addressable stream. Cheap to construct; construct fresh per key.
class CounterRng {
  public:
    explicit CounterRng(const StreamKey& key) : state_(key.fold()) {}
    explicit CounterRng(std::uint64_t raw_state) : state_(raw_state) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Unbiased-enough index draw via 128-bit multiply-shift (n < 2^32 here, and
    // the modulo bias of the fallback would already be < 2^-32).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// FNV-1a accumulator over raw bytes; used for provenance stream hashes.
class StreamHash {
  public:
    void update(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        update(bits);
    }
    void update(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h_ ^= (v >> (8 * i)) & 0xffULL;
            h_ *= 0x100000001b3ULL;
        }
    }
    std::uint64_t digest() const { return h_; }

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace dsgld
