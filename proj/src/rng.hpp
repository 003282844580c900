#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace bsde {

// Counter-style stream derivation: every Monte Carlo consumer owns a stream
// derived from (seed, tag, a, b, c). Streams are independent of worker
// scheduling, which is what makes runs bit-reproducible at any worker count.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

// All variates below are produced by explicit inverse-CDF / Box-Muller
// formulas on top of the (fully specified) mt19937_64 engine, so sequences
// are identical across platforms and standard libraries. One gaussian always
// consumes exactly two engine draws; no cached spare.
class RandomStream {
  public:
    RandomStream() : engine_(0) {}
    explicit RandomStream(std::uint64_t raw_seed) { reseed(raw_seed); }

    void reseed(std::uint64_t raw_seed) {
        std::uint64_t s = raw_seed;
        std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
        engine_.seed(seq);
    }

    // in [0, 1)
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // in (0, 1]
    double uniform_pos() { return 1.0 - uniform01(); }

    double gaussian() {
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // index into probs; probs must sum to ~1
    int categorical(std::span<const double> probs) {
        double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                                  std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t w : {tag, a, b, c})
        h = mix64(h ^ (w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
    return RandomStream(h);
}

// Stream tags, one per independent consumer family.
namespace stream_tag {
inline constexpr std::uint64_t kSchemeNode = 1;   // (i, j, node)
inline constexpr std::uint64_t kMomentBound = 2;  // (batch)
inline constexpr std::uint64_t kUser = 100;       // free-form
}  // namespace stream_tag

}  // namespace bsde
