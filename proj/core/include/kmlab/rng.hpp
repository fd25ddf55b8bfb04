#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace kmlab {

/// 64-bit Mersenne Twister with stateless distribution helpers.
///
/// The helpers never cache values between calls, so the engine state alone
/// determines every subsequent draw. Substreams are derived by feeding
/// (seed, stream, index) through std::seed_seq, whose mixing algorithm is
/// fixed by the standard; a given triple yields the same sequence on every
/// conforming implementation.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed);

    /// Independent generator for the (stream, index) coordinate of a run.
    static Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (cosine branch only).
    double normal();

    /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n);

    /// Text serialization of the engine state.
    std::string state() const;
    void set_state(const std::string& text);

    engine_type& engine() { return engine_; }

private:
    Rng() = default;
    engine_type engine_;
};

}  // namespace kmlab
