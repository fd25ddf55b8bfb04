#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kmlab {

/// N particles in dimension d, velocities stored row-major (particle i owns
/// velocities[i*d .. i*d + d)).
///
/// The random state of a run is (seed, step): every step derives its
/// generators from that pair, so the two integers are all a snapshot needs.
struct ParticleEnsemble {
    int d = 1;
    std::vector<double> velocities;
    double time = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;

    std::size_t size() const noexcept
    {
        return d > 0 ? velocities.size() / static_cast<std::size_t>(d) : 0;
    }
    std::span<double> particle(std::size_t i)
    {
        return {velocities.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
    std::span<const double> particle(std::size_t i) const
    {
        return {velocities.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }

    /// Opaque serialized random state (16 little-endian bytes).
    std::vector<std::uint8_t> seed_state() const;
    void set_seed_state(std::span<const std::uint8_t> bytes);

    /// Sum of |v_i|^2.
    double total_energy() const;
    /// Sum of v_i, one entry per dimension.
    std::vector<double> total_momentum() const;

    bool operator==(const ParticleEnsemble&) const = default;
};

}  // namespace kmlab
