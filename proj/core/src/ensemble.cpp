#include "kmlab/ensemble.hpp"

#include "kmlab/errors.hpp"
#include "summation.hpp"

namespace kmlab {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t x)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in)
{
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return x;
}

}  // namespace

std::vector<std::uint8_t> ParticleEnsemble::seed_state() const
{
    std::vector<std::uint8_t> out;
    out.reserve(16);
    put_u64(out, seed);
    put_u64(out, step);
    return out;
}

void ParticleEnsemble::set_seed_state(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != 16) throw IoError("seed state must be 16 bytes");
    seed = get_u64(bytes.subspan(0, 8));
    step = get_u64(bytes.subspan(8, 8));
}

double ParticleEnsemble::total_energy() const
{
    detail::CompensatedSum s;
    for (double x : velocities) s.add(x * x);
    return s.value();
}

std::vector<double> ParticleEnsemble::total_momentum() const
{
    std::vector<detail::CompensatedSum> sums(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < velocities.size(); ++i) {
        sums[i % static_cast<std::size_t>(d)].add(velocities[i]);
    }
    std::vector<double> out;
    for (const auto& s : sums) out.push_back(s.value());
    return out;
}

}  // namespace kmlab
