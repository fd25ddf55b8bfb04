#include "kmlab/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kmlab/errors.hpp"

namespace kmlab {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

}  // namespace

Rng::Rng(std::uint64_t seed)
{
    std::seed_seq seq{lo32(seed), hi32(seed)};
    engine_.seed(seq);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    Rng rng;
    std::seed_seq seq{lo32(seed), hi32(seed), lo32(stream), hi32(stream), lo32(index), hi32(index)};
    rng.engine_.seed(seq);
    return rng;
}

double Rng::normal()
{
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) throw DomainError("Rng::below: empty range");
    u128 m = static_cast<u128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>(engine_()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::string Rng::state() const
{
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::set_state(const std::string& text)
{
    std::istringstream is(text);
    engine_type e;
    is >> e;
    if (is.fail()) throw IoError("Rng::set_state: malformed engine state");
    engine_ = e;
}

}  // namespace kmlab
