#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace kmlab {

/// Velocities of a colliding pair in dimension d = v.size() = v_star.size().
struct VelocityPair {
    std::vector<double> v;
    std::vector<double> v_star;

    std::size_t dimension() const noexcept { return v.size(); }
};

/// Kac rotation: v' = v cos(theta) - v_* sin(theta), v'_* = v sin(theta) + v_* cos(theta).
/// Conserves v^2 + v_*^2 but not v + v_*.
inline void kac_collide_inplace(double& v, double& v_star, double theta) noexcept
{
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double a = v;
    const double b = v_star;
    v = a * c - b * s;
    v_star = a * s + b * c;
}

VelocityPair kac_collide(const VelocityPair& pair, double theta);

/// Elastic sigma-representation: v' = (v + v_*)/2 + |v - v_*|/2 sigma and
/// v'_* = (v + v_*)/2 - |v - v_*|/2 sigma. Equal inputs are returned unchanged.
/// Throws DomainError if |sigma| deviates from 1 by more than 1e-12.
void boltzmann_collide_inplace(std::span<double> v, std::span<double> v_star,
                               std::span<const double> sigma);

VelocityPair boltzmann_collide(const VelocityPair& pair, std::span<const double> sigma);

/// Unit vector sigma at polar angle theta from u_hat (u_hat . sigma = cos theta).
///
/// d = 3: the azimuth phi is measured in the frame (e1, e2 = u_hat x e1) where
/// e1 is the Gram-Schmidt projection of the coordinate axis least aligned with
/// u_hat (ties go to the lowest index). d = 2: phi in {0, pi} picks the side,
/// sigma = cos(theta) u_hat + sign(cos phi) sin(theta) u_perp with
/// u_perp = (-u_y, u_x).
void scattering_direction(std::span<const double> u_hat, double theta, double phi,
                          std::span<double> sigma);

std::vector<double> scattering_direction(std::span<const double> u_hat, double theta,
                                         double phi);

}  // namespace kmlab
