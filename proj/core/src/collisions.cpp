#include "kmlab/collisions.hpp"

#include <cmath>
#include <string>

#include "kmlab/errors.hpp"

namespace kmlab {

VelocityPair kac_collide(const VelocityPair& pair, double theta)
{
    if (pair.v.size() != 1 || pair.v_star.size() != 1) {
        throw DomainError("kac_collide: velocities must be one-dimensional");
    }
    VelocityPair out = pair;
    kac_collide_inplace(out.v[0], out.v_star[0], theta);
    return out;
}

void boltzmann_collide_inplace(std::span<double> v, std::span<double> v_star,
                               std::span<const double> sigma)
{
    const std::size_t d = v.size();
    if (v_star.size() != d || sigma.size() != d || d < 2) {
        throw DomainError("boltzmann_collide: dimension mismatch");
    }
    double sigma_norm2 = 0.0;
    for (double s : sigma) sigma_norm2 += s * s;
    if (std::abs(std::sqrt(sigma_norm2) - 1.0) > 1e-12) {
        throw DomainError("boltzmann_collide: sigma is not a unit vector");
    }

    double rel2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double u = v[i] - v_star[i];
        rel2 += u * u;
    }
    if (rel2 == 0.0) return;
    const double half_speed = 0.5 * std::sqrt(rel2);
    for (std::size_t i = 0; i < d; ++i) {
        const double center = 0.5 * (v[i] + v_star[i]);
        v[i] = center + half_speed * sigma[i];
        v_star[i] = center - half_speed * sigma[i];
    }
}

VelocityPair boltzmann_collide(const VelocityPair& pair, std::span<const double> sigma)
{
    VelocityPair out = pair;
    boltzmann_collide_inplace(out.v, out.v_star, sigma);
    return out;
}

void scattering_direction(std::span<const double> u_hat, double theta, double phi,
                          std::span<double> sigma)
{
    const std::size_t d = u_hat.size();
    if ((d != 2 && d != 3) || sigma.size() != d) {
        throw ConfigError("scattering_direction: supported dimensions are 2 and 3, got " +
                          std::to_string(d));
    }
    const double ct = std::cos(theta);
    const double st = std::sin(theta);

    if (d == 2) {
        const double side = std::cos(phi) >= 0.0 ? 1.0 : -1.0;
        sigma[0] = ct * u_hat[0] - side * st * u_hat[1];
        sigma[1] = ct * u_hat[1] + side * st * u_hat[0];
        return;
    }

    std::size_t axis = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (std::abs(u_hat[i]) < std::abs(u_hat[axis])) axis = i;
    }
    double e1[3] = {0.0, 0.0, 0.0};
    e1[axis] = 1.0;
    const double proj = u_hat[axis];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        e1[i] -= proj * u_hat[i];
        norm2 += e1[i] * e1[i];
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : e1) x *= inv;
    const double e2[3] = {u_hat[1] * e1[2] - u_hat[2] * e1[1],
                          u_hat[2] * e1[0] - u_hat[0] * e1[2],
                          u_hat[0] * e1[1] - u_hat[1] * e1[0]};
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    for (std::size_t i = 0; i < 3; ++i) {
        sigma[i] = ct * u_hat[i] + st * (cp * e1[i] + sp * e2[i]);
    }
}

std::vector<double> scattering_direction(std::span<const double> u_hat, double theta,
                                         double phi)
{
    std::vector<double> sigma(u_hat.size());
    scattering_direction(u_hat, theta, phi, sigma);
    return sigma;
}

}  // namespace kmlab
