#pragma once

#include <span>
#include <vector>

#include "kmlab/ensemble.hpp"
#include "kmlab/special_fn.hpp"

namespace kmlab {

/// Monte Carlo estimate of an ensemble average.
///
/// `log_value` is always finite for a nonempty ensemble. `degraded` is set
/// when the accumulation had to leave the linear domain; `value` may then be
/// +inf while `log_value` still carries the answer.
struct MomentEstimate {
    double value = 0.0;
    double std_err = 0.0;
    double log_value = 0.0;
    bool degraded = false;
};

/// Average of exp(log_weights[i]) with batch-means standard error over
/// floor(sqrt(N)) contiguous batches.
MomentEstimate average_log_weights(std::span<const double> log_weights);

/// Average of nonnegative weights, compensated summation.
MomentEstimate average_weights(std::span<const double> weights);

/// m_q = (1/N) sum <v_i>^q, <v> = sqrt(1 + |v|^2).
MomentEstimate poly_moment(const ParticleEnsemble& ens, double q);

/// ln m_{2q} for q = 0..q_max without standard errors. Terms below e^-50 of
/// the largest are dropped, so high orders only touch the fastest particles.
std::vector<double> log_even_moments(const ParticleEnsemble& ens, int q_max);

/// M_{alpha,s} = (1/N) sum exp(alpha <v_i>^s).
MomentEstimate stretched_exp_moment(const ParticleEnsemble& ens, const MLSpec& spec);

/// (1/N) sum E_a(alpha^a <v_i>^2) with a = 2/s. For s = 2 this is
/// stretched_exp_moment(alpha, 2) evaluated identically.
MomentEstimate ml_moment(const ParticleEnsemble& ens, const MLSpec& spec);

/// E^n = sum_{q=0}^{n} alpha^{a q} / Gamma(a q + 1) m_{2q}, where
/// moments[q] = m_{2q}. Throws DomainError if fewer than n + 1 moments are given.
double ml_partial_sum(std::span<const double> moments, const MLSpec& spec, int n);

/// Interpolation bound m_p <= m_{2q-2}^{(2q-p)/2} m_{2q}^{(p-2q+2)/2} for the
/// q with p in [2q - 2, 2q]; the caller supplies q.
double interpolate_moment(double m_low, double m_high, double p, int q);

/// Per-component second moments (1/N) sum v_{i,k}^2, k < d.
std::vector<double> component_second_moments(const ParticleEnsemble& ens);

}  // namespace kmlab
