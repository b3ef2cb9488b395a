#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fksteer/rng.hpp"

namespace fksteer {

/// Forward-diffusion variance schedule. betas holds beta_t for t = 1..T
/// (0-based storage); signal_coeffs holds the cumulative products
/// abar_t = prod_{s<=t}(1 - beta_s) for t = 0..T with abar_0 = 1.
struct NoiseSchedule {
    Eigen::ArrayXd betas;
    Eigen::ArrayXd signal_coeffs;

    int num_steps() const { return static_cast<int>(betas.size()); }

    double beta(int t) const {
        check_step(t);
        return betas[t - 1];
    }

    /// abar_t, valid for t = 0..T
    double alpha_bar(int t) const {
        if (t < 0 || t > num_steps())
            throw std::out_of_range("NoiseSchedule: step index " + std::to_string(t) +
                                    " outside [0, " + std::to_string(num_steps()) + "]");
        return signal_coeffs[t];
    }

    void check_step(int t) const {
        if (t < 1 || t > num_steps())
            throw std::out_of_range("NoiseSchedule: step index " + std::to_string(t) +
                                    " outside [1, " + std::to_string(num_steps()) + "]");
    }
};

/// Number of forward/reverse steps used for adaptation; must not exceed the
/// schedule length.
struct DiffusionRange {
    int N = 50;
};

inline void validate_range(const DiffusionRange& range, const NoiseSchedule& schedule) {
    if (range.N < 1 || range.N > schedule.num_steps())
        throw std::invalid_argument("DiffusionRange: N = " + std::to_string(range.N) +
                                    " outside [1, T = " + std::to_string(schedule.num_steps()) + "]");
}

inline NoiseSchedule make_linear_schedule(int T, double beta_min, double beta_max) {
    if (T < 1) throw std::invalid_argument("make_linear_schedule: T must be >= 1");
    if (!(beta_min > 0.0) || !(beta_max < 1.0) || beta_min > beta_max)
        throw std::invalid_argument("make_linear_schedule: need 0 < beta_min <= beta_max < 1");

    NoiseSchedule s;
    s.betas.resize(T);
    s.signal_coeffs.resize(T + 1);
    s.signal_coeffs[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
        const double frac = (T == 1) ? 0.0 : static_cast<double>(t - 1) / (T - 1);
        s.betas[t - 1] = beta_min + (beta_max - beta_min) * frac;
        s.signal_coeffs[t] = s.signal_coeffs[t - 1] * (1.0 - s.betas[t - 1]);
    }
    return s;
}

/// Desk-scale default: T total steps with the variance bounds rescaled by
/// 1000/T so cumulative noise at T matches the standard 1000-step schedule.
inline NoiseSchedule make_default_schedule(int T = 100) {
    const double scale = 1000.0 / static_cast<double>(T);
    return make_linear_schedule(T, 1e-4 * scale, 0.02 * scale);
}

/// Draw x_t ~ q(x_t | x_0) = N(sqrt(abar_t) x0, (1 - abar_t) I).
/// t = 0 returns x0 (zero-noise convention) without consuming randomness.
inline Eigen::VectorXd forward_marginal_sample(const Eigen::Ref<const Eigen::VectorXd>& x0, int t,
                                               const NoiseSchedule& schedule, RandomStream& rng) {
    if (t == 0) return x0;
    schedule.check_step(t);
    const double ab = schedule.alpha_bar(t);
    return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * rng.normal_vector(x0.size());
}

struct ReverseKernel {
    Eigen::VectorXd mean;
    double variance = 0.0;  // isotropic; 0 at t = 1 (sampler adds no noise)
};

/// Mean and variance of the DDPM reverse kernel p(x_{t-1} | x_t) given the
/// predicted noise. Variance is the forward-posterior variance
/// beta_t (1 - abar_{t-1}) / (1 - abar_t), which is exactly 0 at t = 1.
template <typename DX, typename DE>
ReverseKernel reverse_kernel_params(const Eigen::MatrixBase<DX>& x_t, int t,
                                    const Eigen::MatrixBase<DE>& eps, const NoiseSchedule& schedule) {
    schedule.check_step(t);
    const double b = schedule.beta(t);
    const double ab = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t - 1);
    ReverseKernel k;
    k.mean = (x_t - (b / std::sqrt(1.0 - ab)) * eps) / std::sqrt(1.0 - b);
    k.variance = b * (1.0 - ab_prev) / (1.0 - ab);
    return k;
}

/// Clean-point estimate (x_t - sqrt(1 - abar_t) eps) / sqrt(abar_t).
template <typename DX, typename DE>
Eigen::VectorXd tweedie_denoise(const Eigen::MatrixBase<DX>& x_t, int t,
                                const Eigen::MatrixBase<DE>& eps, const NoiseSchedule& schedule) {
    schedule.check_step(t);
    const double ab = schedule.alpha_bar(t);
    return (x_t - std::sqrt(1.0 - ab) * eps) / std::sqrt(ab);
}

}  // namespace fksteer
