#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fksteer/rng.hpp"
#include "fksteer/schedule.hpp"

namespace fksteer {

struct GmComponent {
    double weight = 1.0;
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;  // per-coordinate (diagonal covariance)
};

/// Analytically tractable data distribution: a diagonal-covariance Gaussian
/// mixture whose component index doubles as the class label. Immutable after
/// construction.
struct GaussianMixtureWorld {
    int dim = 0;
    std::vector<GmComponent> components;

    int num_classes() const { return static_cast<int>(components.size()); }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("GaussianMixtureWorld: dim must be >= 1");
        if (components.empty()) throw std::invalid_argument("GaussianMixtureWorld: no components");
        double total = 0.0;
        for (const auto& c : components) {
            if (!(c.weight > 0.0)) throw std::invalid_argument("GaussianMixtureWorld: weights must be > 0");
            if (c.mean.size() != dim || c.variance.size() != dim)
                throw std::invalid_argument("GaussianMixtureWorld: component dimension mismatch");
            if ((c.variance.array() <= 0.0).any())
                throw std::invalid_argument("GaussianMixtureWorld: variances must be > 0");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("GaussianMixtureWorld: weights sum to " + std::to_string(total));
    }
};

namespace detail {

inline double diag_gaussian_log_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& mean,
                                        const Eigen::Ref<const Eigen::VectorXd>& variance) {
    const auto d = (x - mean).array();
    return -0.5 * (variance.array().log() + std::log(2.0 * M_PI) + d.square() / variance.array()).sum();
}

inline double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;  // all -inf (or a stray +inf/NaN) short-circuits
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace detail

struct LabeledSample {
    Eigen::VectorXd x;
    int label = 0;
};

inline LabeledSample gmm_sample(const GaussianMixtureWorld& world, RandomStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    int k = world.num_classes() - 1;
    for (int i = 0; i < world.num_classes(); ++i) {
        cum += world.components[i].weight;
        if (u < cum) {
            k = i;
            break;
        }
    }
    const auto& c = world.components[k];
    LabeledSample s;
    s.x = c.mean + (c.variance.array().sqrt() * rng.normal_vector(world.dim).array()).matrix();
    s.label = k;
    return s;
}

/// Per-class log w_y + log N(x; mu_y, var_y): the unnormalized class
/// log-densities everything else is built from.
inline Eigen::VectorXd class_log_joint(const GaussianMixtureWorld& world,
                                       const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd lj(world.num_classes());
    for (int y = 0; y < world.num_classes(); ++y)
        lj[y] = std::log(world.components[y].weight) +
                detail::diag_gaussian_log_density(x, world.components[y].mean, world.components[y].variance);
    return lj;
}

/// Gradient of class_log_joint entry y with respect to x.
inline Eigen::VectorXd class_log_joint_grad(const GaussianMixtureWorld& world,
                                            const Eigen::Ref<const Eigen::VectorXd>& x, int y) {
    const auto& c = world.components[y];
    return (-(x - c.mean).array() / c.variance.array()).matrix();
}

inline Eigen::VectorXd classifier_log_probs(const GaussianMixtureWorld& world,
                                            const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd lj = class_log_joint(world, x);
    return lj.array() - detail::log_sum_exp(lj);
}

/// Bayes posterior p(y | x) over component labels.
inline Eigen::VectorXd classifier_probs(const GaussianMixtureWorld& world,
                                        const Eigen::Ref<const Eigen::VectorXd>& x) {
    return classifier_log_probs(world, x).array().exp();
}

inline int classifier_argmax(const GaussianMixtureWorld& world,
                             const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::VectorXd lj = class_log_joint(world, x);
    int best = 0;
    for (int y = 1; y < lj.size(); ++y)
        if (lj[y] > lj[best]) best = y;  // ties keep the lower index
    return best;
}

/// Marginal of the forward process at step t: component k becomes
/// N(sqrt(abar_t) mu_k, abar_t var_k + (1 - abar_t)).
inline double noisy_log_density(const GaussianMixtureWorld& world,
                                const Eigen::Ref<const Eigen::VectorXd>& x_t, int t,
                                const NoiseSchedule& schedule) {
    const double ab = schedule.alpha_bar(t);
    const double root_ab = std::sqrt(ab);
    Eigen::VectorXd lj(world.num_classes());
    for (int k = 0; k < world.num_classes(); ++k) {
        const auto& c = world.components[k];
        const Eigen::VectorXd mean = root_ab * c.mean;
        const Eigen::VectorXd var = (ab * c.variance.array() + (1.0 - ab)).matrix();
        lj[k] = std::log(c.weight) + detail::diag_gaussian_log_density(x_t, mean, var);
    }
    return detail::log_sum_exp(lj);
}

/// Exact stand-in for the learned denoiser: eps(x_t, t) =
/// -sqrt(1 - abar_t) * grad log q_t(x_t), with q_t the closed-form noised
/// mixture. Responsibilities are computed in the log domain. Valid for
/// t = 0..T (returns the zero vector at t = 0).
inline Eigen::VectorXd exact_noisy_eps(const GaussianMixtureWorld& world,
                                       const Eigen::Ref<const Eigen::VectorXd>& x_t, int t,
                                       const NoiseSchedule& schedule) {
    const double ab = schedule.alpha_bar(t);
    if (t == 0) return Eigen::VectorXd::Zero(world.dim);
    const double root_ab = std::sqrt(ab);
    const int nc = world.num_classes();
    Eigen::VectorXd lj(nc);
    std::vector<Eigen::VectorXd> comp_grad(nc);
    for (int k = 0; k < nc; ++k) {
        const auto& c = world.components[k];
        const Eigen::VectorXd mean = root_ab * c.mean;
        const Eigen::ArrayXd var = ab * c.variance.array() + (1.0 - ab);
        lj[k] = std::log(c.weight) - 0.5 * (var.log() + std::log(2.0 * M_PI) +
                                            (x_t - mean).array().square() / var)
                                               .sum();
        comp_grad[k] = (-(x_t - mean).array() / var).matrix();
    }
    const double lse = detail::log_sum_exp(lj);
    Eigen::VectorXd score = Eigen::VectorXd::Zero(world.dim);
    for (int k = 0; k < nc; ++k) score += std::exp(lj[k] - lse) * comp_grad[k];
    return -std::sqrt(1.0 - ab) * score;
}

// ---------------------------------------------------------------------------
// World presets
// ---------------------------------------------------------------------------

inline GaussianMixtureWorld single_gaussian_world(const Eigen::VectorXd& mean, const Eigen::VectorXd& variance) {
    GaussianMixtureWorld w;
    w.dim = static_cast<int>(mean.size());
    w.components.push_back({1.0, mean, variance});
    w.validate();
    return w;
}

inline GaussianMixtureWorld standard_normal_world(int dim) {
    return single_gaussian_world(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

/// Benchmark world: d = 16, 10 equal-weight unit-variance components whose
/// means come from a fixed-seed layout with pairwise distance >= 4, so the
/// classifier has genuinely confusable classes under corruption.
inline GaussianMixtureWorld benchmark_world(double mean_scale = 1.6) {
    constexpr int kDim = 16;
    constexpr int kClasses = 10;
    constexpr std::uint64_t kLayoutSeed = 0x5eed5eed0001ull;
    GaussianMixtureWorld w;
    w.dim = kDim;
    RandomStream rng(kLayoutSeed);
    for (int k = 0; k < kClasses; ++k)
        w.components.push_back({1.0 / kClasses, mean_scale * rng.normal_vector(kDim),
                                Eigen::VectorXd::Ones(kDim)});
    w.validate();
    return w;
}

/// Benchmark layout scaled so all pairwise mean distances exceed 6 sigma;
/// clean Bayes accuracy is essentially perfect here.
inline GaussianMixtureWorld well_separated_world() { return benchmark_world(3.2); }

inline double min_pairwise_mean_distance(const GaussianMixtureWorld& w) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < w.components.size(); ++i)
        for (size_t j = i + 1; j < w.components.size(); ++j)
            best = std::min(best, (w.components[i].mean - w.components[j].mean).norm());
    return best;
}

}  // namespace fksteer
