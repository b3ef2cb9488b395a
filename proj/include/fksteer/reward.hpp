#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fksteer/world.hpp"

namespace fksteer {

/// Minimal descending-probability prefix of class labels whose total mass
/// reaches the adaptive threshold. Built once from the corrupted input and
/// never rebuilt from intermediate denoised estimates.
struct CandidateSet {
    std::vector<int> labels;        // descending p(y | x0), ties by lower index
    double cumulative_mass = 0.0;
};

/// Linear annealing weight: 0 at t = N (explore via candidate mass),
/// 1 at t = 0 (exploit via entropy minimization).
inline double anneal_alpha(int t, int N) {
    if (N < 1) throw std::invalid_argument("anneal_alpha: N must be >= 1");
    if (t < 0 || t > N)
        throw std::out_of_range("anneal_alpha: t = " + std::to_string(t) + " outside [0, " +
                                std::to_string(N) + "]");
    return 1.0 - static_cast<double>(t) / static_cast<double>(N);
}

struct RewardSchedule {
    int N = 50;
    double alpha(int t) const { return anneal_alpha(t, N); }
};

struct RewardSpec {
    double P = 70.0;  // cumulative-probability threshold, percent
    RewardSchedule schedule;
    bool renormalize_entropy = false;  // off by default: entropy uses raw in-set probabilities

    void validate() const {
        if (!(P > 0.0) || P > 100.0)
            throw std::invalid_argument("RewardSpec: P must be in (0, 100]");
        if (schedule.N < 1) throw std::invalid_argument("RewardSpec: schedule N must be >= 1");
    }
};

inline CandidateSet build_candidate_set(const Eigen::Ref<const Eigen::VectorXd>& probs, double P_percent) {
    if (probs.size() == 0) throw std::invalid_argument("build_candidate_set: empty probability vector");
    if (std::abs(probs.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("build_candidate_set: probabilities sum to " + std::to_string(probs.sum()));
    if (!(P_percent > 0.0) || P_percent > 100.0)
        throw std::invalid_argument("build_candidate_set: P must be in (0, 100]");

    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return probs[a] > probs[b]; });

    const double threshold = P_percent / 100.0;
    CandidateSet cs;
    for (int y : order) {
        cs.labels.push_back(y);
        cs.cumulative_mass += probs[y];
        // 1e-12 slack absorbs accumulated rounding at exact-threshold inputs
        if (cs.cumulative_mass >= threshold - 1e-12) break;
    }
    return cs;
}

/// log of the candidate-set probability mass; -inf if the mass underflows to 0.
inline double candidate_log_mass(const Eigen::Ref<const Eigen::VectorXd>& probs, const CandidateSet& cset) {
    Eigen::VectorXd lp(cset.labels.size());
    for (size_t i = 0; i < cset.labels.size(); ++i) lp[static_cast<Eigen::Index>(i)] = std::log(probs[cset.labels[i]]);
    return detail::log_sum_exp(lp);
}

/// -sum_{y in C} p log p with 0 log 0 = 0. By default the probabilities are
/// NOT renormalized over the set; the renormalized variant is available as a
/// config option.
inline double restricted_entropy(const Eigen::Ref<const Eigen::VectorXd>& probs, const CandidateSet& cset,
                                 bool renormalize = false) {
    double mass = 0.0;
    if (renormalize) {
        for (int y : cset.labels) mass += probs[y];
        if (mass <= 0.0) return 0.0;
    }
    double h = 0.0;
    for (int y : cset.labels) {
        const double p = renormalize ? probs[y] / mass : probs[y];
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

/// Annealed pseudo-label reward:
///   r(xhat, t) = (1 - alpha(t)) log sum_{y in C} p(y | xhat) - alpha(t) H(C).
/// Always <= 0.
inline double steering_reward(const GaussianMixtureWorld& world,
                              const Eigen::Ref<const Eigen::VectorXd>& x_hat, int t,
                              const CandidateSet& cset, const RewardSpec& spec) {
    const double a = anneal_alpha(t, spec.schedule.N);
    const Eigen::VectorXd probs = classifier_probs(world, x_hat);
    return (1.0 - a) * candidate_log_mass(probs, cset) -
           a * restricted_entropy(probs, cset, spec.renormalize_entropy);
}

/// Ground-truth reward log p(y_true | xhat) for the oracle upper bound.
inline double gt_reward(const GaussianMixtureWorld& world,
                        const Eigen::Ref<const Eigen::VectorXd>& x_hat, int true_label) {
    if (true_label < 0 || true_label >= world.num_classes())
        throw std::out_of_range("gt_reward: label " + std::to_string(true_label) + " outside [0, " +
                                std::to_string(world.num_classes()) + ")");
    return classifier_log_probs(world, x_hat)[true_label];
}

// ---------------------------------------------------------------------------
// Analytic reward gradients (w.r.t. xhat), used by the gradient-guided
// baseline. Let l_y = log w_y + log N(xhat; mu_y, var_y), p = softmax(l),
// G_y = grad l_y, m = sum_y p_y G_y. Then
//   grad log sum_C p_y = sum_C q_y G_y - m   with q = softmax(l restricted to C)
//   grad H = -sum_C p_y (G_y - m)(log p_y + 1)        (raw-probability form)
// ---------------------------------------------------------------------------

inline Eigen::VectorXd gt_reward_grad(const GaussianMixtureWorld& world,
                                      const Eigen::Ref<const Eigen::VectorXd>& x_hat, int true_label) {
    if (true_label < 0 || true_label >= world.num_classes())
        throw std::out_of_range("gt_reward_grad: invalid label");
    const Eigen::VectorXd lp = classifier_log_probs(world, x_hat);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(world.dim);
    for (int y = 0; y < world.num_classes(); ++y)
        m += std::exp(lp[y]) * class_log_joint_grad(world, x_hat, y);
    return class_log_joint_grad(world, x_hat, true_label) - m;
}

inline Eigen::VectorXd steering_reward_grad(const GaussianMixtureWorld& world,
                                            const Eigen::Ref<const Eigen::VectorXd>& x_hat, int t,
                                            const CandidateSet& cset, const RewardSpec& spec) {
    const double a = anneal_alpha(t, spec.schedule.N);
    const int nc = world.num_classes();
    const Eigen::VectorXd lp = classifier_log_probs(world, x_hat);

    std::vector<Eigen::VectorXd> grads(nc);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(world.dim);
    for (int y = 0; y < nc; ++y) {
        grads[y] = class_log_joint_grad(world, x_hat, y);
        m += std::exp(lp[y]) * grads[y];
    }

    // restricted softmax over the candidate set
    Eigen::VectorXd lp_c(cset.labels.size());
    for (size_t i = 0; i < cset.labels.size(); ++i) lp_c[static_cast<Eigen::Index>(i)] = lp[cset.labels[i]];
    const double lse_c = detail::log_sum_exp(lp_c);

    Eigen::VectorXd grad_log_mass = -m;
    for (size_t i = 0; i < cset.labels.size(); ++i)
        grad_log_mass += std::exp(lp_c[static_cast<Eigen::Index>(i)] - lse_c) * grads[cset.labels[i]];

    Eigen::VectorXd grad_entropy = Eigen::VectorXd::Zero(world.dim);
    if (spec.renormalize_entropy) {
        Eigen::VectorXd m_c = Eigen::VectorXd::Zero(world.dim);
        for (size_t i = 0; i < cset.labels.size(); ++i)
            m_c += std::exp(lp_c[static_cast<Eigen::Index>(i)] - lse_c) * grads[cset.labels[i]];
        for (size_t i = 0; i < cset.labels.size(); ++i) {
            const double lq = lp_c[static_cast<Eigen::Index>(i)] - lse_c;
            grad_entropy -= std::exp(lq) * (lq + 1.0) * (grads[cset.labels[i]] - m_c);
        }
    } else {
        for (int y : cset.labels)
            grad_entropy -= std::exp(lp[y]) * (lp[y] + 1.0) * (grads[y] - m);
    }

    return (1.0 - a) * grad_log_mass - a * grad_entropy;
}

}  // namespace fksteer
