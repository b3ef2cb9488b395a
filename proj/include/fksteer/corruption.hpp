#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "fksteer/rng.hpp"
#include "fksteer/spectral.hpp"

namespace fksteer {

enum class CorruptionKind { low_freq_additive, high_freq_additive, spectral_blur, constant_shift };

inline const char* corruption_kind_name(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::low_freq_additive: return "low_freq_additive";
        case CorruptionKind::high_freq_additive: return "high_freq_additive";
        case CorruptionKind::spectral_blur: return "spectral_blur";
        case CorruptionKind::constant_shift: return "constant_shift";
    }
    return "?";
}

inline CorruptionKind corruption_kind_from_name(const std::string& name) {
    if (name == "low_freq_additive") return CorruptionKind::low_freq_additive;
    if (name == "high_freq_additive") return CorruptionKind::high_freq_additive;
    if (name == "spectral_blur") return CorruptionKind::spectral_blur;
    if (name == "constant_shift") return CorruptionKind::constant_shift;
    throw std::invalid_argument("unknown corruption kind: " + name);
}

/// Test-time input corruption. severity is the operator amplitude (0 means
/// identity); band_lo/band_hi give the DFT frequency range [lo, hi) for the
/// spectral kinds and are ignored by constant_shift.
struct CorruptionOperator {
    CorruptionKind kind = CorruptionKind::low_freq_additive;
    double severity = 0.0;
    int band_lo = 0;
    int band_hi = 0;
};

inline Eigen::VectorXd apply_corruption(const CorruptionOperator& op,
                                        const Eigen::Ref<const Eigen::VectorXd>& x0, RandomStream& rng) {
    if (op.severity < 0.0) throw std::invalid_argument("apply_corruption: severity must be >= 0");
    if (op.severity == 0.0) return x0;
    const int dim = static_cast<int>(x0.size());
    switch (op.kind) {
        case CorruptionKind::low_freq_additive:
            return x0 + op.severity * band_sinusoid(dim, op.band_lo, op.band_hi);
        case CorruptionKind::high_freq_additive:
            return x0 + op.severity * (bandpass_projection(dim, op.band_lo, op.band_hi) *
                                       rng.normal_vector(dim));
        case CorruptionKind::spectral_blur: {
            const double gain = 1.0 / (1.0 + op.severity) - 1.0;
            return x0 + gain * (bandpass_projection(dim, op.band_lo, op.band_hi) * x0);
        }
        case CorruptionKind::constant_shift:
            return x0 + Eigen::VectorXd::Constant(dim, op.severity);
    }
    throw std::logic_error("apply_corruption: unhandled kind");
}

/// Five-level severity grid: level s maps to amplitude 0.5*s times a
/// per-kind base unit, chosen so mid-grid corruption produces substantial
/// (but recoverable) misclassification on the benchmark world.
inline double corruption_base_unit(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::low_freq_additive: return 2.0;
        case CorruptionKind::high_freq_additive: return 2.0;
        case CorruptionKind::spectral_blur: return 1.2;
        case CorruptionKind::constant_shift: return 0.6;
    }
    return 1.0;
}

inline double severity_amplitude(CorruptionKind kind, int level) {
    if (level < 0 || level > 5)
        throw std::invalid_argument("severity_amplitude: level " + std::to_string(level) +
                                    " outside [0, 5]");
    return 0.5 * level * corruption_base_unit(kind);
}

/// Standard operator for a (kind, severity-level) grid cell with the default
/// frequency bands for a given dimensionality.
inline CorruptionOperator make_corruption(CorruptionKind kind, int severity_level, int dim) {
    CorruptionOperator op;
    op.kind = kind;
    op.severity = severity_amplitude(kind, severity_level);
    const int nyq = max_frequency(dim);
    switch (kind) {
        case CorruptionKind::low_freq_additive:
            op.band_lo = 1;
            op.band_hi = std::min(3, nyq + 1);
            break;
        case CorruptionKind::high_freq_additive:
            op.band_lo = std::min(4, nyq);
            op.band_hi = nyq + 1;
            break;
        case CorruptionKind::spectral_blur:
            op.band_lo = std::min(2, nyq);
            op.band_hi = nyq + 1;
            break;
        case CorruptionKind::constant_shift:
            break;
    }
    return op;
}

}  // namespace fksteer
