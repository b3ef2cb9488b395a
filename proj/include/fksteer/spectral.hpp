#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fksteer {

/// Frequency of full-DFT bin k for a length-n real signal: bins k and n-k
/// carry the same frequency, so the usable range is 0..floor(n/2).
inline int bin_frequency(int k, int n) { return std::min(k, n - k); }

inline int max_frequency(int n) { return n / 2; }

/// Orthogonal projection onto the span of DFT bins whose frequency lies in
/// [lo, hi). Real and symmetric because the kept bin set is conjugate-closed:
/// P_{jl} = (1/n) sum_{k kept} cos(2 pi k (j - l) / n).
inline Eigen::MatrixXd bandpass_projection(int dim, int lo, int hi) {
    if (dim < 1) throw std::invalid_argument("bandpass_projection: dim must be >= 1");
    if (lo < 0 || hi < lo || hi > max_frequency(dim) + 1)
        throw std::out_of_range("bandpass_projection: frequency band [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + ") outside [0, " +
                                std::to_string(max_frequency(dim) + 1) + ")");
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const int f = bin_frequency(k, dim);
        if (f < lo || f >= hi) continue;
        for (int j = 0; j < dim; ++j)
            for (int l = 0; l < dim; ++l)
                p(j, l) += std::cos(2.0 * M_PI * k * (j - l) / dim) / dim;
    }
    return p;
}

/// Keep the D lowest frequencies (0..D-1), zero the rest. D = dim keeps
/// every bin (identity).
inline Eigen::MatrixXd lowpass_projection(int dim, int cutoff) {
    if (cutoff < 1 || cutoff > dim)
        throw std::invalid_argument("lowpass_projection: cutoff " + std::to_string(cutoff) +
                                    " outside [1, dim = " + std::to_string(dim) + "]");
    return bandpass_projection(dim, 0, std::min(cutoff, max_frequency(dim) + 1));
}

/// Hard DFT truncation retaining the D lowest frequencies.
struct LowPassFilter {
    int cutoff = 4;
};

inline Eigen::VectorXd lowpass_apply(const LowPassFilter& filter, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return lowpass_projection(static_cast<int>(x.size()), filter.cutoff) * x;
}

/// Unit-L2 deterministic waveform mixing the cosines in [lo, hi). Used by the
/// additive low-frequency corruption.
inline Eigen::VectorXd band_sinusoid(int dim, int lo, int hi) {
    if (lo < 0 || hi <= lo || hi > max_frequency(dim) + 1)
        throw std::out_of_range("band_sinusoid: empty or out-of-range band [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + ")");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (int f = lo; f < hi; ++f)
        for (int j = 0; j < dim; ++j) v[j] += std::cos(2.0 * M_PI * f * j / dim);
    const double norm = v.norm();
    if (norm == 0.0)
        throw std::invalid_argument("band_sinusoid: degenerate waveform for band [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + ")");
    return v / norm;
}

}  // namespace fksteer
