#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "eegpref/errors.hpp"

namespace eegpref {

enum class Band { delta = 0, theta = 1, alpha = 2, beta = 3, gamma = 4 };

inline constexpr std::array<const char*, 5> kBandNames = {"delta", "theta", "alpha", "beta",
                                                          "gamma"};

const char* band_name(Band b);
Band band_from_name(const std::string& name);

// Nominal physiological ranges in Hz: delta 0-3.5, theta 4-7, alpha 8-13,
// beta 14-30, gamma 30-60. The dyadic decomposition approximates these.
std::pair<double, double> nominal_band_range(Band b);

// Orthonormal analysis pair, 16 taps each. The highpass is the quadrature
// mirror g[k] = (-1)^k h[15-k].
struct WaveletFilterPair {
    std::array<double, 16> lowpass;
    std::array<double, 16> highpass;
};

// The Daubechies filter with 8 vanishing moments (extremal-phase
// factorization at full double precision).
const WaveletFilterPair& db8_filters();

// One periodized analysis step: circular correlation with each filter and
// downsampling by 2. Requires even length >= 2. Energy is conserved exactly
// up to rounding.
void dwt_step(const Eigen::VectorXd& signal, const WaveletFilterPair& filters,
              Eigen::VectorXd& approx, Eigen::VectorXd& detail);

// Exact inverse of dwt_step under periodization.
Eigen::VectorXd idwt_step(const Eigen::VectorXd& approx, const Eigen::VectorXd& detail,
                          const WaveletFilterPair& filters);

// Multi-level decomposition with the dyadic-level -> EEG-band mapping. Level
// count L is the smallest with fs/2^(L+1) <= 4 Hz (L=5 at fs=250). The signal
// is zero-padded to the next multiple of 2^L. A_L -> delta, D_L -> theta,
// D_{L-1} -> alpha, D_{L-2} -> beta, D_{L-3} -> gamma; finer detail levels are
// kept in discarded_levels (content above the gamma edge).
struct BandDecomposition {
    std::array<Eigen::VectorXd, 5> bands;      // indexed by Band
    std::vector<Eigen::VectorXd> discarded_levels;  // coarse to fine
    Eigen::Index original_length = 0;
    Eigen::Index padded_length = 0;
    int n_levels = 0;
    double fs_hz = 0.0;

    const Eigen::VectorXd& band(Band b) const { return bands[static_cast<int>(b)]; }
    double band_energy(Band b) const { return band(b).squaredNorm(); }
    Eigen::VectorXd discarded_hf() const;  // concatenated, coarse to fine
    double discarded_energy() const;
    double total_energy() const;
};

// Dyadic edges realized for a given band at this fs/level:
// [fs/2^(L-k+1), fs/2^(L-k)) with k the band index, delta starting at 0.
std::pair<double, double> dyadic_band_range(Band b, double fs_hz, int n_levels);

int decomposition_levels(double fs_hz);

BandDecomposition decompose_bands(const Eigen::VectorXd& signal, double fs_hz);

// Inverse cascade; returns the padded-length reconstruction.
Eigen::VectorXd reconstruct_bands(const BandDecomposition& decomp);

}  // namespace eegpref
