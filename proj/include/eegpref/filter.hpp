#pragma once

#include <Eigen/Dense>
#include <vector>

#include "eegpref/errors.hpp"

namespace eegpref {

enum class FilterKind { bandpass, highpass, lowpass, bandstop };

struct FilterSpec {
    FilterKind kind = FilterKind::bandpass;
    double low_hz = 0.0;   // lower corner; the corner for highpass
    double high_hz = 0.0;  // upper corner; the corner for lowpass
    int order = 4;         // prototype order, even, in {2,4,6,8}
};

// One biquad, direct form II transposed: b0,b1,b2 / 1,a1,a2.
struct Biquad {
    double b0, b1, b2;
    double a1, a2;
};

// Designed filter as a cascade of second-order sections. A bandpass of
// prototype order n realizes 2n poles (n sections); lowpass/highpass realize
// n poles (n/2 sections).
struct SosFilter {
    std::vector<Biquad> sections;
    double max_pole_radius = 0.0;  // for edge-transient sizing in filtfilt

    int n_poles() const { return 2 * static_cast<int>(sections.size()); }
};

// Butterworth design via prewarped bilinear transform. Magnitude at each
// corner is exactly -3.01 dB; gain is unity at DC (lowpass), Nyquist
// (highpass) or the warped geometric band center (bandpass).
SosFilter design_butterworth(const FilterSpec& spec, double fs_hz);

// Magnitude response at frequency f_hz, single pass.
double sos_magnitude(const SosFilter& filt, double f_hz, double fs_hz);

// Single causal pass with given initial state (2 values per section).
Eigen::VectorXd sosfilt(const SosFilter& filt, const Eigen::VectorXd& x);

// Zero-phase forward-backward filtering. The input is extended at both ends
// by odd reflection; the extension is at least 3x the realized filter order
// and grows (up to the signal length minus one) until start-up transients of
// the slowest pole decay by a factor 1e10. Throws if the signal is shorter
// than 3x the realized order plus one.
Eigen::VectorXd filtfilt(const SosFilter& filt, const Eigen::VectorXd& x);

}  // namespace eegpref
