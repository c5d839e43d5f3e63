#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eegpref/types.hpp"

namespace eegpref {

// Synthetic dataset parameters. Band amplitudes are sine-equivalent peaks in
// microvolts (component RMS = amplitude / sqrt(2)); pink_noise_uv is an RMS.
// Class-1 ("like") trials scale the beta amplitude by (1 + beta_effect).
struct SynthConfig {
    int n_subjects = 18;
    int n_trials = 12;
    double fs_hz = 250.0;
    int n_channels = 8;  // up to 128
    double epoch_seconds = 30.0;
    std::array<double, 5> band_amplitudes_uv = {20.0, 10.0, 15.0, 8.0, 4.0};  // delta..gamma
    double pink_noise_uv = 10.0;
    double beta_effect = 0.5;
    double artifact_rate = 0.0;
    std::uint64_t seed = 0;
};

void validate(const SynthConfig& config);

struct SynthDataset {
    std::vector<Recording> recordings;  // one per subject, trials concatenated
    std::vector<LabelRow> labels;
    std::vector<int> latent_class;                         // aligned to labels
    std::vector<std::pair<std::string, int>> planted_artifacts;  // (subject, trial)
};

// Per trial and channel: sum over bands of narrowband noise (white noise
// band-pass filtered into the band's nominal range) plus 1/f pink noise.
// Ratings encode the latent class (4-5 for class 1, 1-3 for class 0); classes
// are balanced within each subject. With probability artifact_rate a trial
// receives a 200 uV low-frequency blink transient on the frontal channels.
// Bit-identical output for identical config.
SynthDataset generate(const SynthConfig& config);

}  // namespace eegpref
