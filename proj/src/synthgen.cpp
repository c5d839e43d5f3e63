#include "eegpref/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "eegpref/filter.hpp"
#include "eegpref/rng.hpp"
#include "eegpref/wavelet.hpp"

namespace eegpref {

void validate(const SynthConfig& config) {
    if (config.n_subjects < 1) throw ValidationError("synth: n_subjects must be >= 1");
    if (config.n_trials < 1) throw ValidationError("synth: n_trials must be >= 1");
    if (config.n_channels < 1 || config.n_channels > 128) {
        throw ValidationError("synth: n_channels must lie in 1..128");
    }
    if (config.fs_hz <= 0.0) throw ValidationError("synth: fs_hz must be > 0");
    if (config.epoch_seconds * config.fs_hz < 64.0) {
        throw ValidationError("synth: epoch must span at least 64 samples");
    }
    for (double a : config.band_amplitudes_uv) {
        if (a < 0.0) throw ValidationError("synth: band amplitudes must be >= 0");
    }
    if (config.pink_noise_uv < 0.0) throw ValidationError("synth: pink_noise_uv must be >= 0");
    if (config.beta_effect < 0.0) throw ValidationError("synth: beta_effect must be >= 0");
    if (config.artifact_rate < 0.0 || config.artifact_rate > 1.0) {
        throw ValidationError("synth: artifact_rate must lie in [0, 1]");
    }
    if (config.fs_hz <= 2.0 * nominal_band_range(Band::gamma).second) {
        throw ValidationError("synth: fs_hz must exceed twice the gamma band edge (120 Hz)");
    }
}

namespace {

Eigen::VectorXd white_noise(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
    return x;
}

void normalize_rms(Eigen::VectorXd& x, double target_rms) {
    const double rms = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
    x *= rms > 0.0 ? target_rms / rms : 0.0;
}

// 1/f noise by spectral synthesis: white Gaussian bins scaled by 1/sqrt(f).
Eigen::VectorXd pink_noise(Rng& rng, Eigen::Index n, double rms) {
    std::vector<std::complex<double>> spec(n, {0.0, 0.0});
    const Eigen::Index half = n / 2;
    for (Eigen::Index k = 1; k <= half; ++k) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k));
        const std::complex<double> v(rng.normal() * scale, rng.normal() * scale);
        spec[k] = v;
        if (k != n - k) spec[n - k] = std::conj(v);
    }
    if (n % 2 == 0) spec[half] = {spec[half].real(), 0.0};

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> time(n);
    fft.inv(time, spec);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = time[static_cast<std::size_t>(i)].real();
    normalize_rms(x, rms);
    return x;
}

// Post-filter samples to discard so zero-phase edge transients (which can
// spike to several component sigmas) never enter a trial.
Eigen::Index transient_margin(const SosFilter& filt) {
    if (filt.max_pole_radius <= 0.0 || filt.max_pole_radius >= 1.0) return 0;
    return static_cast<Eigen::Index>(
        std::ceil(std::log(1e10) / -std::log(filt.max_pole_radius)));
}

// Blink-like transient: one biphasic sine cycle under a Hann window, scaled
// so the peak is exactly `amp`. Zero-mean, with energy near 1/dur Hz, so the
// preprocessing band-pass leaves the peak nearly intact.
void add_blink(Eigen::Ref<Eigen::VectorXd> x, Eigen::Index at, Eigen::Index dur, double amp) {
    Eigen::VectorXd pulse(dur);
    for (Eigen::Index i = 0; i < dur; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(dur - 1);
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t);
        pulse[i] = w * std::sin(2.0 * std::numbers::pi * t);
    }
    pulse *= amp / pulse.cwiseAbs().maxCoeff();
    const Eigen::Index len = std::min(dur, x.size() - at);
    x.segment(at, len) += pulse.head(len);
}

std::string subject_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%02d", index + 1);
    return buf;
}

std::string channel_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ch%02d", index + 1);
    return buf;
}

}  // namespace

SynthDataset generate(const SynthConfig& config) {
    validate(config);
    const auto n = static_cast<Eigen::Index>(std::llround(config.epoch_seconds * config.fs_hz));

    // One zero-phase filter per band, shared across subjects.
    std::array<SosFilter, 5> band_filters;
    for (int b = 0; b < 5; ++b) {
        const auto [lo, hi] = nominal_band_range(static_cast<Band>(b));
        FilterSpec spec;
        if (lo <= 0.0) {
            spec.kind = FilterKind::lowpass;
            spec.high_hz = hi;
        } else {
            spec.kind = FilterKind::bandpass;
            spec.low_hz = lo;
            spec.high_hz = hi;
        }
        spec.order = 4;
        band_filters[b] = design_butterworth(spec, config.fs_hz);
    }
    std::array<Eigen::Index, 5> margins{};
    for (int b = 0; b < 5; ++b) margins[b] = transient_margin(band_filters[b]);

    const Eigen::Index blink_dur = static_cast<Eigen::Index>(std::llround(0.6 * config.fs_hz));
    const int frontal = std::max(1, config.n_channels / 4);

    SynthDataset out;
    for (int s = 0; s < config.n_subjects; ++s) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s)));

        // Balanced class assignment within the subject.
        std::vector<int> trial_class(config.n_trials, 0);
        for (int t = 0; t < config.n_trials / 2; ++t) trial_class[t] = 1;
        rng.shuffle(trial_class);
        std::vector<int> rank(config.n_trials);
        for (int t = 0; t < config.n_trials; ++t) rank[t] = t + 1;
        rng.shuffle(rank);

        Recording rec;
        rec.subject_id = subject_name(s);
        rec.fs_hz = config.fs_hz;
        for (int c = 0; c < config.n_channels; ++c) {
            rec.channels.push_back({channel_name(c), ChannelStatus::good});
        }
        rec.samples.resize(config.n_channels, n * config.n_trials);

        for (int t = 0; t < config.n_trials; ++t) {
            const int cls = trial_class[t];

            LabelRow row;
            row.subject_id = rec.subject_id;
            row.trial_index = t + 1;
            row.labels.rating = cls == 1 ? 4 + static_cast<int>(rng.below(2))
                                         : 1 + static_cast<int>(rng.below(3));
            row.labels.familiarity = 1 + static_cast<int>(rng.below(5));
            row.labels.purchase_intent = 1 + static_cast<int>(rng.below(5));
            row.labels.willingness_to_spend = 1 + static_cast<int>(rng.below(5));
            row.labels.preference_rank = rank[t];

            const bool planted = rng.u01() < config.artifact_rate;
            const Eigen::Index blink_at =
                planted ? static_cast<Eigen::Index>(rng.below(
                              static_cast<std::uint64_t>(std::max<Eigen::Index>(1, n - blink_dur))))
                        : 0;
            if (planted) out.planted_artifacts.emplace_back(rec.subject_id, t + 1);

            for (int c = 0; c < config.n_channels; ++c) {
                Eigen::VectorXd signal = Eigen::VectorXd::Zero(n);
                for (int b = 0; b < 5; ++b) {
                    double amp = config.band_amplitudes_uv[static_cast<std::size_t>(b)];
                    if (static_cast<Band>(b) == Band::beta && cls == 1) {
                        amp *= 1.0 + config.beta_effect;
                    }
                    const Eigen::Index m = margins[static_cast<std::size_t>(b)];
                    if (amp <= 0.0) {
                        white_noise(rng, n + 2 * m);  // keep the draw sequence aligned
                        continue;
                    }
                    Eigen::VectorXd band =
                        filtfilt(band_filters[b], white_noise(rng, n + 2 * m)).segment(m, n);
                    normalize_rms(band, amp / std::numbers::sqrt2);
                    signal += band;
                }
                if (config.pink_noise_uv > 0.0) {
                    signal += pink_noise(rng, n, config.pink_noise_uv);
                }
                if (planted && c < frontal) {
                    add_blink(signal, blink_at, blink_dur, 200.0);
                }
                rec.samples.row(c).segment(t * n, n) = signal.cast<float>();
            }
            out.labels.push_back(std::move(row));
            out.latent_class.push_back(cls);
        }
        out.recordings.push_back(std::move(rec));
    }
    return out;
}

}  // namespace eegpref
