#include "eegpref/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace eegpref {

namespace {

using cplx = std::complex<double>;

void check_spec(const FilterSpec& spec, double fs_hz) {
    if (fs_hz <= 0.0) throw DesignError("fs_hz must be > 0");
    if (spec.order < 2 || spec.order > 8 || spec.order % 2 != 0) {
        throw DesignError("filter order must be one of {2,4,6,8}, got " +
                          std::to_string(spec.order));
    }
    const double nyquist = fs_hz / 2.0;
    switch (spec.kind) {
        case FilterKind::bandpass:
            if (spec.low_hz < 0.0 || spec.high_hz <= spec.low_hz) {
                throw DesignError("bandpass needs 0 <= low_hz < high_hz");
            }
            if (spec.low_hz <= 0.0) {
                throw DesignError("bandpass low corner must be > 0 (use lowpass instead)");
            }
            if (spec.high_hz >= nyquist) {
                throw DesignError("bandpass corner " + std::to_string(spec.high_hz) +
                                  " Hz is at or above Nyquist " + std::to_string(nyquist));
            }
            break;
        case FilterKind::bandstop:
            if (spec.low_hz <= 0.0 || spec.high_hz <= spec.low_hz || spec.high_hz >= nyquist) {
                throw DesignError("bandstop needs 0 < low_hz < high_hz < Nyquist");
            }
            break;
        case FilterKind::highpass:
            if (spec.low_hz <= 0.0 || spec.low_hz >= nyquist) {
                throw DesignError("highpass corner must lie in (0, Nyquist)");
            }
            break;
        case FilterKind::lowpass:
            if (spec.high_hz <= 0.0 || spec.high_hz >= nyquist) {
                throw DesignError("lowpass corner must lie in (0, Nyquist)");
            }
            break;
    }
}

}  // namespace

SosFilter design_butterworth(const FilterSpec& spec, double fs_hz) {
    check_spec(spec, fs_hz);
    const int n = spec.order;
    const auto warp = [fs_hz](double f) { return std::tan(std::numbers::pi * f / fs_hz); };

    // Analog Butterworth prototype, cutoff 1 rad/s. Even order: all poles are
    // strict conjugate pairs.
    std::vector<cplx> proto(n);
    for (int k = 0; k < n; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
        proto[k] = std::polar(1.0, theta);
    }

    std::vector<cplx> s_poles;
    double w_ref = 0.0;  // digital frequency (rad/sample) where gain is pinned to 1
    int zeros_at_plus1 = 0, zeros_at_minus1 = 0;
    double notch_w = 0.0;  // bandstop zeros sit at e^{+-i notch_w}
    switch (spec.kind) {
        case FilterKind::lowpass: {
            const double wc = warp(spec.high_hz);
            for (auto p : proto) s_poles.push_back(wc * p);
            zeros_at_minus1 = n;
            w_ref = 0.0;
            break;
        }
        case FilterKind::highpass: {
            const double wc = warp(spec.low_hz);
            for (auto p : proto) s_poles.push_back(wc / p);
            zeros_at_plus1 = n;
            w_ref = std::numbers::pi;
            break;
        }
        case FilterKind::bandpass: {
            const double w1 = warp(spec.low_hz), w2 = warp(spec.high_hz);
            const double bw = w2 - w1;
            const double w0 = std::sqrt(w1 * w2);
            for (auto p : proto) {
                const cplx b = bw * p;
                const cplx disc = std::sqrt(b * b - 4.0 * w0 * w0);
                s_poles.push_back((b + disc) / 2.0);
                s_poles.push_back((b - disc) / 2.0);
            }
            zeros_at_plus1 = n;
            zeros_at_minus1 = n;
            w_ref = 2.0 * std::atan(w0);
            break;
        }
        case FilterKind::bandstop: {
            const double w1 = warp(spec.low_hz), w2 = warp(spec.high_hz);
            const double bw = w2 - w1;
            const double w0 = std::sqrt(w1 * w2);
            for (auto p : proto) {
                const cplx b = bw / p;
                const cplx disc = std::sqrt(b * b - 4.0 * w0 * w0);
                s_poles.push_back((b + disc) / 2.0);
                s_poles.push_back((b - disc) / 2.0);
            }
            notch_w = 2.0 * std::atan(w0);  // n conjugate zero pairs on the unit circle
            w_ref = 0.0;
            break;
        }
    }

    // Bilinear transform z = (1+s)/(1-s); analog zeros at 0 map to z=+1, at
    // infinity to z=-1.
    std::vector<cplx> z_poles;
    z_poles.reserve(s_poles.size());
    for (auto s : s_poles) z_poles.push_back((1.0 + s) / (1.0 - s));

    // Gain so that |H| = 1 at the reference frequency.
    const cplx zr = std::polar(1.0, w_ref);
    cplx num = 1.0, den = 1.0;
    for (int i = 0; i < zeros_at_plus1; ++i) num *= (zr - 1.0);
    for (int i = 0; i < zeros_at_minus1; ++i) num *= (zr + 1.0);
    if (spec.kind == FilterKind::bandstop) {
        const cplx zz = std::polar(1.0, notch_w);
        for (int i = 0; i < n; ++i) num *= (zr - zz) * (zr - std::conj(zz));
    }
    for (auto p : z_poles) den *= (zr - p);
    const double gain = std::abs(den / num);

    // Pair conjugates into biquads, best-damped sections first.
    std::vector<cplx> upper;
    for (auto p : z_poles) {
        if (p.imag() > 0.0) upper.push_back(p);
    }
    if (2 * upper.size() != z_poles.size()) {
        throw DesignError("internal: expected strictly complex pole pairs");
    }
    std::sort(upper.begin(), upper.end(), [](const cplx& a, const cplx& b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return a.real() < b.real();
    });

    SosFilter out;
    const double g = std::pow(gain, 1.0 / static_cast<double>(upper.size()));
    for (const auto& p : upper) {
        Biquad bq{};
        bq.a1 = -2.0 * p.real();
        bq.a2 = std::norm(p);
        double b0 = 1.0, b1 = 0.0, b2 = 0.0;
        switch (spec.kind) {
            case FilterKind::lowpass:  b1 = 2.0;  b2 = 1.0;  break;
            case FilterKind::highpass: b1 = -2.0; b2 = 1.0;  break;
            case FilterKind::bandpass: b1 = 0.0;  b2 = -1.0; break;
            case FilterKind::bandstop: b1 = -2.0 * std::cos(notch_w); b2 = 1.0; break;
        }
        bq.b0 = b0 * g;
        bq.b1 = b1 * g;
        bq.b2 = b2 * g;
        out.sections.push_back(bq);
        out.max_pole_radius = std::max(out.max_pole_radius, std::abs(p));
    }
    return out;
}

double sos_magnitude(const SosFilter& filt, double f_hz, double fs_hz) {
    const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * f_hz / fs_hz);
    const cplx zi = 1.0 / z;
    cplx h = 1.0;
    for (const auto& s : filt.sections) {
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    }
    return std::abs(h);
}

namespace {

// Steady-state section states for a unit step, scaled by upstream DC gains.
// Scaling by the first sample of the data gives step-matched start-up.
std::vector<std::array<double, 2>> sos_step_state(const SosFilter& filt) {
    std::vector<std::array<double, 2>> zi(filt.sections.size());
    double scale = 1.0;
    for (std::size_t i = 0; i < filt.sections.size(); ++i) {
        const auto& s = filt.sections[i];
        const double K = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        const double s2 = (s.b2 - s.a2 * K) * scale;
        const double s1 = (s.b1 - s.a1 * K) * scale + s2;
        zi[i] = {s1, s2};
        scale *= K;
    }
    return zi;
}

Eigen::VectorXd sosfilt_zi(const SosFilter& filt, const Eigen::VectorXd& x,
                           const std::vector<std::array<double, 2>>& zi0, double zi_scale) {
    Eigen::VectorXd y = x;
    for (std::size_t si = 0; si < filt.sections.size(); ++si) {
        const auto& s = filt.sections[si];
        double s1 = zi0[si][0] * zi_scale;
        double s2 = zi0[si][1] * zi_scale;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double xn = y[i];
            const double yn = s.b0 * xn + s1;
            s1 = s.b1 * xn - s.a1 * yn + s2;
            s2 = s.b2 * xn - s.a2 * yn;
            y[i] = yn;
        }
    }
    return y;
}

}  // namespace

Eigen::VectorXd sosfilt(const SosFilter& filt, const Eigen::VectorXd& x) {
    std::vector<std::array<double, 2>> zeros(filt.sections.size(), {0.0, 0.0});
    return sosfilt_zi(filt, x, zeros, 0.0);
}

Eigen::VectorXd filtfilt(const SosFilter& filt, const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    const int min_pad = 3 * filt.n_poles();
    if (n <= min_pad) {
        throw ValidationError("filtfilt: signal length " + std::to_string(n) +
                              " must exceed 3x filter order (" + std::to_string(min_pad) + ")");
    }
    Eigen::Index pad = min_pad;
    if (filt.max_pole_radius > 0.0 && filt.max_pole_radius < 1.0) {
        const double needed = std::log(1e10) / -std::log(filt.max_pole_radius);
        pad = std::max<Eigen::Index>(pad, static_cast<Eigen::Index>(std::ceil(needed)));
    }
    pad = std::min(pad, n - 1);

    // Odd reflection about both end samples.
    Eigen::VectorXd ext(n + 2 * pad);
    for (Eigen::Index i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
    ext.segment(pad, n) = x;
    for (Eigen::Index i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

    const auto zi = sos_step_state(filt);
    Eigen::VectorXd y = sosfilt_zi(filt, ext, zi, ext[0]);
    y.reverseInPlace();
    y = sosfilt_zi(filt, y, zi, y[0]);
    y.reverseInPlace();
    return y.segment(pad, n);
}

}  // namespace eegpref
