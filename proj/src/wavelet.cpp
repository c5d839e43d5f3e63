#include "eegpref/wavelet.hpp"

#include <algorithm>
#include <cmath>

namespace eegpref {

const char* band_name(Band b) { return kBandNames[static_cast<int>(b)]; }

Band band_from_name(const std::string& name) {
    for (int i = 0; i < 5; ++i) {
        if (name == kBandNames[i]) return static_cast<Band>(i);
    }
    throw ValidationError("unknown band name '" + name + "'");
}

std::pair<double, double> nominal_band_range(Band b) {
    switch (b) {
        case Band::delta: return {0.0, 3.5};
        case Band::theta: return {4.0, 7.0};
        case Band::alpha: return {8.0, 13.0};
        case Band::beta:  return {14.0, 30.0};
        case Band::gamma: return {30.0, 60.0};
    }
    throw ValidationError("bad band");
}

const WaveletFilterPair& db8_filters() {
    // Extremal-phase Daubechies scaling filter, p = 8 vanishing moments,
    // normalized so the taps sum to sqrt(2). Computed by spectral
    // factorization of the Daubechies polynomial at 60-digit precision and
    // rounded to the nearest doubles; the rounded taps satisfy the
    // orthonormality identities to ~1e-16 and the moment sums to ~2e-10.
    static const WaveletFilterPair pair = [] {
        WaveletFilterPair p{};
        p.lowpass = {
            0.054415842243104010,    0.31287159091429997,    0.67563073629728981,
            0.58535468365420671,    -0.015829105256349306,  -0.28401554296154693,
            0.00047248457391328277,  0.12874742662047846,   -0.017369301001807546,
            -0.044088253930794752,   0.013981027917398282,   0.0087460940474057767,
            -0.0048703529934515743, -0.00039174037337694705, 0.00067544940645056937,
            -0.00011747678412476953};
        for (int k = 0; k < 16; ++k) {
            p.highpass[k] = (k % 2 == 0 ? 1.0 : -1.0) * p.lowpass[15 - k];
        }
        return p;
    }();
    return pair;
}

void dwt_step(const Eigen::VectorXd& signal, const WaveletFilterPair& filters,
              Eigen::VectorXd& approx, Eigen::VectorXd& detail) {
    const Eigen::Index n = signal.size();
    if (n < 2 || n % 2 != 0) {
        throw ValidationError("dwt_step: signal length must be even and >= 2, got " +
                              std::to_string(n));
    }
    const Eigen::Index half = n / 2;
    approx.resize(half);
    detail.resize(half);
    for (Eigen::Index i = 0; i < half; ++i) {
        double a = 0.0, d = 0.0;
        for (int j = 0; j < 16; ++j) {
            const double v = signal[(2 * i + j) % n];
            a += filters.lowpass[j] * v;
            d += filters.highpass[j] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

Eigen::VectorXd idwt_step(const Eigen::VectorXd& approx, const Eigen::VectorXd& detail,
                          const WaveletFilterPair& filters) {
    if (approx.size() != detail.size()) {
        throw ValidationError("idwt_step: approx length " + std::to_string(approx.size()) +
                              " != detail length " + std::to_string(detail.size()));
    }
    const Eigen::Index half = approx.size();
    const Eigen::Index n = 2 * half;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    // Adjoint of the analysis step; exact inverse by orthonormality.
    for (Eigen::Index i = 0; i < half; ++i) {
        for (int j = 0; j < 16; ++j) {
            out[(2 * i + j) % n] += filters.lowpass[j] * approx[i] + filters.highpass[j] * detail[i];
        }
    }
    return out;
}

int decomposition_levels(double fs_hz) {
    if (fs_hz < 128.0) {
        throw DesignError("decompose_bands: fs_hz " + std::to_string(fs_hz) +
                          " too low to realize five bands below 60 Hz (need >= 128)");
    }
    int levels = 1;
    while (fs_hz / std::pow(2.0, levels + 1) > 4.0) ++levels;
    return levels;
}

std::pair<double, double> dyadic_band_range(Band b, double fs_hz, int n_levels) {
    const int k = static_cast<int>(b);
    const double hi = fs_hz / std::pow(2.0, n_levels + 1 - k);
    const double lo = (b == Band::delta) ? 0.0 : fs_hz / std::pow(2.0, n_levels + 2 - k);
    return {lo, hi};
}

Eigen::VectorXd BandDecomposition::discarded_hf() const {
    Eigen::Index total = 0;
    for (const auto& d : discarded_levels) total += d.size();
    Eigen::VectorXd out(total);
    Eigen::Index at = 0;
    for (const auto& d : discarded_levels) {
        out.segment(at, d.size()) = d;
        at += d.size();
    }
    return out;
}

double BandDecomposition::discarded_energy() const {
    double e = 0.0;
    for (const auto& d : discarded_levels) e += d.squaredNorm();
    return e;
}

double BandDecomposition::total_energy() const {
    double e = discarded_energy();
    for (const auto& b : bands) e += b.squaredNorm();
    return e;
}

BandDecomposition decompose_bands(const Eigen::VectorXd& signal, double fs_hz) {
    const int levels = decomposition_levels(fs_hz);
    if (signal.size() < 64) {
        throw ValidationError("decompose_bands: signal length " + std::to_string(signal.size()) +
                              " must be >= 64");
    }

    BandDecomposition out;
    out.fs_hz = fs_hz;
    out.n_levels = levels;
    out.original_length = signal.size();
    const Eigen::Index block = Eigen::Index(1) << levels;
    out.padded_length = ((signal.size() + block - 1) / block) * block;

    Eigen::VectorXd current = Eigen::VectorXd::Zero(out.padded_length);
    current.head(signal.size()) = signal;

    const auto& filters = db8_filters();
    std::vector<Eigen::VectorXd> details(levels);  // details[l-1] = D_l
    for (int l = 1; l <= levels; ++l) {
        Eigen::VectorXd approx, detail;
        dwt_step(current, filters, approx, detail);
        details[l - 1] = std::move(detail);
        current = std::move(approx);
    }

    out.bands[static_cast<int>(Band::delta)] = std::move(current);  // A_L
    out.bands[static_cast<int>(Band::theta)] = std::move(details[levels - 1]);
    out.bands[static_cast<int>(Band::alpha)] = std::move(details[levels - 2]);
    out.bands[static_cast<int>(Band::beta)] = std::move(details[levels - 3]);
    out.bands[static_cast<int>(Band::gamma)] = std::move(details[levels - 4]);
    for (int l = levels - 4; l >= 1; --l) {
        out.discarded_levels.push_back(std::move(details[l - 1]));
    }
    return out;
}

Eigen::VectorXd reconstruct_bands(const BandDecomposition& decomp) {
    const auto& filters = db8_filters();
    Eigen::VectorXd current = decomp.band(Band::delta);
    const std::array<Band, 4> order = {Band::theta, Band::alpha, Band::beta, Band::gamma};
    for (Band b : order) {
        current = idwt_step(current, decomp.band(b), filters);
    }
    for (const auto& d : decomp.discarded_levels) {
        current = idwt_step(current, d, filters);
    }
    if (current.size() != decomp.padded_length) {
        throw NumericalError("reconstruct_bands: length mismatch");
    }
    return current;
}

}  // namespace eegpref
