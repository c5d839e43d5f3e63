#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eegpref/rng.hpp"
#include "eegpref/wavelet.hpp"

using namespace eegpref;

namespace {

Eigen::VectorXd noise(std::uint64_t seed, Eigen::Index n) {
    Rng rng(seed);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
    return x;
}

Eigen::VectorXd sinusoid(double f_hz, double fs_hz, Eigen::Index n) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = std::sin(2.0 * std::numbers::pi * f_hz * static_cast<double>(i) / fs_hz);
    }
    return x;
}

}  // namespace

TEST_CASE("db8 filter identities") {
    const auto& [h, g] = db8_filters();

    double sum = 0.0, sum_sq = 0.0;
    for (double v : h) {
        sum += v;
        sum_sq += v * v;
    }
    CHECK(std::abs(sum - std::numbers::sqrt2) < 1e-10);
    CHECK(std::abs(sum_sq - 1.0) < 1e-10);

    for (int m = 1; m <= 7; ++m) {
        double dot = 0.0;
        for (int k = 0; k + 2 * m < 16; ++k) dot += h[k] * h[k + 2 * m];
        CHECK(std::abs(dot) < 1e-10);
    }

    for (int k = 0; k < 16; ++k) {
        CHECK(g[k] == (k % 2 == 0 ? 1.0 : -1.0) * h[15 - k]);
    }

    // eight vanishing moments
    for (int m = 0; m <= 7; ++m) {
        double moment = 0.0;
        for (int k = 0; k < 16; ++k) {
            moment += std::pow(static_cast<double>(k), m) * g[k];
        }
        CHECK(std::abs(moment) < 1e-6);
    }
}

TEST_CASE("dwt_step on a constant lives in the approximation") {
    const auto& filters = db8_filters();
    const double c = 3.25;
    Eigen::VectorXd approx, detail;
    dwt_step(Eigen::VectorXd::Constant(32, c), filters, approx, detail);
    REQUIRE(approx.size() == 16);
    REQUIRE(detail.size() == 16);
    CHECK(detail.cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index i = 0; i < approx.size(); ++i) {
        CHECK(approx[i] == doctest::Approx(c * std::numbers::sqrt2).epsilon(1e-12));
    }
}

TEST_CASE("dwt_step conserves energy and inverts exactly") {
    const auto& filters = db8_filters();
    const Eigen::VectorXd x = noise(5, 256);
    Eigen::VectorXd approx, detail;
    dwt_step(x, filters, approx, detail);
    const double in = x.squaredNorm();
    const double out = approx.squaredNorm() + detail.squaredNorm();
    CHECK(std::abs(in - out) / in < 1e-9);

    const Eigen::VectorXd back = idwt_step(approx, detail, filters);
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("idwt_step basics") {
    const auto& filters = db8_filters();
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(8);
    CHECK(idwt_step(zero, zero, filters).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd impulse = Eigen::VectorXd::Zero(8);
    impulse[0] = 1.0;
    const Eigen::VectorXd resp = idwt_step(impulse, Eigen::VectorXd::Zero(8), filters);
    CHECK(std::abs(resp.squaredNorm() - 1.0) < 1e-12);  // synthesis is orthonormal

    CHECK_THROWS_AS(idwt_step(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(8), filters),
                    ValidationError);
    Eigen::VectorXd a, d;
    CHECK_THROWS_AS(dwt_step(Eigen::VectorXd::Zero(7), filters, a, d), ValidationError);
}

TEST_CASE("decompose_bands realizes the dyadic edges") {
    CHECK(decomposition_levels(250.0) == 5);
    CHECK(decomposition_levels(128.0) == 4);
    CHECK_THROWS_AS(decomposition_levels(100.0), DesignError);

    const auto [d_lo, d_hi] = dyadic_band_range(Band::delta, 250.0, 5);
    CHECK(d_lo == 0.0);
    CHECK(d_hi == doctest::Approx(3.90625));
    CHECK(dyadic_band_range(Band::theta, 250.0, 5).second == doctest::Approx(7.8125));
    CHECK(dyadic_band_range(Band::alpha, 250.0, 5).second == doctest::Approx(15.625));
    CHECK(dyadic_band_range(Band::beta, 250.0, 5).second == doctest::Approx(31.25));
    CHECK(dyadic_band_range(Band::gamma, 250.0, 5).first == doctest::Approx(31.25));
    CHECK(dyadic_band_range(Band::gamma, 250.0, 5).second == doctest::Approx(62.5));

    CHECK_THROWS_AS(decompose_bands(Eigen::VectorXd::Zero(32), 250.0), ValidationError);
}

TEST_CASE("a pure 10 Hz tone lands in the alpha band") {
    const auto decomp = decompose_bands(sinusoid(10.0, 250.0, 2048), 250.0);
    CHECK(decomp.n_levels == 5);
    CHECK(decomp.padded_length == 2048);
    const double alpha_frac = decomp.band_energy(Band::alpha) / decomp.total_energy();
    CHECK(alpha_frac >= 0.80);
}

TEST_CASE("white noise energy partitions across all bands") {
    const Eigen::VectorXd x = noise(9, 2000);  // padded to 2016
    const auto decomp = decompose_bands(x, 250.0);
    for (int b = 0; b < 5; ++b) {
        CHECK(decomp.band_energy(static_cast<Band>(b)) > 0.0);
    }
    CHECK(decomp.discarded_energy() > 0.0);
    const double total = decomp.total_energy();
    CHECK(std::abs(total - x.squaredNorm()) / x.squaredNorm() < 1e-9);
}

TEST_CASE("perfect reconstruction of the padded input") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::Index n = 64 + static_cast<Eigen::Index>(Rng(seed).below(4000));
        const Eigen::VectorXd x = noise(seed + 100, n);
        const auto decomp = decompose_bands(x, 250.0);
        const Eigen::VectorXd back = reconstruct_bands(decomp);
        REQUIRE(back.size() == decomp.padded_length);
        Eigen::VectorXd padded = Eigen::VectorXd::Zero(decomp.padded_length);
        padded.head(n) = x;
        CHECK((back - padded).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("circular shift by 2^L permutes the approximation by one") {
    const int levels = decomposition_levels(250.0);
    const Eigen::Index block = Eigen::Index(1) << levels;
    const Eigen::Index n = 2048;  // exact multiple of 2^L, no padding
    const Eigen::VectorXd x = noise(21, n);
    Eigen::VectorXd shifted(n);
    for (Eigen::Index i = 0; i < n; ++i) shifted[i] = x[(i + block) % n];

    const auto a = decompose_bands(x, 250.0);
    const auto b = decompose_bands(shifted, 250.0);
    const auto& delta_a = a.band(Band::delta);
    const auto& delta_b = b.band(Band::delta);
    REQUIRE(delta_a.size() == delta_b.size());
    const Eigen::Index m = delta_a.size();
    for (Eigen::Index i = 0; i < m; ++i) {
        CHECK(delta_b[i] == doctest::Approx(delta_a[(i + 1) % m]).epsilon(1e-9));
    }
}

TEST_CASE("decomposition is deterministic") {
    const Eigen::VectorXd x = noise(33, 500);
    const auto a = decompose_bands(x, 250.0);
    const auto b = decompose_bands(x, 250.0);
    for (int i = 0; i < 5; ++i) {
        CHECK(a.bands[i] == b.bands[i]);
    }
}
