#include "oracles.hpp"
#include "rkm/window_design.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace rkm;

namespace {

double acf_at(const WindowVerification& v, std::int64_t k)
{
    const Eigen::Index F = (v.acf.size() + 1) / 2;
    return v.acf[F - 1 + k];
}

} // namespace

TEST_CASE("bilinear parameter")
{
    const double expect = 2.0 / (1.0 + std::pow(1.5, 8.0 / (3.0 * (1.0 - 8.0))) / std::tan(kPi / 16.0));
    CHECK(std::abs(bilinear_c({8, 3}) - expect) <= 4.0 * kEps);
    CHECK(std::abs(bilinear_c({1024, 4}) - oracle::bilinear_c(1024, 4)) <= 4.0 * kEps);
    double prev = 2.0;
    for (std::int64_t M : {4, 16, 64, 256, 1024, 8192}) {
        const double c = bilinear_c({M, 4});
        CHECK(c > 0.0);
        CHECK(c < prev);
        prev = c;
    }
    CHECK(prev < 1e-2);
    CHECK_THROWS(bilinear_c({64, 1}));
}

TEST_CASE("cepstrum FFT length")
{
    auto listing = [](std::int64_t M, std::int64_t N, int bits) {
        const double Ms = (bits - 1) * std::pow(2.0, std::log(double(N) / 3.0)) * std::pow(3.6, 1.0 / double(M));
        return std::int64_t{1} << static_cast<int>(std::ceil(std::log2(Ms)));
    };
    CHECK(cepstrum_fft_length({1024, 4}) == listing(1024, 4, 53));
    CHECK(cepstrum_fft_length({64, 8}) == listing(64, 8, 53));
    CHECK(cepstrum_fft_length({64, 8}) == 128);
    CHECK(cepstrum_fft_length({1024, 3}) == 64);
    CHECK(cepstrum_fft_length({1024, 4}, 24) >= 32);
    const BilinearParams p = bilinear_params({256, 5});
    CHECK(p.c > 0.0);
    CHECK(p.c < 2.0);
    CHECK(p.M_tilde == cepstrum_fft_length({256, 5}));
}

TEST_CASE("magnitude-squared coefficients")
{
    CHECK(magnitude_squared_coeffs({8, 1}).size() == 1);
    const RealSequence m2 = magnitude_squared_coeffs({8, 2});
    CHECK(std::abs(m2[1] / m2[0] - 0.5) <= 1e-15);

    const std::int64_t M = 16, N = 3;
    const auto g = oracle::base_window(M, N);
    const RealSequence m3 = magnitude_squared_coeffs({M, N});
    const oracle::q D0 = oracle::superposed_spectrum(g, M, N, 0);
    for (std::int64_t nu = 1; nu < N; ++nu) {
        const double ref = static_cast<double>(
            oracle::superposed_spectrum(g, M, N, 2 * oracle::kPiQ * nu / (N * M)) / D0);
        CHECK(std::abs(m3[nu] / m3[0] - ref) <= 1e-12 * ref);
    }
}

TEST_CASE("N = 2 closed form")
{
    for (std::int64_t M : {2, 4, 8, 64, 1024}) {
        const WindowSequence w = design_window({M, 2});
        const cd closed = -double(M) * cd(0.5, 0.5) * std::polar(1.0, kPi / double(M));
        CHECK(std::abs(w.fourier_coeffs[0] - cd(double(M))) <= 1e-13 * double(M));
        CHECK(std::abs(w.fourier_coeffs[1] - closed) <= 1e-13 * std::abs(closed));
        const RealSequence phi = phase_coeffs({M, 2}, bilinear_params({M, 2}));
        CHECK(std::abs(std::polar(1.0, -phi[0]) - closed / std::abs(closed)) <= 1e-13);
    }
}

TEST_CASE("trivial designs")
{
    const WindowSequence r = design_window({4, 1});
    CHECK(r.f.size() == 4);
    for (Eigen::Index k = 0; k < 4; ++k)
        CHECK(r.f[k] == 1.0);
    const WindowSequence h = design_window({2, 2});
    CHECK(std::abs(h.f[0] - 1.0) <= 4 * kEps);
    CHECK(std::abs(h.f[1] - 1.0) <= 4 * kEps);
    CHECK(std::abs(h.f[2]) <= 4 * kEps);
    CHECK(std::abs(h.f[3]) <= 4 * kEps);
}

TEST_CASE("synthesis reproduces the window from its coefficients")
{
    const WindowSequence w = design_window({32, 5});
    CHECK((synthesize_window(w.spec, w.fourier_coeffs) - w.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("verification of small windows")
{
    const WindowVerification r = verify_window(design_window({4, 1}));
    CHECK(acf_at(r, 0) == 1.0);
    for (std::int64_t k = 1; k < 4; ++k)
        CHECK(std::abs(acf_at(r, k) - (4.0 - double(k)) / 4.0) <= 1e-16);
    CHECK(r.passed());

    const WindowVerification v = verify_window(design_window({4, 2}));
    CHECK(std::abs(acf_at(v, 0) - 1.0) <= 1e-16);
    CHECK(std::abs(acf_at(v, 4)) <= 1e-16);
    CHECK(v.passed());
}

TEST_CASE("designed windows satisfy the window conditions")
{
    for (auto [M, N] : {std::pair<std::int64_t, std::int64_t>{4, 2}, {16, 3}, {64, 4}, {231, 5}, {100, 7}, {17, 2}}) {
        CAPTURE(M);
        CAPTURE(N);
        const WindowSequence w = design_window({M, N});
        const WindowVerification v = verify_window(w);
        CHECK(v.passed());
        CHECK(w.warnings.empty());
        const std::int64_t F = N * M;
        // ACF grid condition.
        double grid = 0.0;
        for (std::int64_t k = 1 - N; k < N; ++k)
            grid += std::abs(acf_at(v, k * M) - (k == 0 ? 1.0 : 0.0));
        CHECK(grid <= 100.0 * kEps * double(2 * N - 1));
        // The ACF is even and matches a binary128 self-correlation.
        for (std::int64_t k = 1; k < F; ++k)
            CHECK(acf_at(v, k) == acf_at(v, -k));
        for (std::int64_t k : {std::int64_t{0}, M, F / 2, F - 1})
            CHECK(std::abs(acf_at(v, k) - oracle::acf(w.f, M, k)) <= 4 * kEps);
        // Zero condition.
        const double bound = 10.0 * std::sqrt(double(F)) * kEps * w.f.cwiseAbs().maxCoeff();
        CHECK(v.zero_grid_errors.maxCoeff() <= bound);
        // Energy.
        CHECK(std::abs(w.f.squaredNorm() / (double(F) / double(N)) - 1.0) <= 1e-12);
        // Spectrum value M at Omega = 0.
        CHECK(std::abs(window_dtft(w.f, 0.0) - cd(double(M))) <= 1e-12 * double(M));
    }
}

TEST_CASE("large window precision")
{
    const WindowVerification v = verify_window(design_window({1024, 4}));
    CHECK(v.eps_2_20_rms <= 5e-15);
    CHECK(std::abs(v.eps_2_20_rms - v.acf_grid_errors.norm()) <= 1e-30);
}

TEST_CASE("factorization consistency on a dense grid")
{
    const std::int64_t M = 16, N = 4, F = M * N;
    const WindowSequence w = design_window({M, N});
    const auto g = oracle::base_window(M, N);
    const oracle::q D0 = oracle::superposed_spectrum(g, M, N, 0);
    double worst = 0.0;
    for (std::int64_t i = 0; i < 16 * F; ++i) {
        const oracle::q Om = 2 * oracle::kPiQ * i / (16 * F);
        const double ref = static_cast<double>(oracle::superposed_spectrum(g, M, N, Om) / D0);
        const double got = std::norm(window_dtft(w.f, static_cast<double>(Om))) / double(M * M);
        worst = std::max(worst, std::abs(got - ref));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("stopband slope follows the length factor")
{
    for (std::int64_t N = 1; N <= 3; ++N) {
        const WindowSequence w = design_window({128, N});
        const double s = stopband_slope(w.f, 8.0 * kPi / 128.0);
        CAPTURE(N);
        CHECK(std::abs(s + double(N)) <= 0.1);
    }
}

TEST_CASE("perturbed window fails verification with a readable message")
{
    WindowSequence w = design_window({16, 3});
    w.f[5] += 1e-6;
    const WindowVerification v = verify_window(w);
    REQUIRE_FALSE(v.passed());
    bool named = false;
    for (const auto& msg : v.failures)
        named = named || msg.find("ACF grid condition") != std::string::npos;
    CHECK(named);
}

TEST_CASE("halfband coefficients")
{
    const RealSequence d1 = halfband_coeffs(1);
    const Eigen::Index c1 = (d1.size() - 1) / 2;
    CHECK(d1[c1] == 1.0);
    CHECK(std::abs(d1[c1 + 1] - 0.5) <= 1e-16);
    CHECK(std::abs(d1[c1 - 1] - 0.5) <= 1e-16);
    const RealSequence d2 = halfband_coeffs(2);
    const Eigen::Index c2 = (d2.size() - 1) / 2;
    for (Eigen::Index k = -3; k <= 3; ++k) {
        const double ref = (std::abs(k) <= 1 && c1 + k >= 0 && c1 + k < d1.size()) ? d1[c1 + k] : 0.0;
        CHECK(std::abs(d2[c2 + k] - ref) <= 1e-15);
    }
    for (std::int64_t N : {3, 4, 6, 9}) {
        const RealSequence d = halfband_coeffs(N);
        const Eigen::Index c = (d.size() - 1) / 2;
        CHECK(d[c] == doctest::Approx(1.0).epsilon(1e-14));
        for (Eigen::Index k = 2; c + k < d.size(); k += 2)
            CHECK(std::abs(d[c + k]) <= 1e-14);
        // The taps span -N ... N: the last N - 1 window values vanish.
        for (Eigen::Index k = N + 1; c + k < d.size(); ++k)
            CHECK(std::abs(d[c + k]) <= 1e-14);
        const Eigen::Index outer = (N % 2 == 1) ? N : N - 1;
        CHECK(std::abs(d[c + outer]) > 1e-6);
    }
}

TEST_CASE("catalog feasibility")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const CatalogWindow ham = catalog_window(CatalogKind::hamming, nan, {64, 4});
    CHECK(ham.feasibility.meets_zero_condition);
    CHECK_FALSE(ham.feasibility.meets_power_complement);
    const CatalogWindow rect = catalog_window(CatalogKind::rectangle, nan, {64, 1});
    CHECK(rect.feasibility.meets_zero_condition);
    CHECK(rect.feasibility.meets_power_complement);
    const CatalogWindow hann = catalog_window(CatalogKind::hann, nan, {64, 2});
    CHECK(hann.feasibility.stopband_decay_order == 3);
    {
        // Local log-log slope of the sidelobe peaks at small Omega.
        const CatalogWindow h = catalog_window(CatalogKind::hann, nan, {1024, 2});
        const double F = 2048.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        for (int i = 41; i * kPi / F < 0.3; i += 2) {
            const double Om = i * kPi / F;
            const double x = std::log(std::sin(Om / 2.0)), y = std::log(std::abs(window_dtft(h.f, Om)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1;
        }
        CHECK(std::abs((n * sxy - sx * sy) / (n * sxx - sx * sx) + 3.0) <= 0.1);
    }
    CHECK_THROWS(catalog_window(CatalogKind::hann, nan, {64, 1}));
    CHECK_FALSE(catalog_window(CatalogKind::kaiser, nan, {64, 4}).feasibility.meets_zero_condition);
    for (CatalogKind k : catalog_kinds())
        CHECK(catalog_kind_from_string(to_string(k)) == k);
    // Spectrum value M at Omega = 0 for every kind that can be sampled.
    for (CatalogKind k : catalog_kinds()) {
        const CatalogWindow w = catalog_window(k, nan, {32, 4});
        CHECK(std::abs(window_dtft(w.f, 0.0).real() - 32.0) <= 1e-10);
    }
}
