#pragma once

#include "rkm/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rkm {

/// DFT length M, length factor N and window length F = N*M.
struct WindowSpec {
    std::int64_t M = 2;
    std::int64_t N = 1;
    std::int64_t F() const { return N * M; }
};

/// Bilinear-transform parameter c and cepstrum FFT length.
struct BilinearParams {
    double c = 0.0;
    std::int64_t M_tilde = 0;
};

/// Designed window f(k), k = 0 ... F-1, with its spectrum samples
/// F(nu*2*pi/F) for nu = 0 ... N-1 (the value at nu = 0 is M).
struct WindowSequence {
    WindowSpec spec;
    RealSequence f;
    Eigen::VectorXcd fourier_coeffs;
    std::vector<std::string> warnings;
};

struct WindowVerification {
    /// d(k) for k = -(F-1) ... F-1, stored at index k + F - 1.
    RealSequence acf;
    /// |F(mu*2*pi/M)| for mu = 1 ... M-1.
    RealSequence zero_grid_errors;
    /// F(0) - M.
    double dc_error = 0.0;
    /// d(k*M) - (k == 0) for k = 1-N ... N-1, stored at index k + N - 1.
    RealSequence acf_grid_errors;
    /// Root of the summed squares of acf_grid_errors.
    double eps_2_20_rms = 0.0;
    /// Sum of f(k)^2 relative to F/N, minus one.
    double energy_error = 0.0;
    double max_abs_f = 0.0;
    std::vector<std::string> failures;
    bool passed() const { return failures.empty(); }
};

double bilinear_c(const WindowSpec& spec);
std::int64_t cepstrum_fft_length(const WindowSpec& spec, int mantissa_bits = kMantissaBits);
BilinearParams bilinear_params(const WindowSpec& spec);

/// |F(nu*2*pi/F)|^2 for nu = 0 ... N-1 up to one common positive factor.
RealSequence magnitude_squared_coeffs(const WindowSpec& spec);

/// Minimum-phase angle phi(nu) for nu = 1 ... N-1 (index nu - 1); the
/// coefficient is |F_nu|*exp(-j*phi(nu)). Cepstrum tail warnings are appended
/// to `warnings` when given and always forwarded to rkm::warn.
RealSequence phase_coeffs(const WindowSpec& spec, const BilinearParams& params,
                          std::vector<std::string>* warnings = nullptr);

WindowSequence design_window(const WindowSpec& spec);

/// Rebuilds f(k) from spectrum samples F(nu*2*pi/F), nu = 0 ... N-1.
RealSequence synthesize_window(const WindowSpec& spec, const Eigen::VectorXcd& fourier_coeffs);

WindowVerification verify_window(const WindowSequence& w);

/// Window ACF d(k) of the M = 2 design, k = -(2N-1) ... 2N-1; d(0) = 1.
RealSequence halfband_coeffs(std::int64_t N);

/// Discrete-time Fourier transform sum of f at angular frequency Omega.
cd window_dtft(const Eigen::Ref<const Eigen::VectorXd>& f, double Omega);

/// Slope of log|F(Omega)| against log sin(Omega/2), fitted on the local
/// maxima of |F| sampled on the pi/F grid, for Omega between the first
/// sample beyond `Omega_min` and pi.
double stopband_slope(const Eigen::Ref<const Eigen::VectorXd>& f, double Omega_min);

enum class CatalogKind {
    rectangle,
    triangle,
    parzen,
    hamming,
    hann,
    blackman,
    exact_blackman,
    cosine,
    tukey,
    riesz,
    bohman,
    cos_rolloff,
    root_cos_rolloff,
    gauss,
    poisson,
    cauchy,
    kaiser,
    dolph,
};

struct CatalogFeasibility {
    bool meets_zero_condition = false;
    bool meets_power_complement = false;
    /// Asymptotic power of sin(Omega/2) in the stopband rise; 0 = no power law.
    int stopband_decay_order = 0;
    std::string note;
};

struct CatalogWindow {
    CatalogKind kind = CatalogKind::rectangle;
    double param = 0.0;
    WindowSpec spec;
    RealSequence f;
    CatalogFeasibility feasibility;
};

const std::vector<CatalogKind>& catalog_kinds();
std::string to_string(CatalogKind kind);
CatalogKind catalog_kind_from_string(const std::string& name);
/// Default shape parameter for kinds that take one (NaN otherwise).
double catalog_default_param(CatalogKind kind, const WindowSpec& spec);

/// Sampled classical window of length F normalized to a spectrum value M at
/// Omega = 0. Pass NaN as `param` to use the default.
CatalogWindow catalog_window(CatalogKind kind, double param, const WindowSpec& spec);

} // namespace rkm
