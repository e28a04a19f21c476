#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <string>

namespace rkm {

using cd = std::complex<double>;

/// Relative machine precision used throughout (binary64, 53-bit mantissa).
constexpr double kEps = 0x1p-52;
constexpr int kMantissaBits = 53;
constexpr double kPi = 3.141592653589793238462643383279502884;

/// Complex values indexed by frequency bin mu (Omega = mu*2*pi/M).
using ComplexSpectrum = Eigen::VectorXcd;
/// Real values indexed by discrete time k.
using RealSequence = Eigen::VectorXd;

/// Diagnostics go through one process-wide sink (stderr by default).
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

/// sin(pi*n/d) with the argument reduced on integers to |arg| <= pi/4 before
/// any floating-point multiplication by pi.
double sin_pi_ratio(std::int64_t n, std::int64_t d);
/// cos(pi*n/d), same reduction as sin_pi_ratio.
double cos_pi_ratio(std::int64_t n, std::int64_t d);

/// sin and cos of pi*k/F for k = 0 ... 2F-1 (one full period).
struct TrigTables {
    Eigen::VectorXd sin;
    Eigen::VectorXd cos;
};
TrigTables trig_tables(std::int64_t F);

/// Unscaled forward DFT with kernel exp(-j*2*pi*mu*k/n); the inverse applies
/// 1/n. Power-of-two lengths use radix 2, other lengths a direct sum.
Eigen::VectorXcd fft(const Eigen::VectorXcd& x, bool inverse = false);
inline Eigen::VectorXcd ifft(const Eigen::VectorXcd& x) { return fft(x, true); }

/// Sum whose next term is always the remaining one that brings the running
/// sum closest to zero (ties: the smaller term), with compensated addition.
double ordered_sum(const Eigen::Ref<const Eigen::VectorXd>& terms);

/// Sum of x(k)*exp(-j*2*pi*mu*k/M) with integer-reduced twiddle indices and
/// ordered_sum on the real and imaginary parts separately.
cd direct_dft_bin(const Eigen::Ref<const Eigen::VectorXd>& x, std::int64_t mu, std::int64_t M);
/// Same, reusing tables from trig_tables(M) across many bins.
cd direct_dft_bin(const Eigen::Ref<const Eigen::VectorXd>& x, std::int64_t mu, std::int64_t M,
                  const TrigTables& tables);

/// Inverse of std::erfc on (0, 2).
double erfc_inv(double y);

/// Error-free transformation a + b = s + e.
inline void two_sum(double a, double b, double& s, double& e)
{
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

} // namespace rkm
