#pragma once

#include "rkm/numerics.hpp"
#include "rkm/rkm_engine.hpp"
#include "rkm/test_signals.hpp"
#include "rkm/window_design.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rkm {

enum class SystemKind { delay, cheb_bandpass, halfband_butterworth, halfband_complex, third_difference, fir, sigma_delta };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// Simulated device under test. FIR kinds keep an input history; the
/// sigma-delta loop keeps its feedback state. Blocks are processed in order.
class SimSystem {
public:
    SystemKind kind = SystemKind::delay;
    /// Impulse response for the FIR kinds.
    Eigen::VectorXcd taps;
    /// Clear the state before every block (FIR default) or keep it running.
    bool reset_per_block = true;

    /// Sigma-delta parameters: word length, step Q and the coefficients
    /// c(1..5) of 1 - P(z) = 1 + sum c(i) z^-i.
    int bits = 12;
    double Q = 0.0;
    Eigen::VectorXd feedback;

    bool is_linear() const { return kind != SystemKind::sigma_delta; }
    void reset();
    /// Maps one input block (settling prefix included) to the output block.
    Eigen::VectorXcd process(const Eigen::VectorXcd& input);
    /// Frequency response of the linear part; for the sigma-delta loop this
    /// is 1.
    cd H(double Omega) const;
    /// Number of inputs clamped to the quantizer range so far.
    std::int64_t clamp_count() const { return clamped_; }

private:
    Eigen::VectorXcd history_;
    Eigen::VectorXd error_history_;
    std::int64_t clamped_ = 0;
    bool clamp_warned_ = false;
};

SimSystem make_delay(std::int64_t taps = 1);
/// Dolph-Chebyshev window of length 32 with stop edge pi/6, modulated by
/// j^k and scaled to H(pi/2) = 1.
SimSystem make_cheb_bandpass(std::int64_t length = 32, double stop_edge = kPi / 6.0);
/// Real Butterworth halfband FIR of order 2n with the center tap 0.5 + leak.
SimSystem make_halfband_butterworth(std::int64_t n = 25, double leak = 1e-6);
/// Complex halfband FIR passing 0 < Omega < pi.
SimSystem make_halfband_complex(std::int64_t n = 25);
/// H(z) = (z^-1 - 1)^3.
SimSystem make_third_difference();
SimSystem make_fir(const Eigen::VectorXcd& taps);
/// Error-feedback quantizer with step 2/(2^bits - 1) and noise transfer
/// z^-5 (z - 1)(z^2 - 2cos(0.246)z + 1)(z^2 - 2cos(0.4)z + 1).
SimSystem make_sigma_delta(int bits = 12, int feedback_zeros = 5);

/// Coefficients of 1 - P(z) in powers of z^-1, leading 1 first.
Eigen::VectorXd sigma_delta_noise_transfer(int feedback_zeros = 5);
/// Q^2/12 |1 - P(e^{j Omega})|^2.
double sigma_delta_noise_psd(double Omega, int bits = 12, int feedback_zeros = 5);

/// Random-phase complex (or real cosine) tone with amplitude A at Omega.
struct ToneComponent {
    double amplitude = 1.0;
    double Omega = 0.0;
    bool real = false;
};

/// PSD line of a tone: impulse of weight `weight` at `Omega`.
struct ToneLine {
    double Omega = 0.0;
    double weight = 0.0;
};

enum class NoiseKind { none, white_gaussian, filtered_gaussian, tone_random_phase, composite };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

/// Stationary noise n(k) = (h * e)(k) [+ conj((h * e)(k - 1))] + tones, where
/// e is white Gaussian with independent real and imaginary parts.
class NoiseSource {
public:
    NoiseKind kind = NoiseKind::none;
    double sigma_re = 0.0;
    double sigma_im = 0.0;
    Eigen::VectorXcd filter = Eigen::VectorXcd::Ones(1);
    bool add_delayed_conjugate = false;
    std::vector<ToneComponent> tones;
    std::uint64_t seed = 0;

    /// n samples for sub-measurement lambda, independent across lambda.
    Eigen::VectorXcd generate(std::int64_t n, std::uint64_t lambda) const;
    /// Continuous part of the PSD and modified PSD.
    double psd(double Omega) const;
    cd mpsd(double Omega) const;
    std::vector<ToneLine> tone_lines() const;
    /// Window-smoothed PSD and modified PSD at mu*2*pi/M for window f
    /// (the quantities the estimator is unbiased for).
    double windowed_psd(const Eigen::VectorXd& f, std::int64_t M, std::int64_t mu) const;
    cd windowed_mpsd(const Eigen::VectorXd& f, std::int64_t M, std::int64_t mu) const;
    /// Total power E{|n|^2}.
    double power() const;
    bool is_real() const;

private:
    /// n = sum a(i) e(k-i) + sum b(i) e*(k-i).
    void coefficient_sets(Eigen::VectorXcd& a, Eigen::VectorXcd& b) const;
};

NoiseSource make_white_noise(double sigma_re, double sigma_im, std::uint64_t seed);
NoiseSource make_filtered_noise(const Eigen::VectorXcd& taps, double sigma_re, double sigma_im, std::uint64_t seed);
NoiseSource make_tone_noise(double amplitude, double Omega, bool real, std::uint64_t seed);
/// White complex noise plus its one-sample-delayed conjugate plus an
/// independent random-phase complex tone.
NoiseSource make_composite_noise(double sigma, double tone_amplitude, double tone_Omega, std::uint64_t seed);

/// Window ACF d(kappa) = sum f(k) f(k + kappa) / M for kappa = 0 ... max_lag.
Eigen::VectorXd window_acf(const Eigen::VectorXd& f, std::int64_t M, std::int64_t max_lag);

/// Runs sub-measurements lambda = 0 ... plan.L-1: periodic extension over
/// [-E, F-1], the system, additive output noise, then fold and DFT of the
/// last F samples. Systems that reset per block are split over `threads`
/// workers with private accumulators merged in lambda order; stateful
/// systems run sequentially.
MeasurementAccumulator run_campaign(const ExcitationPlan& plan, const SimSystem& system, const NoiseSource& noise,
                                    const WindowSequence& window, std::int64_t E, unsigned threads = 1,
                                    std::uint64_t fallback_seed = 0);
/// Same for a stateful system instance that is advanced in place.
MeasurementAccumulator run_campaign_sequential(const ExcitationPlan& plan, SimSystem& system, const NoiseSource& noise,
                                               const WindowSequence& window, std::int64_t E,
                                               std::uint64_t fallback_seed = 0);

/// Output-only campaign: L records of noise passed through nothing, for the
/// PSD-only mode.
MeasurementAccumulator run_noise_campaign(const NoiseSource& noise, const WindowSequence& window, std::int64_t L,
                                          unsigned threads = 1);

} // namespace rkm
