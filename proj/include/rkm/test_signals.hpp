#pragma once

#include "rkm/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rkm {

enum class ExcitationKind { gaussian, multitone, chirp_complex, chirp_real };

std::string to_string(ExcitationKind kind);
ExcitationKind excitation_kind_from_string(const std::string& name);

/// Real chirp parameters; V_C is the constant spectral magnitude.
struct ChirpParams {
    double V_C = 1.0;
    double cr_max = 1.5;
    double phi_max = 1.0 / 9.0;
    bool random_sign = true;
    bool random_rotation = false;

    /// phi_max = 1 - 2/cr_max^2.
    static ChirpParams from_crest(double V_C, double cr_max, bool random_sign = true, bool random_rotation = false);
    void validate() const;
};

struct GaussianParams {
    double variance = 1.0;
    bool complex_mode = false;
    /// E{v^2}/E{|v|^2}; only used in complex mode.
    cd rho = 0.0;
};

struct MultitoneParams {
    Eigen::VectorXd magnitudes;
    bool real_mode = false;
};

struct ComplexChirpParams {
    double V_C = 1.0;
    bool random_shift = false;
};

/// L periodic base blocks of length M and their DFT spectra V_lambda(mu).
struct ExcitationPlan {
    ExcitationKind kind = ExcitationKind::gaussian;
    std::int64_t M = 0;
    std::int64_t L = 0;
    std::uint64_t seed = 0;
    bool real = false;

    MultitoneParams multitone;
    ComplexChirpParams chirp_complex;
    ChirpParams chirp_real;
    GaussianParams gaussian;
    /// Per-lambda random draws, kept for inspection (phase offsets, shifts).
    std::vector<double> lambda_phase;
    std::vector<std::int64_t> lambda_shift;

    std::vector<Eigen::VectorXcd> spectra;
    std::vector<Eigen::VectorXcd> time_signals;
};

/// Independent generator for sub-measurement lambda, derived from (seed, lambda).
std::mt19937_64 lambda_stream(std::uint64_t seed, std::uint64_t lambda);
std::uint64_t splitmix64(std::uint64_t x);

ExcitationPlan gen_multitone(std::int64_t M, std::int64_t L, const Eigen::VectorXd& magnitudes, std::uint64_t seed,
                             bool real_mode);
ExcitationPlan gen_chirp_complex(std::int64_t M, std::int64_t L, double V_C, std::uint64_t seed,
                                 bool random_shift = false);
ExcitationPlan gen_chirp_real(std::int64_t M, std::int64_t L, const ChirpParams& params, std::uint64_t seed);
ExcitationPlan gen_gaussian(std::int64_t M, std::int64_t L, double variance, bool complex_mode, cd rho,
                            std::uint64_t seed);

/// Rebuilds a plan from its kind, sizes, seed and parameters.
ExcitationPlan regenerate(const ExcitationPlan& recipe);

/// V_C/sqrt(M)*exp(j*pi*k^2/M), k = 0 ... M-1.
Eigen::VectorXcd chirp_complex_base(std::int64_t M, double V_C);
/// Real chirp spectrum for one phase hub phi (no sign flip or rotation).
Eigen::VectorXcd chirp_real_spectrum(std::int64_t M, double V_C, double phi);

/// Peak magnitude over RMS of one period.
double crest_factor(const Eigen::VectorXcd& v);

/// Samples k = -E ... F-1 of the periodically continued block lambda; index i
/// of the result holds time k = i - E.
Eigen::VectorXcd periodic_extend(const ExcitationPlan& plan, std::int64_t lambda, std::int64_t E, std::int64_t F);

} // namespace rkm
