#pragma once

#include "rkm/numerics.hpp"
#include "rkm/window_design.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rkm {

enum class SystemMode { complex, real };

std::string to_string(SystemMode mode);
SystemMode system_mode_from_string(const std::string& name);

struct MeasurementConfig {
    std::int64_t M = 0;
    WindowSequence window;
    std::int64_t E = 0;
    std::int64_t L_target = 0;
    SystemMode mode = SystemMode::complex;
    bool psd_only = false;
    double alpha = 0.1;
    /// Seed of the deterministic +-1 sequence used by the singular fallback.
    std::uint64_t fallback_seed = 0;
    void validate() const;
};

/// Complex number in binary128, used for the running sums.
struct QuadComplex {
    __float128 re = 0;
    __float128 im = 0;
    QuadComplex& operator+=(const QuadComplex& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    cd to_cd() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

/// Running sums over sub-measurements, per bin mu (raw sums, not divided by L):
///   Cvv  = sum |V(mu)|^2            Cvvm = sum V(mu) V(-mu)
///   Cyv  = sum Y(mu) V(mu)^*        Cyvm = sum Y(mu) V(-mu)
///   Cyy  = sum |Y(mu)|^2            Cyym = sum Y(mu) Y(-mu)
///   g    = sum V(mu)^* w            Syw  = sum w Y(mu)
/// where w = +-1 is a deterministic sequence over lambda that only the
/// singular fallback uses. Products of doubles are exact in binary128.
struct MeasurementAccumulator {
    std::int64_t M = 0;
    std::int64_t L = 0;
    std::uint64_t fallback_seed = 0;
    std::vector<__float128> Cvv, Cyy;
    std::vector<QuadComplex> Cvvm, Cyv, Cyvm, Cyym, g, Syw;

    MeasurementAccumulator() = default;
    MeasurementAccumulator(std::int64_t M, std::uint64_t fallback_seed = 0);

    /// Adds sub-measurement lambda (defaults to the running count L).
    void accumulate(const Eigen::VectorXcd& V, const Eigen::VectorXcd& Yf, std::int64_t lambda = -1);
    /// Output-only update for the PSD-only mode.
    void accumulate_output(const Eigen::VectorXcd& Yf);
    void merge(const MeasurementAccumulator& other);

    /// Empirical covariances (raw sum divided by L).
    double C_vv(std::int64_t mu) const;
    double C_yy(std::int64_t mu) const;
    cd C_vvm(std::int64_t mu) const;
    cd C_yv(std::int64_t mu) const;
    cd C_yvm(std::int64_t mu) const;
    cd C_yym(std::int64_t mu) const;
};

/// +-1 value of the fallback sequence for sub-measurement lambda.
double fallback_sign(std::uint64_t seed, std::int64_t lambda);

struct ConfidenceRegion {
    enum class Kind { interval, ellipse };
    Kind kind = Kind::interval;
    cd center = 0.0;
    double half_width = 0.0;
    cd A1 = 0.0;
    cd A2 = 0.0;
    double alpha = 0.0;
    /// True when `value` lies inside the region.
    bool contains(cd value) const;
};

struct BinResult {
    std::int64_t mu = 0;
    cd H = 0.0;
    double Phi = 0.0;
    cd Psi = 0.0;
    double var_H = 0.0;
    cd cov_H = 0.0;
    bool has_cov_H = false;
    double var_Phi = 0.0;
    double var_Psi = 0.0;
    cd cov_Psi = 0.0;
    /// Condition number of the 2x2 excitation covariance (complex mode).
    double condition = 1.0;
    bool singular = false;
    ConfidenceRegion ci_H, ci_Phi, ci_Psi;
};

struct MeasurementResult {
    std::int64_t M = 0;
    std::int64_t L = 0;
    SystemMode mode = SystemMode::complex;
    bool psd_only = false;
    double alpha = 0.1;
    std::string window_id;
    /// Complex mode: mu = 0 ... M-1. Real mode: mu = 0 ... floor(M/2).
    std::vector<BinResult> bins;
    std::vector<std::string> warnings;
    bool possible_short_settling = false;
};

/// Multiplies the record by f(k), sums the N blocks of length M and takes the
/// length-M DFT.
Eigen::VectorXcd fold_and_dft(const Eigen::VectorXcd& record, const WindowSequence& window);
Eigen::VectorXcd fold_and_dft(const Eigen::VectorXcd& record, const Eigen::VectorXd& f, std::int64_t M);

void accumulate(MeasurementAccumulator& acc, const Eigen::VectorXcd& V, const Eigen::VectorXcd& Yf);

/// Least-squares transfer estimate per bin (0 where the excitation is zero).
Eigen::VectorXcd estimate_H(const MeasurementAccumulator& acc);

/// Unbiased residual PSD and modified PSD at bin mu (complex mode).
struct TraceformValue {
    double Phi = 0.0;
    cd Psi = 0.0;
    double condition = 1.0;
    bool singular = false;
};
TraceformValue projection_traceform(const MeasurementAccumulator& acc, std::int64_t mu);

/// Fills var/cov fields of a complex-mode result from its estimates.
void estimate_variances(const MeasurementAccumulator& acc, MeasurementResult& result);

/// Fills the confidence regions of every bin for miss probability alpha.
void confidence_regions(MeasurementResult& result, double alpha);

/// Scale R of the confidence ellipse for miss probability alpha.
double ellipse_scale(double alpha);

/// Complex-mode estimation: H, Phi, Psi, variances and confidence regions.
MeasurementResult run_complex(const MeasurementAccumulator& acc, double alpha);

/// Real-valued variant on the half grid mu = 0 ... floor(M/2).
MeasurementResult run_real_variant(const MeasurementAccumulator& acc, double alpha);

/// PSD-only estimation from output spectra alone.
MeasurementResult run_psd_only(const MeasurementAccumulator& acc, bool real_mode, double alpha);
/// Convenience: windows, folds and transforms each record first.
MeasurementResult run_psd_only(const std::vector<Eigen::VectorXcd>& records, const WindowSequence& window,
                               bool real_mode, double alpha);

/// Runs the estimator selected by the configuration.
MeasurementResult estimate(const MeasurementAccumulator& acc, const MeasurementConfig& config);

/// Rule-of-thumb check: the Phi shape in dB correlating above 0.9 with |H|^2
/// in dB hints at a settling time E that is too short.
bool short_settling_suspected(const MeasurementResult& result, double threshold = 0.9);

/// Pearson correlation of two equally long sequences.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

} // namespace rkm
