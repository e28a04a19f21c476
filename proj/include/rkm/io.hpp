#pragma once

#include "rkm/rkm_engine.hpp"
#include "rkm/sim_systems.hpp"
#include "rkm/test_signals.hpp"
#include "rkm/window_design.hpp"

#include <json.hpp>

#include <string>

namespace rkm::io {

using json = nlohmann::json;

json complex_to_json(cd z);
cd complex_from_json(const json& j);

/// {M, N, F, f, fourier_coeffs: [[re, im]], verification: {...}}.
json window_to_json(const WindowSequence& w, const WindowVerification* verification = nullptr);
WindowSequence window_from_json(const json& j);
json verification_to_json(const WindowVerification& v);
json catalog_to_json(const CatalogWindow& w);

/// {kind, M, L, seed, params}; spectra are not stored.
json plan_to_json(const ExcitationPlan& plan);
/// Regenerates the signals from the stored recipe.
ExcitationPlan plan_from_json(const json& j);
/// Builds a plan from a kind name, sizes, seed and a params object.
ExcitationPlan make_plan(const std::string& kind, std::int64_t M, std::int64_t L, std::uint64_t seed,
                         const json& params);

/// Per-bin records {mu, Omega, H, Phi, Psi, var_H, cov_H, var_Phi, var_Psi,
/// cov_Psi, ci: {...}} plus campaign metadata.
json result_to_json(const MeasurementResult& r);
json region_to_json(const ConfidenceRegion& c);

/// CSV with a leading comment naming the reproduced figure. |H| in
/// 20 log10, Phi in 10 log10. `loglog` adds a log10(sin(Omega/2)) column.
std::string result_to_csv(const MeasurementResult& r, const std::string& figure, bool loglog = false);

/// One time block v_lambda(k) as CSV (k, re, im).
std::string signal_to_csv(const ExcitationPlan& plan, std::int64_t lambda);

/// System spec {kind, params, noise: {...}, seed}.
struct SystemSpec {
    SimSystem system;
    NoiseSource noise;
    std::uint64_t seed = 0;
};
SystemSpec system_from_json(const json& j);
NoiseSource noise_from_json(const json& j, std::uint64_t seed);
json noise_to_json(const NoiseSource& n);

/// Measurement campaign file {M, N, E, L, alpha, mode, psd_only, figure,
/// excitation: {kind, seed, params}, system: {...}, window: "path"}.
struct Campaign {
    std::int64_t M = 64;
    std::int64_t N = 4;
    std::int64_t E = 0;
    std::int64_t L = 10;
    double alpha = 0.1;
    SystemMode mode = SystemMode::complex;
    bool psd_only = false;
    std::string figure = "measurement";
    json excitation = {{"kind", "multitone"}, {"seed", 1}, {"params", json::object()}};
    SystemSpec system;
    std::string window_path;
    std::uint64_t fallback_seed = 0;
};
Campaign campaign_from_json(const json& j);

/// Loads the window file when one is given, otherwise designs it.
WindowSequence campaign_window(const Campaign& c);

/// Runs one campaign. `repetition` r shifts the excitation and noise seeds by
/// r so that repeated runs are independent and reproducible.
MeasurementResult run_measurement(const Campaign& c, const WindowSequence& window, unsigned threads,
                                  std::uint64_t repetition = 0);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace rkm::io
