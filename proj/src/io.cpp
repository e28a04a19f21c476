#include "rkm/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rkm::io {

namespace {

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or_inf(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

double db10(double x) { return x > 0.0 ? 10.0 * std::log10(x) : -std::numeric_limits<double>::infinity(); }

} // namespace

json complex_to_json(cd z) { return json::array({real_or_null(z.real()), real_or_null(z.imag())}); }

cd complex_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("complex value must be [re, im]");
    return {number_or_inf(j[0]), number_or_inf(j[1])};
}

json verification_to_json(const WindowVerification& v)
{
    json j;
    j["passed"] = v.passed();
    const Eigen::Index F = (v.acf.size() + 1) / 2;
    j["d0_error"] = v.acf.size() > 0 ? v.acf[F - 1] - 1.0 : 0.0;
    j["acf_grid_errors"] = std::vector<double>(v.acf_grid_errors.data(), v.acf_grid_errors.data() + v.acf_grid_errors.size());
    j["eps_2_20_rms"] = v.eps_2_20_rms;
    j["zero_grid_max"] = v.zero_grid_errors.size() > 0 ? v.zero_grid_errors.maxCoeff() : 0.0;
    j["dc_error"] = v.dc_error;
    j["energy_error"] = v.energy_error;
    j["max_abs_f"] = v.max_abs_f;
    j["failures"] = v.failures;
    return j;
}

json window_to_json(const WindowSequence& w, const WindowVerification* verification)
{
    json j;
    j["M"] = w.spec.M;
    j["N"] = w.spec.N;
    j["F"] = w.spec.F();
    j["f"] = std::vector<double>(w.f.data(), w.f.data() + w.f.size());
    json coeffs = json::array();
    for (Eigen::Index i = 0; i < w.fourier_coeffs.size(); ++i)
        coeffs.push_back(complex_to_json(w.fourier_coeffs[i]));
    j["fourier_coeffs"] = coeffs;
    j["verification"] = verification ? verification_to_json(*verification) : json::object();
    if (!w.warnings.empty())
        j["warnings"] = w.warnings;
    return j;
}

WindowSequence window_from_json(const json& j)
{
    WindowSequence w;
    w.spec.M = j.at("M").get<std::int64_t>();
    w.spec.N = j.at("N").get<std::int64_t>();
    if (w.spec.M < 2 || w.spec.N < 1)
        throw std::invalid_argument("window file: need M >= 2 and N >= 1");
    if (j.contains("F") && j["F"].get<std::int64_t>() != w.spec.F())
        throw std::invalid_argument("window file: F does not equal N*M");
    const auto f = j.at("f").get<std::vector<double>>();
    if (static_cast<std::int64_t>(f.size()) != w.spec.F())
        throw std::invalid_argument("window file: length of f does not equal N*M");
    w.f = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    if (j.contains("fourier_coeffs")) {
        const auto& c = j["fourier_coeffs"];
        w.fourier_coeffs.resize(static_cast<Eigen::Index>(c.size()));
        for (std::size_t i = 0; i < c.size(); ++i)
            w.fourier_coeffs[static_cast<Eigen::Index>(i)] = complex_from_json(c[i]);
    }
    return w;
}

json catalog_to_json(const CatalogWindow& w)
{
    json j;
    j["kind"] = to_string(w.kind);
    j["param"] = real_or_null(w.param);
    j["M"] = w.spec.M;
    j["N"] = w.spec.N;
    j["F"] = w.spec.F();
    j["f"] = std::vector<double>(w.f.data(), w.f.data() + w.f.size());
    j["feasibility"] = {{"meets_zero_condition", w.feasibility.meets_zero_condition},
                        {"meets_power_complement", w.feasibility.meets_power_complement},
                        {"stopband_decay_order", w.feasibility.stopband_decay_order},
                        {"note", w.feasibility.note}};
    return j;
}

json plan_to_json(const ExcitationPlan& plan)
{
    json p;
    switch (plan.kind) {
    case ExcitationKind::gaussian:
        p = {{"variance", plan.gaussian.variance},
             {"complex", plan.gaussian.complex_mode},
             {"rho", complex_to_json(plan.gaussian.rho)}};
        break;
    case ExcitationKind::multitone:
        p = {{"magnitudes", std::vector<double>(plan.multitone.magnitudes.data(),
                                                plan.multitone.magnitudes.data() + plan.multitone.magnitudes.size())},
             {"real", plan.multitone.real_mode}};
        break;
    case ExcitationKind::chirp_complex:
        p = {{"V_C", plan.chirp_complex.V_C}, {"random_shift", plan.chirp_complex.random_shift}};
        break;
    case ExcitationKind::chirp_real:
        p = {{"V_C", plan.chirp_real.V_C},
             {"cr_max", plan.chirp_real.cr_max},
             {"phi_max", plan.chirp_real.phi_max},
             {"random_sign", plan.chirp_real.random_sign},
             {"random_rotation", plan.chirp_real.random_rotation}};
        break;
    }
    return {{"kind", to_string(plan.kind)}, {"M", plan.M}, {"L", plan.L}, {"seed", plan.seed}, {"params", p}};
}

ExcitationPlan make_plan(const std::string& kind_name, std::int64_t M, std::int64_t L, std::uint64_t seed,
                         const json& params)
{
    const ExcitationKind kind = excitation_kind_from_string(kind_name);
    const double sqrtM = std::sqrt(static_cast<double>(M));
    switch (kind) {
    case ExcitationKind::gaussian: {
        const cd rho = params.contains("rho") ? complex_from_json(params["rho"]) : cd(0.0);
        return gen_gaussian(M, L, params.value("variance", 1.0), params.value("complex", false), rho, seed);
    }
    case ExcitationKind::multitone: {
        Eigen::VectorXd mags;
        if (params.contains("magnitudes")) {
            const auto m = params["magnitudes"].get<std::vector<double>>();
            mags = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(m.size()));
        } else {
            mags = Eigen::VectorXd::Constant(M, params.value("magnitude", sqrtM));
        }
        return gen_multitone(M, L, mags, seed, params.value("real", false));
    }
    case ExcitationKind::chirp_complex:
        return gen_chirp_complex(M, L, params.value("V_C", sqrtM), seed, params.value("random_shift", false));
    case ExcitationKind::chirp_real: {
        ChirpParams cp = ChirpParams::from_crest(params.value("V_C", sqrtM), params.value("cr_max", 1.5),
                                                 params.value("random_sign", true),
                                                 params.value("random_rotation", false));
        if (params.contains("phi_max"))
            cp.phi_max = params["phi_max"].get<double>();
        return gen_chirp_real(M, L, cp, seed);
    }
    }
    throw std::invalid_argument("unknown excitation kind");
}

ExcitationPlan plan_from_json(const json& j)
{
    return make_plan(j.at("kind").get<std::string>(), j.at("M").get<std::int64_t>(), j.at("L").get<std::int64_t>(),
                     j.value("seed", std::uint64_t{0}), j.value("params", json::object()));
}

json region_to_json(const ConfidenceRegion& c)
{
    json j;
    j["alpha"] = c.alpha;
    j["center"] = complex_to_json(c.center);
    if (c.kind == ConfidenceRegion::Kind::interval) {
        j["kind"] = "interval";
        j["half_width"] = real_or_null(c.half_width);
    } else {
        j["kind"] = "ellipse";
        j["A1"] = complex_to_json(c.A1);
        j["A2"] = complex_to_json(c.A2);
    }
    return j;
}

json result_to_json(const MeasurementResult& r)
{
    json j;
    j["M"] = r.M;
    j["L"] = r.L;
    j["mode"] = to_string(r.mode);
    j["psd_only"] = r.psd_only;
    j["alpha"] = r.alpha;
    j["window"] = r.window_id;
    j["warnings"] = r.warnings;
    j["possible_short_settling"] = r.possible_short_settling;
    json bins = json::array();
    for (const auto& b : r.bins) {
        json e;
        e["mu"] = b.mu;
        e["Omega"] = 2.0 * kPi * static_cast<double>(b.mu) / static_cast<double>(r.M);
        e["Phi"] = real_or_null(b.Phi);
        e["Psi"] = complex_to_json(b.Psi);
        e["var_Phi"] = real_or_null(b.var_Phi);
        e["var_Psi"] = real_or_null(b.var_Psi);
        e["cov_Psi"] = complex_to_json(b.cov_Psi);
        json ci;
        ci["Phi"] = region_to_json(b.ci_Phi);
        ci["Psi"] = region_to_json(b.ci_Psi);
        if (!r.psd_only) {
            e["H"] = complex_to_json(b.H);
            e["var_H"] = real_or_null(b.var_H);
            e["cov_H"] = b.has_cov_H ? complex_to_json(b.cov_H) : json(nullptr);
            e["condition"] = real_or_null(b.condition);
            e["singular"] = b.singular;
            ci["H"] = region_to_json(b.ci_H);
        }
        e["ci"] = ci;
        bins.push_back(e);
    }
    j["bins"] = bins;
    return j;
}

std::string result_to_csv(const MeasurementResult& r, const std::string& figure, bool loglog)
{
    std::ostringstream s;
    s << "# figure: " << figure << "\n";
    s << "# M=" << r.M << " L=" << r.L << " mode=" << to_string(r.mode) << (r.psd_only ? " psd-only" : "")
      << " window=" << r.window_id << " alpha=" << fmt(r.alpha) << "\n";
    s << "mu,Omega";
    if (loglog)
        s << ",log10_sin_half_Omega";
    if (!r.psd_only)
        s << ",|H|_dB,H_re,H_im,var_H";
    s << ",Phi_dB,Phi,Psi_re,Psi_im,var_Phi,ci_Phi_half_width\n";
    for (const auto& b : r.bins) {
        const double Om = 2.0 * kPi * static_cast<double>(b.mu) / static_cast<double>(r.M);
        s << b.mu << "," << fmt(Om);
        if (loglog)
            s << "," << fmt(std::log10(std::sin(Om / 2.0)));
        if (!r.psd_only)
            s << "," << fmt(db10(std::norm(b.H))) << "," << fmt(b.H.real()) << "," << fmt(b.H.imag()) << ","
              << fmt(b.var_H);
        s << "," << fmt(db10(b.Phi)) << "," << fmt(b.Phi) << "," << fmt(b.Psi.real()) << "," << fmt(b.Psi.imag())
          << "," << fmt(b.var_Phi) << "," << fmt(b.ci_Phi.half_width) << "\n";
    }
    return s.str();
}

std::string signal_to_csv(const ExcitationPlan& plan, std::int64_t lambda)
{
    if (lambda < 0 || lambda >= plan.L)
        throw std::out_of_range("sub-measurement index out of range");
    std::ostringstream s;
    s << "# excitation " << to_string(plan.kind) << " M=" << plan.M << " seed=" << plan.seed << " lambda=" << lambda
      << "\n";
    s << "k,re,im\n";
    const auto& v = plan.time_signals[lambda];
    for (Eigen::Index k = 0; k < v.size(); ++k)
        s << k << "," << fmt(v[k].real()) << "," << fmt(v[k].imag()) << "\n";
    return s.str();
}

NoiseSource noise_from_json(const json& j, std::uint64_t seed)
{
    NoiseSource n;
    n.seed = j.value("seed", seed);
    const std::string kind = j.value("kind", std::string("none"));
    n.kind = noise_kind_from_string(kind);
    if (n.kind == NoiseKind::none)
        return n;
    if (n.kind == NoiseKind::composite) {
        n = make_composite_noise(j.value("sigma", 0.1), j.value("tone_amplitude", 1.0), j.value("tone_Omega", 1.0),
                                 n.seed);
        return n;
    }
    n.sigma_re = j.value("sigma_re", j.value("sigma", 0.0));
    n.sigma_im = j.value("sigma_im", 0.0);
    if (n.sigma_re < 0.0 || n.sigma_im < 0.0)
        throw std::invalid_argument("noise deviations must be nonnegative");
    if (j.contains("taps")) {
        const auto& t = j["taps"];
        n.filter.resize(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i)
            n.filter[static_cast<Eigen::Index>(i)] = complex_from_json(t[i]);
        if (n.filter.size() == 0)
            throw std::invalid_argument("noise filter needs at least one tap");
    }
    n.add_delayed_conjugate = j.value("delayed_conjugate", false);
    if (j.contains("tones"))
        for (const auto& t : j["tones"])
            n.tones.push_back({t.value("amplitude", 1.0), t.at("Omega").get<double>(), t.value("real", false)});
    if (n.kind == NoiseKind::tone_random_phase && n.tones.empty())
        n.tones.push_back({j.value("amplitude", 1.0), j.at("Omega").get<double>(), j.value("real", false)});
    return n;
}

json noise_to_json(const NoiseSource& n)
{
    json j;
    j["kind"] = to_string(n.kind);
    j["sigma_re"] = n.sigma_re;
    j["sigma_im"] = n.sigma_im;
    json taps = json::array();
    for (Eigen::Index i = 0; i < n.filter.size(); ++i)
        taps.push_back(complex_to_json(n.filter[i]));
    j["taps"] = taps;
    j["delayed_conjugate"] = n.add_delayed_conjugate;
    json tones = json::array();
    for (const auto& t : n.tones)
        tones.push_back({{"amplitude", t.amplitude}, {"Omega", t.Omega}, {"real", t.real}});
    j["tones"] = tones;
    j["seed"] = n.seed;
    return j;
}

SystemSpec system_from_json(const json& j)
{
    SystemSpec s;
    s.seed = j.value("seed", std::uint64_t{0});
    const json params = j.value("params", json::object());
    const SystemKind kind = system_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
    case SystemKind::delay: s.system = make_delay(params.value("delay", std::int64_t{1})); break;
    case SystemKind::cheb_bandpass:
        s.system = make_cheb_bandpass(params.value("length", std::int64_t{32}), params.value("stop_edge", kPi / 6.0));
        break;
    case SystemKind::halfband_butterworth:
        s.system = make_halfband_butterworth(params.value("n", std::int64_t{25}), params.value("leak", 1e-6));
        break;
    case SystemKind::halfband_complex: s.system = make_halfband_complex(params.value("n", std::int64_t{25})); break;
    case SystemKind::third_difference: s.system = make_third_difference(); break;
    case SystemKind::fir: {
        const auto& t = params.at("taps");
        Eigen::VectorXcd taps(static_cast<Eigen::Index>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i)
            taps[static_cast<Eigen::Index>(i)] = complex_from_json(t[i]);
        s.system = make_fir(taps);
        break;
    }
    case SystemKind::sigma_delta:
        s.system = make_sigma_delta(params.value("bits", 12), params.value("feedback_zeros", 5));
        break;
    }
    if (params.contains("reset_per_block"))
        s.system.reset_per_block = params["reset_per_block"].get<bool>();
    s.noise = noise_from_json(j.value("noise", json::object()), s.seed);
    return s;
}

Campaign campaign_from_json(const json& j)
{
    Campaign c;
    c.M = j.value("M", c.M);
    c.N = j.value("N", c.N);
    c.E = j.value("E", c.E);
    c.L = j.value("L", c.L);
    c.alpha = j.value("alpha", c.alpha);
    c.mode = system_mode_from_string(j.value("mode", std::string("complex")));
    c.psd_only = j.value("psd_only", false);
    c.figure = j.value("figure", c.figure);
    if (j.contains("excitation"))
        c.excitation = j["excitation"];
    if (j.contains("system"))
        c.system = system_from_json(j["system"]);
    else if (j.contains("noise"))
        c.system.noise = noise_from_json(j["noise"], j.value("seed", std::uint64_t{0}));
    c.window_path = j.value("window", std::string());
    c.fallback_seed = j.value("fallback_seed", std::uint64_t{0});
    return c;
}

WindowSequence campaign_window(const Campaign& c)
{
    if (c.window_path.empty())
        return design_window({c.M, c.N});
    WindowSequence w = window_from_json(read_json_file(c.window_path));
    if (w.spec.M != c.M)
        throw std::invalid_argument("window file M does not match the campaign M");
    return w;
}

MeasurementResult run_measurement(const Campaign& c, const WindowSequence& window, unsigned threads,
                                   std::uint64_t repetition)
{
    MeasurementConfig cfg;
    cfg.M = c.M;
    cfg.window = window;
    cfg.E = c.E;
    cfg.L_target = c.L;
    cfg.mode = c.mode;
    cfg.psd_only = c.psd_only;
    cfg.alpha = c.alpha;
    cfg.fallback_seed = c.fallback_seed;
    cfg.validate();

    NoiseSource noise = c.system.noise;
    noise.seed += repetition;
    MeasurementAccumulator acc;
    if (c.psd_only) {
        acc = run_noise_campaign(noise, window, c.L, threads);
    } else {
        const std::uint64_t seed = c.excitation.value("seed", std::uint64_t{0}) + repetition;
        const ExcitationPlan plan = make_plan(c.excitation.at("kind").get<std::string>(), c.M, c.L, seed,
                                              c.excitation.value("params", json::object()));
        acc = run_campaign(plan, c.system.system, noise, window, c.E, threads, c.fallback_seed);
    }
    return estimate(acc, cfg);
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + path);
}

} // namespace rkm::io
