#include "rkm/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

using namespace rkm;
using rkm::io::json;

namespace {

/// Worker count: hardware concurrency capped by RKM_THREADS.
unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RKM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1)
            throw std::invalid_argument("RKM_THREADS must be a positive integer");
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Flags shared by several subcommands; unset values keep the file defaults.
struct CommonFlags {
    std::optional<std::int64_t> M, N, L, E;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::string out;
};

void add_common(CLI::App* app, CommonFlags& f, bool measurement)
{
    app->add_option("--M", f.M, "DFT length");
    app->add_option("--N", f.N, "window length factor");
    app->add_option("--L", f.L, "number of sub-measurements");
    if (measurement) {
        app->add_option("--E", f.E, "settling samples per sub-measurement");
        app->add_option("--alpha", f.alpha, "miss probability of the confidence regions");
    }
    app->add_option("--seed", f.seed, "random seed");
    app->add_option("--mode", f.mode, "complex or real")->check(CLI::IsMember({"complex", "real"}));
    app->add_option("--out", f.out, "output file");
}

void apply(io::Campaign& c, const CommonFlags& f)
{
    if (f.M)
        c.M = *f.M;
    if (f.N)
        c.N = *f.N;
    if (f.L)
        c.L = *f.L;
    if (f.E)
        c.E = *f.E;
    if (f.alpha)
        c.alpha = *f.alpha;
    if (f.mode)
        c.mode = system_mode_from_string(*f.mode);
    if (f.seed) {
        c.excitation["seed"] = *f.seed;
        c.system.noise.seed = *f.seed + 1;
    }
}

std::string with_extension(const std::string& path, const std::string& ext)
{
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    const std::string stem =
        (dot != std::string::npos && (slash == std::string::npos || dot > slash)) ? path.substr(0, dot) : path;
    return stem + ext;
}

void emit(const std::string& out, const std::string& text)
{
    if (out.empty())
        std::cout << text;
    else
        io::write_text_file(out, text);
}

void print_summary(const MeasurementResult& r)
{
    std::cerr << "M=" << r.M << " L=" << r.L << " mode=" << to_string(r.mode) << (r.psd_only ? " psd-only" : "")
              << " bins=" << r.bins.size() << "\n";
    if (r.possible_short_settling)
        std::cerr << "warning: the residual PSD follows |H|^2; the settling time E may be too short\n";
}

/// Writes the result as JSON to `out` and as CSV next to it.
void write_result(const MeasurementResult& r, const std::string& out, const std::string& figure, bool loglog)
{
    if (out.empty()) {
        std::cout << io::result_to_csv(r, figure, loglog);
        return;
    }
    io::write_text_file(with_extension(out, ".json"), io::result_to_json(r).dump(2) + "\n");
    io::write_text_file(with_extension(out, ".csv"), io::result_to_csv(r, figure, loglog));
}

/// Reads complex samples, one per line as "re" or "re,im"; '#' lines and a
/// non-numeric header are skipped.
Eigen::VectorXcd read_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::vector<cd> v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream s(line);
        double re = 0.0, im = 0.0;
        if (!(s >> re)) {
            if (v.empty())
                continue;
            throw std::invalid_argument("malformed sample line in " + path + ": " + line);
        }
        s >> im;
        v.emplace_back(re, im);
    }
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int cmd_window_design(const CommonFlags& f)
{
    const WindowSpec spec{f.M.value_or(64), f.N.value_or(4)};
    const WindowSequence w = design_window(spec);
    const WindowVerification v = verify_window(w);
    emit(f.out, io::window_to_json(w, &v).dump(2) + "\n");
    std::cerr << "window M=" << spec.M << " N=" << spec.N << " F=" << spec.F() << ": acf grid rms "
              << v.eps_2_20_rms << (v.passed() ? ", verified" : ", verification FAILED") << "\n";
    for (const auto& msg : v.failures)
        std::cerr << "  " << msg << "\n";
    return v.passed() ? 0 : 1;
}

int cmd_window_verify(const std::string& path)
{
    const WindowSequence w = io::window_from_json(io::read_json_file(path));
    const WindowVerification v = verify_window(w);
    std::cout << io::verification_to_json(v).dump(2) << "\n";
    if (v.passed()) {
        std::cerr << path << ": window verified\n";
        return 0;
    }
    for (const auto& msg : v.failures)
        std::cerr << path << ": " << msg << "\n";
    return 1;
}

int cmd_window_catalog(const CommonFlags& f, const std::string& kind, std::optional<double> param)
{
    const WindowSpec spec{f.M.value_or(64), f.N.value_or(4)};
    if (kind.empty()) {
        json list = json::array();
        for (CatalogKind k : catalog_kinds()) {
            try {
                const CatalogWindow w = catalog_window(k, std::numeric_limits<double>::quiet_NaN(), spec);
                json e = io::catalog_to_json(w);
                e.erase("f");
                list.push_back(e);
            } catch (const std::invalid_argument& e) {
                list.push_back({{"kind", to_string(k)}, {"M", spec.M}, {"N", spec.N}, {"error", e.what()}});
            }
        }
        emit(f.out, list.dump(2) + "\n");
        return 0;
    }
    const CatalogWindow w =
        catalog_window(catalog_kind_from_string(kind), param.value_or(std::numeric_limits<double>::quiet_NaN()), spec);
    emit(f.out, io::catalog_to_json(w).dump(2) + "\n");
    return 0;
}

struct SignalFlags {
    double variance = 1.0;
    bool complex_gaussian = false;
    double rho_re = 0.0, rho_im = 0.0;
    std::optional<double> magnitude, V_C, phi_max;
    double cr_max = 1.5;
    bool random_shift = false, random_rotation = false, fixed_sign = false;
    std::string csv;
    std::int64_t lambda = 0;
};

int cmd_signal(const std::string& kind, const CommonFlags& f, const SignalFlags& s)
{
    const std::int64_t M = f.M.value_or(64), L = f.L.value_or(10);
    const bool real = f.mode.value_or("complex") == "real";
    json p = json::object();
    if (kind == "gaussian") {
        p = {{"variance", s.variance}, {"complex", s.complex_gaussian}, {"rho", {s.rho_re, s.rho_im}}};
    } else if (kind == "multitone") {
        p["real"] = real;
        if (s.magnitude)
            p["magnitude"] = *s.magnitude;
    } else if (kind == "chirp") {
        p["random_shift"] = s.random_shift;
        if (s.V_C)
            p["V_C"] = *s.V_C;
    } else {
        p = {{"cr_max", s.cr_max}, {"random_sign", !s.fixed_sign}, {"random_rotation", s.random_rotation}};
        if (s.V_C)
            p["V_C"] = *s.V_C;
        if (s.phi_max)
            p["phi_max"] = *s.phi_max;
    }
    const ExcitationPlan plan = io::make_plan(kind, M, L, f.seed.value_or(1), p);
    emit(f.out, io::plan_to_json(plan).dump(2) + "\n");
    if (!s.csv.empty())
        io::write_text_file(s.csv, io::signal_to_csv(plan, s.lambda));
    double crest = 0.0;
    for (const auto& v : plan.time_signals)
        crest = std::max(crest, crest_factor(v));
    std::cerr << to_string(plan.kind) << " M=" << M << " L=" << L << " max crest factor " << crest << "\n";
    return 0;
}

io::Campaign load_campaign(const std::string& path, const CommonFlags& f)
{
    io::Campaign c = path.empty() ? io::Campaign{} : io::campaign_from_json(io::read_json_file(path));
    apply(c, f);
    return c;
}

int cmd_measure(const std::string& path, const CommonFlags& f, bool loglog)
{
    const io::Campaign c = load_campaign(path, f);
    const WindowSequence w = io::campaign_window(c);
    const MeasurementResult r = io::run_measurement(c, w, worker_count());
    print_summary(r);
    write_result(r, f.out, c.figure, loglog);
    return 0;
}

int cmd_psd(const std::string& samples, const std::string& noise_path, const CommonFlags& f, bool loglog,
            const std::string& figure)
{
    io::Campaign c;
    c.psd_only = true;
    c.E = 0;
    apply(c, f);
    const WindowSequence w = io::campaign_window(c);
    MeasurementResult r;
    if (!samples.empty()) {
        const Eigen::VectorXcd x = read_samples(samples);
        const std::int64_t F = w.spec.F();
        std::int64_t L = static_cast<std::int64_t>(x.size()) / F;
        if (f.L)
            L = std::min(L, *f.L);
        if (L < 1)
            throw std::invalid_argument("sample file is shorter than one window length");
        std::vector<Eigen::VectorXcd> records;
        for (std::int64_t l = 0; l < L; ++l)
            records.push_back(x.segment(l * F, F));
        r = run_psd_only(records, w, c.mode == SystemMode::real, c.alpha);
        r.window_id = "M=" + std::to_string(c.M) + ",N=" + std::to_string(c.N);
    } else if (!noise_path.empty()) {
        c.system.noise = io::noise_from_json(io::read_json_file(noise_path), f.seed.value_or(1));
        if (f.seed)
            c.system.noise.seed = *f.seed;
        r = io::run_measurement(c, w, worker_count());
    } else {
        throw std::invalid_argument("psd needs --samples or --noise");
    }
    print_summary(r);
    write_result(r, f.out, figure, loglog);
    return 0;
}

int cmd_calibrate(const std::string& path, const CommonFlags& f, std::int64_t reps)
{
    const io::Campaign c = load_campaign(path, f);
    if (reps < 1)
        throw std::invalid_argument("--reps must be positive");
    const WindowSequence w = io::campaign_window(c);
    const unsigned threads = worker_count();
    const bool score_H = !c.psd_only && c.system.system.is_linear();
    std::vector<double> miss_Phi, miss_H;
    std::vector<std::int64_t> mus;
    for (std::int64_t r = 0; r < reps; ++r) {
        const MeasurementResult res = io::run_measurement(c, w, threads, static_cast<std::uint64_t>(r));
        if (mus.empty()) {
            for (const auto& b : res.bins)
                mus.push_back(b.mu);
            miss_Phi.assign(mus.size(), 0.0);
            miss_H.assign(mus.size(), 0.0);
        }
        for (std::size_t i = 0; i < res.bins.size(); ++i) {
            const auto& b = res.bins[i];
            const double Om = 2.0 * kPi * static_cast<double>(b.mu) / static_cast<double>(c.M);
            if (!b.ci_Phi.contains(c.system.noise.windowed_psd(w.f, c.M, b.mu)))
                miss_Phi[i] += 1.0;
            if (score_H && !b.ci_H.contains(c.system.system.H(Om)))
                miss_H[i] += 1.0;
        }
    }
    json out;
    out["figure"] = c.figure;
    out["alpha"] = c.alpha;
    out["repetitions"] = reps;
    json bins = json::array();
    double mean = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        json e = {{"mu", mus[i]}, {"miss_Phi", miss_Phi[i] / static_cast<double>(reps)}};
        if (score_H)
            e["miss_H"] = miss_H[i] / static_cast<double>(reps);
        mean += miss_Phi[i] / static_cast<double>(reps);
        bins.push_back(e);
    }
    out["mean_miss_Phi"] = mus.empty() ? 0.0 : mean / static_cast<double>(mus.size());
    out["bins"] = bins;
    emit(f.out, out.dump(2) + "\n");
    std::cerr << "calibration over " << reps << " repetitions: mean Phi miss rate " << out["mean_miss_Phi"].get<double>()
              << " (alpha " << c.alpha << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-tone transfer and noise PSD measurement tool"};
    app.require_subcommand(1);

    auto* window = app.add_subcommand("window", "design, verify or list windows");
    window->require_subcommand(1);
    CommonFlags wd_flags, wc_flags;
    auto* wd = window->add_subcommand("design", "design a window and write it as JSON");
    add_common(wd, wd_flags, false);
    std::string verify_path;
    auto* wv = window->add_subcommand("verify", "check a window file");
    wv->add_option("file", verify_path, "window JSON")->required();
    auto* wc = window->add_subcommand("catalog", "classical windows and their feasibility");
    add_common(wc, wc_flags, false);
    std::string cat_kind;
    std::optional<double> cat_param;
    wc->add_option("--kind", cat_kind, "window name; omit to list all");
    wc->add_option("--param", cat_param, "shape parameter");

    auto* signal = app.add_subcommand("signal", "generate an excitation plan");
    signal->require_subcommand(1);
    CommonFlags sig_flags;
    SignalFlags sf;
    for (const char* kind : {"multitone", "chirp", "chirp-real", "gaussian"}) {
        auto* s = signal->add_subcommand(kind, std::string(kind) + " excitation");
        add_common(s, sig_flags, false);
        s->add_option("--csv", sf.csv, "write one time block as CSV");
        s->add_option("--lambda", sf.lambda, "block written by --csv");
        if (std::string(kind) == "gaussian") {
            s->add_option("--variance", sf.variance);
            s->add_flag("--complex", sf.complex_gaussian, "complex samples");
            s->add_option("--rho-re", sf.rho_re);
            s->add_option("--rho-im", sf.rho_im);
        } else if (std::string(kind) == "multitone") {
            s->add_option("--magnitude", sf.magnitude, "magnitude of every bin");
        } else {
            s->add_option("--VC", sf.V_C, "constant spectral magnitude");
            if (std::string(kind) == "chirp") {
                s->add_flag("--random-shift", sf.random_shift);
            } else {
                s->add_option("--cr-max", sf.cr_max, "crest factor bound");
                s->add_option("--phi-max", sf.phi_max, "phase hub");
                s->add_flag("--fixed-sign", sf.fixed_sign, "no random sign flips");
                s->add_flag("--random-rotation", sf.random_rotation);
            }
        }
    }

    CommonFlags m_flags, p_flags, c_flags;
    std::string campaign_path, calib_path, samples_path, noise_path, figure = "noise PSD";
    bool m_loglog = false, p_loglog = false;
    std::int64_t reps = 200;
    auto* measure = app.add_subcommand("measure", "run a measurement campaign");
    measure->add_option("campaign", campaign_path, "campaign JSON");
    add_common(measure, m_flags, true);
    measure->add_flag("--loglog", m_loglog, "add a log10(sin(Omega/2)) column");

    auto* psd = app.add_subcommand("psd", "PSD-only estimate from samples or a noise spec");
    add_common(psd, p_flags, true);
    psd->add_option("--samples", samples_path, "sample file, one 're[,im]' per line");
    psd->add_option("--noise", noise_path, "noise spec JSON");
    psd->add_option("--figure", figure, "figure name for the CSV header");
    psd->add_flag("--loglog", p_loglog, "add a log10(sin(Omega/2)) column");

    auto* calibrate = app.add_subcommand("calibrate", "per-bin miss rates of the confidence intervals");
    calibrate->add_option("campaign", calib_path, "campaign JSON")->required();
    add_common(calibrate, c_flags, true);
    calibrate->add_option("--reps", reps, "number of repeated campaigns");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*window) {
            if (*wd)
                return cmd_window_design(wd_flags);
            if (*wv)
                return cmd_window_verify(verify_path);
            return cmd_window_catalog(wc_flags, cat_kind, cat_param);
        }
        if (*signal)
            return cmd_signal(signal->get_subcommands().front()->get_name(), sig_flags, sf);
        if (*measure)
            return cmd_measure(campaign_path, m_flags, m_loglog);
        if (*psd)
            return cmd_psd(samples_path, noise_path, p_flags, p_loglog, figure);
        if (*calibrate)
            return cmd_calibrate(calib_path, c_flags, reps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
