#include "rkm/sim_systems.hpp"

#include "rkm/test_signals.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace rkm {

namespace {

double binomial(std::int64_t n, std::int64_t k)
{
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::int64_t i = 1; i <= k; ++i)
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(r);
}

/// sum c(i) exp(-j Omega i).
cd dtft(const Eigen::VectorXcd& c, double Omega)
{
    cd s = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i)
        s += c[i] * std::polar(1.0, -Omega * static_cast<double>(i));
    return s;
}

cd coef(const Eigen::VectorXcd& c, Eigen::Index i) { return (i >= 0 && i < c.size()) ? c[i] : cd(0.0); }

constexpr std::uint64_t kNoiseSalt = 0x6e6f6973652d7273ULL;

} // namespace

std::string to_string(SystemKind kind)
{
    switch (kind) {
    case SystemKind::delay: return "delay";
    case SystemKind::cheb_bandpass: return "cheb-bandpass";
    case SystemKind::halfband_butterworth: return "halfband-butterworth";
    case SystemKind::halfband_complex: return "halfband-complex";
    case SystemKind::third_difference: return "third-difference";
    case SystemKind::fir: return "fir";
    case SystemKind::sigma_delta: return "sigma-delta";
    }
    return "unknown";
}

SystemKind system_kind_from_string(const std::string& name)
{
    for (SystemKind k : {SystemKind::delay, SystemKind::cheb_bandpass, SystemKind::halfband_butterworth,
                         SystemKind::halfband_complex, SystemKind::third_difference, SystemKind::fir,
                         SystemKind::sigma_delta})
        if (to_string(k) == name)
            return k;
    throw std::invalid_argument("unknown system kind: " + name);
}

void SimSystem::reset()
{
    if (kind == SystemKind::sigma_delta) {
        error_history_ = Eigen::VectorXd::Zero(feedback.size());
    } else {
        history_ = Eigen::VectorXcd::Zero(std::max<Eigen::Index>(taps.size() - 1, 0));
    }
}

Eigen::VectorXcd SimSystem::process(const Eigen::VectorXcd& input)
{
    const Eigen::Index n = input.size();
    Eigen::VectorXcd out(n);
    if (kind == SystemKind::sigma_delta) {
        if (error_history_.size() != feedback.size() || reset_per_block)
            error_history_ = Eigen::VectorXd::Zero(feedback.size());
        const Eigen::Index K = feedback.size();
        const double top = std::floor(1.0 / Q);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (input[k].imag() != 0.0)
                throw std::invalid_argument("sigma-delta loop takes real input");
            double u = input[k].real();
            // error_history_[i] holds e(k - 1 - i).
            for (Eigen::Index i = 0; i < K; ++i)
                u += feedback[i] * error_history_[i];
            if (u > 1.0 || u < -1.0) {
                ++clamped_;
                if (!clamp_warned_) {
                    warn("sigma-delta quantizer input beyond +-1 was clamped");
                    clamp_warned_ = true;
                }
                u = std::clamp(u, -1.0, 1.0);
            }
            const double level = std::clamp(std::nearbyint(u / Q), -top, top);
            const double y = level * Q;
            for (Eigen::Index i = K - 1; i > 0; --i)
                error_history_[i] = error_history_[i - 1];
            if (K > 0)
                error_history_[0] = y - u;
            out[k] = y;
        }
        return out;
    }
    const Eigen::Index T = taps.size();
    if (history_.size() != std::max<Eigen::Index>(T - 1, 0) || reset_per_block)
        history_ = Eigen::VectorXcd::Zero(std::max<Eigen::Index>(T - 1, 0));
    // history_[i] holds x(-1 - i) relative to the block start.
    for (Eigen::Index k = 0; k < n; ++k) {
        cd s = 0.0;
        for (Eigen::Index i = 0; i < T; ++i) {
            const Eigen::Index src = k - i;
            const cd x = src >= 0 ? input[src] : history_[-1 - src];
            s += taps[i] * x;
        }
        out[k] = s;
    }
    if (T > 1) {
        Eigen::VectorXcd next(T - 1);
        for (Eigen::Index i = 0; i < T - 1; ++i) {
            const Eigen::Index src = n - 1 - i;
            next[i] = src >= 0 ? input[src] : history_[-1 - src];
        }
        history_ = next;
    }
    return out;
}

cd SimSystem::H(double Omega) const
{
    if (kind == SystemKind::sigma_delta)
        return 1.0;
    return dtft(taps, Omega);
}

SimSystem make_fir(const Eigen::VectorXcd& taps)
{
    if (taps.size() < 1)
        throw std::invalid_argument("FIR needs at least one tap");
    SimSystem s;
    s.kind = SystemKind::fir;
    s.taps = taps;
    s.reset();
    return s;
}

SimSystem make_delay(std::int64_t delay)
{
    if (delay < 0)
        throw std::invalid_argument("delay must be nonnegative");
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(delay + 1);
    t[delay] = 1.0;
    SimSystem s = make_fir(t);
    s.kind = SystemKind::delay;
    return s;
}

SimSystem make_cheb_bandpass(std::int64_t length, double stop_edge)
{
    const CatalogWindow w = catalog_window(CatalogKind::dolph, stop_edge, WindowSpec{length, 1});
    const double sum = w.f.sum();
    Eigen::VectorXcd t(length);
    const cd jk[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
    for (std::int64_t k = 0; k < length; ++k)
        t[k] = w.f[k] / sum * jk[k % 4];
    SimSystem s = make_fir(t);
    s.kind = SystemKind::cheb_bandpass;
    return s;
}

SimSystem make_halfband_butterworth(std::int64_t n, double leak)
{
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("halfband order n must be odd");
    const double c0 = binomial(n, (n - 1) / 2) * static_cast<double>(n + 1) * std::ldexp(1.0, -(2 * static_cast<int>(n) + 1));
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * n + 1);
    for (std::int64_t k = 0; k <= 2 * n; k += 2) {
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        t[k] = c0 * binomial(n, k / 2) * sign / static_cast<double>(n - k);
    }
    t[n] = 0.5 + leak;
    SimSystem s = make_fir(t);
    s.kind = SystemKind::halfband_butterworth;
    return s;
}

SimSystem make_halfband_complex(std::int64_t n)
{
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("halfband order n must be odd");
    const double c0 = binomial(n, (n - 1) / 2) * static_cast<double>(n + 1) * std::ldexp(1.0, -(2 * static_cast<int>(n) + 1));
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * n + 1);
    for (std::int64_t k = 0; k <= 2 * n; k += 2)
        t[k] = cd(0.0, c0 * binomial(n, k / 2) / static_cast<double>(k - n));
    t[n] = 0.5;
    SimSystem s = make_fir(t);
    s.kind = SystemKind::halfband_complex;
    return s;
}

SimSystem make_third_difference()
{
    Eigen::VectorXcd t(4);
    t << -1.0, 3.0, -3.0, 1.0;
    SimSystem s = make_fir(t);
    s.kind = SystemKind::third_difference;
    return s;
}

Eigen::VectorXd sigma_delta_noise_transfer(int feedback_zeros)
{
    if (feedback_zeros != 1 && feedback_zeros != 3 && feedback_zeros != 5)
        throw std::invalid_argument("sigma-delta supports 1, 3 or 5 feedback zeros");
    // Polynomial in z^-1, built factor by factor.
    std::vector<double> p = {1.0, -1.0};
    auto mul = [&p](const std::vector<double>& f) {
        std::vector<double> r(p.size() + f.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < f.size(); ++j)
                r[i + j] += p[i] * f[j];
        p = r;
    };
    if (feedback_zeros >= 3)
        mul({1.0, -2.0 * std::cos(0.246), 1.0});
    if (feedback_zeros >= 5)
        mul({1.0, -2.0 * std::cos(0.4), 1.0});
    return Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

double sigma_delta_noise_psd(double Omega, int bits, int feedback_zeros)
{
    const Eigen::VectorXd c = sigma_delta_noise_transfer(feedback_zeros);
    const double Q = 2.0 / (std::ldexp(1.0, bits) - 1.0);
    return Q * Q / 12.0 * std::norm(dtft(c.cast<cd>(), Omega));
}

SimSystem make_sigma_delta(int bits, int feedback_zeros)
{
    if (bits < 2 || bits > 52)
        throw std::invalid_argument("sigma-delta word length must lie in [2, 52]");
    SimSystem s;
    s.kind = SystemKind::sigma_delta;
    s.bits = bits;
    s.Q = 2.0 / (std::ldexp(1.0, bits) - 1.0);
    const Eigen::VectorXd c = sigma_delta_noise_transfer(feedback_zeros);
    s.feedback = c.tail(c.size() - 1);
    s.reset_per_block = false;
    s.reset();
    return s;
}

std::string to_string(NoiseKind kind)
{
    switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::white_gaussian: return "white";
    case NoiseKind::filtered_gaussian: return "filtered";
    case NoiseKind::tone_random_phase: return "tone";
    case NoiseKind::composite: return "composite";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name)
{
    for (NoiseKind k : {NoiseKind::none, NoiseKind::white_gaussian, NoiseKind::filtered_gaussian,
                        NoiseKind::tone_random_phase, NoiseKind::composite})
        if (to_string(k) == name)
            return k;
    throw std::invalid_argument("unknown noise kind: " + name);
}

void NoiseSource::coefficient_sets(Eigen::VectorXcd& a, Eigen::VectorXcd& b) const
{
    a = filter;
    if (add_delayed_conjugate) {
        b = Eigen::VectorXcd::Zero(filter.size() + 1);
        b.tail(filter.size()) = filter.conjugate();
    } else {
        b.resize(0);
    }
}

bool NoiseSource::is_real() const
{
    if (sigma_im != 0.0 || filter.imag().cwiseAbs().maxCoeff() != 0.0)
        return false;
    for (const auto& t : tones)
        if (!t.real)
            return false;
    return true;
}

Eigen::VectorXcd NoiseSource::generate(std::int64_t n, std::uint64_t lambda) const
{
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    std::mt19937_64 g = lambda_stream(splitmix64(seed ^ kNoiseSalt), lambda);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    if (sigma_re != 0.0 || sigma_im != 0.0) {
        Eigen::VectorXcd a, b;
        coefficient_sets(a, b);
        const Eigen::Index pre = std::max(a.size(), b.size()) - 1;
        Eigen::VectorXcd e(n + pre);
        for (Eigen::Index i = 0; i < e.size(); ++i) {
            const double re = sigma_re * gauss(g);
            const double im = sigma_im != 0.0 ? sigma_im * gauss(g) : 0.0;
            e[i] = cd(re, im);
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            cd s = 0.0;
            for (Eigen::Index i = 0; i < a.size(); ++i)
                s += a[i] * e[k + pre - i];
            for (Eigen::Index i = 0; i < b.size(); ++i)
                s += b[i] * std::conj(e[k + pre - i]);
            out[k] = s;
        }
    }
    for (const auto& t : tones) {
        const double phi = unif(g);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double arg = t.Omega * static_cast<double>(k) + phi;
            out[k] += t.real ? cd(t.amplitude * std::cos(arg)) : std::polar(t.amplitude, arg);
        }
    }
    return out;
}

double NoiseSource::psd(double Omega) const
{
    const double s = sigma_re * sigma_re + sigma_im * sigma_im;
    const double t = sigma_re * sigma_re - sigma_im * sigma_im;
    Eigen::VectorXcd a, b;
    coefficient_sets(a, b);
    const cd A = dtft(a, Omega), B = dtft(b, Omega);
    return s * (std::norm(A) + std::norm(B)) + 2.0 * std::real(t * A * std::conj(B));
}

cd NoiseSource::mpsd(double Omega) const
{
    const double s = sigma_re * sigma_re + sigma_im * sigma_im;
    const double t = sigma_re * sigma_re - sigma_im * sigma_im;
    Eigen::VectorXcd a, b;
    coefficient_sets(a, b);
    const cd Ap = dtft(a, Omega), Am = dtft(a, -Omega), Bp = dtft(b, Omega), Bm = dtft(b, -Omega);
    return t * Ap * Am + s * (Ap * Bm + Bp * Am) + t * Bp * Bm;
}

std::vector<ToneLine> NoiseSource::tone_lines() const
{
    std::vector<ToneLine> lines;
    for (const auto& t : tones) {
        const double A2 = t.amplitude * t.amplitude;
        if (t.real) {
            lines.push_back({t.Omega, kPi * A2 / 2.0});
            lines.push_back({-t.Omega, kPi * A2 / 2.0});
        } else {
            lines.push_back({t.Omega, 2.0 * kPi * A2});
        }
    }
    return lines;
}

double NoiseSource::power() const
{
    double p = 0.0;
    if (sigma_re != 0.0 || sigma_im != 0.0) {
        const double s = sigma_re * sigma_re + sigma_im * sigma_im;
        const double t = sigma_re * sigma_re - sigma_im * sigma_im;
        Eigen::VectorXcd a, b;
        coefficient_sets(a, b);
        const Eigen::Index K = std::max(a.size(), b.size());
        cd r0 = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
            r0 += s * (std::norm(coef(a, i)) + std::norm(coef(b, i))) +
                  2.0 * t * std::real(coef(a, i) * std::conj(coef(b, i)));
        p += r0.real();
    }
    for (const auto& t : tones)
        p += t.real ? t.amplitude * t.amplitude / 2.0 : t.amplitude * t.amplitude;
    return p;
}

Eigen::VectorXd window_acf(const Eigen::VectorXd& f, std::int64_t M, std::int64_t max_lag)
{
    Eigen::VectorXd d = Eigen::VectorXd::Zero(max_lag + 1);
    const Eigen::Index F = f.size();
    for (std::int64_t kap = 0; kap <= max_lag && kap < F; ++kap) {
        long double s = 0.0L;
        for (Eigen::Index k = 0; k + kap < F; ++k)
            s += static_cast<long double>(f[k]) * f[k + kap];
        d[kap] = static_cast<double>(s / static_cast<long double>(M));
    }
    return d;
}

double NoiseSource::windowed_psd(const Eigen::VectorXd& f, std::int64_t M, std::int64_t mu) const
{
    const double Om = 2.0 * kPi * static_cast<double>(mu) / static_cast<double>(M);
    double out = 0.0;
    if (sigma_re != 0.0 || sigma_im != 0.0) {
        const double s = sigma_re * sigma_re + sigma_im * sigma_im;
        const double t = sigma_re * sigma_re - sigma_im * sigma_im;
        Eigen::VectorXcd a, b;
        coefficient_sets(a, b);
        const Eigen::Index K = std::max(a.size(), b.size());
        const Eigen::VectorXd d = window_acf(f, M, K - 1);
        cd acc = 0.0;
        for (Eigen::Index kap = -(K - 1); kap <= K - 1; ++kap) {
            cd r = 0.0;
            for (Eigen::Index i = 0; i < K; ++i) {
                const Eigen::Index l = i - kap;
                r += s * coef(a, i) * std::conj(coef(a, l)) + t * coef(a, i) * std::conj(coef(b, l)) +
                     t * coef(b, i) * std::conj(coef(a, l)) + s * coef(b, i) * std::conj(coef(b, l));
            }
            acc += r * d[std::abs(kap)] * std::polar(1.0, -Om * static_cast<double>(kap));
        }
        out += acc.real();
    }
    for (const auto& t : tones) {
        const double A2 = t.amplitude * t.amplitude;
        const double Md = static_cast<double>(M);
        if (t.real)
            out += A2 / 4.0 * (std::norm(window_dtft(f, Om - t.Omega)) + std::norm(window_dtft(f, Om + t.Omega))) / Md;
        else
            out += A2 * std::norm(window_dtft(f, Om - t.Omega)) / Md;
    }
    return out;
}

cd NoiseSource::windowed_mpsd(const Eigen::VectorXd& f, std::int64_t M, std::int64_t mu) const
{
    const double Om = 2.0 * kPi * static_cast<double>(mu) / static_cast<double>(M);
    cd out = 0.0;
    if (sigma_re != 0.0 || sigma_im != 0.0) {
        const double s = sigma_re * sigma_re + sigma_im * sigma_im;
        const double t = sigma_re * sigma_re - sigma_im * sigma_im;
        Eigen::VectorXcd a, b;
        coefficient_sets(a, b);
        const Eigen::Index K = std::max(a.size(), b.size());
        const Eigen::VectorXd d = window_acf(f, M, K - 1);
        for (Eigen::Index kap = -(K - 1); kap <= K - 1; ++kap) {
            cd p = 0.0;
            for (Eigen::Index i = 0; i < K; ++i) {
                const Eigen::Index l = i - kap;
                p += t * coef(a, i) * coef(a, l) + s * coef(a, i) * coef(b, l) + s * coef(b, i) * coef(a, l) +
                     t * coef(b, i) * coef(b, l);
            }
            out += p * d[std::abs(kap)] * std::polar(1.0, -Om * static_cast<double>(kap));
        }
    }
    for (const auto& t : tones) {
        if (!t.real)
            continue;
        const double A2 = t.amplitude * t.amplitude;
        out += A2 / 4.0 * (std::norm(window_dtft(f, Om - t.Omega)) + std::norm(window_dtft(f, Om + t.Omega))) /
               static_cast<double>(M);
    }
    return out;
}

NoiseSource make_white_noise(double sigma_re, double sigma_im, std::uint64_t seed)
{
    if (sigma_re < 0.0 || sigma_im < 0.0)
        throw std::invalid_argument("noise deviations must be nonnegative");
    NoiseSource n;
    n.kind = NoiseKind::white_gaussian;
    n.sigma_re = sigma_re;
    n.sigma_im = sigma_im;
    n.seed = seed;
    return n;
}

NoiseSource make_filtered_noise(const Eigen::VectorXcd& taps, double sigma_re, double sigma_im, std::uint64_t seed)
{
    if (taps.size() < 1)
        throw std::invalid_argument("noise filter needs at least one tap");
    NoiseSource n = make_white_noise(sigma_re, sigma_im, seed);
    n.kind = NoiseKind::filtered_gaussian;
    n.filter = taps;
    return n;
}

NoiseSource make_tone_noise(double amplitude, double Omega, bool real, std::uint64_t seed)
{
    NoiseSource n;
    n.kind = NoiseKind::tone_random_phase;
    n.tones.push_back({amplitude, Omega, real});
    n.seed = seed;
    return n;
}

NoiseSource make_composite_noise(double sigma, double tone_amplitude, double tone_Omega, std::uint64_t seed)
{
    NoiseSource n = make_white_noise(sigma, sigma, seed);
    n.kind = NoiseKind::composite;
    n.add_delayed_conjugate = true;
    if (tone_amplitude != 0.0)
        n.tones.push_back({tone_amplitude, tone_Omega, false});
    return n;
}

} // namespace rkm

namespace rkm {

namespace {

void run_range(const ExcitationPlan& plan, SimSystem& system, const NoiseSource& noise, const WindowSequence& window,
               std::int64_t E, std::int64_t begin, std::int64_t end, MeasurementAccumulator& acc)
{
    const std::int64_t F = window.spec.F();
    for (std::int64_t lam = begin; lam < end; ++lam) {
        const Eigen::VectorXcd x = periodic_extend(plan, lam, E, F);
        Eigen::VectorXcd y = system.process(x);
        if (noise.kind != NoiseKind::none)
            y += noise.generate(E + F, static_cast<std::uint64_t>(lam));
        acc.accumulate(plan.spectra[lam], fold_and_dft(y.tail(F), window), lam);
    }
}

template <class Work>
MeasurementAccumulator split_work(std::int64_t M, std::int64_t L, unsigned threads, std::uint64_t fallback_seed,
                                  Work work)
{
    const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(L, 1))));
    std::vector<MeasurementAccumulator> parts(T, MeasurementAccumulator(M, fallback_seed));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(T);
    for (unsigned t = 0; t < T; ++t) {
        const std::int64_t b = L * t / T, e = L * (t + 1) / T;
        auto job = [&, t, b, e] {
            try {
                work(b, e, parts[t]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        };
        if (T == 1)
            job();
        else
            pool.emplace_back(job);
    }
    for (auto& th : pool)
        th.join();
    for (auto& err : errors)
        if (err)
            std::rethrow_exception(err);
    MeasurementAccumulator acc = parts[0];
    for (unsigned t = 1; t < T; ++t)
        acc.merge(parts[t]);
    return acc;
}

} // namespace

MeasurementAccumulator run_campaign(const ExcitationPlan& plan, const SimSystem& system, const NoiseSource& noise,
                                    const WindowSequence& window, std::int64_t E, unsigned threads,
                                    std::uint64_t fallback_seed)
{
    if (plan.M != window.spec.M)
        throw std::invalid_argument("excitation M does not match window M");
    if (!system.reset_per_block) {
        SimSystem copy = system;
        return run_campaign_sequential(plan, copy, noise, window, E, fallback_seed);
    }
    return split_work(plan.M, plan.L, threads, fallback_seed,
                      [&](std::int64_t b, std::int64_t e, MeasurementAccumulator& acc) {
                          SimSystem local = system;
                          run_range(plan, local, noise, window, E, b, e, acc);
                      });
}

MeasurementAccumulator run_campaign_sequential(const ExcitationPlan& plan, SimSystem& system, const NoiseSource& noise,
                                               const WindowSequence& window, std::int64_t E,
                                               std::uint64_t fallback_seed)
{
    if (plan.M != window.spec.M)
        throw std::invalid_argument("excitation M does not match window M");
    MeasurementAccumulator acc(plan.M, fallback_seed);
    run_range(plan, system, noise, window, E, 0, plan.L, acc);
    return acc;
}

MeasurementAccumulator run_noise_campaign(const NoiseSource& noise, const WindowSequence& window, std::int64_t L,
                                          unsigned threads)
{
    const std::int64_t F = window.spec.F();
    return split_work(window.spec.M, L, threads, 0,
                      [&](std::int64_t b, std::int64_t e, MeasurementAccumulator& acc) {
                          for (std::int64_t lam = b; lam < e; ++lam)
                              acc.accumulate_output(
                                  fold_and_dft(noise.generate(F, static_cast<std::uint64_t>(lam)), window));
                      });
}

} // namespace rkm
