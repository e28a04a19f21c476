#include "rkm/window_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rkm {

namespace {

constexpr std::int64_t kMaxCheckedN = 256;

void check_spec(const WindowSpec& spec)
{
    if (spec.M < 2) throw std::invalid_argument("window: M must be >= 2");
    if (spec.N < 1) throw std::invalid_argument("window: N must be >= 1");
}

/// Neumaier-compensated sum of f(i)*f(i+lag).
double lagged_product_sum(const RealSequence& f, std::int64_t lag)
{
    const std::int64_t F = f.size();
    double s = 0.0, comp = 0.0;
    for (std::int64_t i = 0; i + lag < F; ++i) {
        double e;
        two_sum(s, f[i] * f[i + lag], s, e);
        comp += e;
    }
    return s + comp;
}

double sqr(double x) { return x * x; }

/// f(k) = sum over nu of F_nu*exp(j*2*pi*nu*k/F) for a real window, accumulated
/// from nu = N-1 down to 1 before the constant term is added.
RealSequence synthesize_from_series(const WindowSpec& spec, const Eigen::VectorXcd& Fnu)
{
    const std::int64_t N = spec.N;
    const std::int64_t F = spec.F();
    const TrigTables tab = trig_tables(F);
    RealSequence f = RealSequence::Zero(F);
    for (std::int64_t nu = N - 1; nu >= 1; --nu) {
        const double re2 = 2.0 * Fnu[nu].real();
        const double im2 = 2.0 * Fnu[nu].imag();
        for (std::int64_t k = 0; k < F; ++k) {
            const std::int64_t idx = 2 * ((k * nu) % F); // angle 2*pi*k*nu/F
            f[k] += re2 * tab.cos[idx] - im2 * tab.sin[idx];
        }
    }
    f.array() += Fnu[0].real();
    return f;
}

} // namespace

double bilinear_c(const WindowSpec& spec)
{
    check_spec(spec);
    if (spec.N < 2) throw std::invalid_argument("bilinear_c: needs N >= 2 (N = 1 is the rectangle)");
    const double M = static_cast<double>(spec.M);
    const double N = static_cast<double>(spec.N);
    return 2.0 / (1.0 + std::pow(N / 2.0, M / 3.0 / (1.0 - M)) / std::tan(kPi / 2.0 / M));
}

std::int64_t cepstrum_fft_length(const WindowSpec& spec, int mantissa_bits)
{
    check_spec(spec);
    if (mantissa_bits < 24) throw std::invalid_argument("cepstrum_fft_length: mantissa_bits must be >= 24");
    const double M = static_cast<double>(spec.M);
    const double N = static_cast<double>(spec.N);
    const double bound = (mantissa_bits - 1) * std::pow(2.0, std::log(N / 3.0)) * std::pow(3.6, 1.0 / M);
    const int exponent = static_cast<int>(std::ceil(std::log2(bound)));
    return std::int64_t{1} << std::max(exponent, 2);
}

BilinearParams bilinear_params(const WindowSpec& spec)
{
    return {bilinear_c(spec), cepstrum_fft_length(spec)};
}

RealSequence magnitude_squared_coeffs(const WindowSpec& spec)
{
    check_spec(spec);
    const std::int64_t N = spec.N;
    const std::int64_t F = spec.F();
    if (N == 1) return RealSequence::Ones(1);

    // Overflow guard: every product below has N-1 inverse squared sines.
    double log_sum = 0.0;
    for (std::int64_t i = 5; i <= 4 * N; i += 2) log_sum += std::log(static_cast<double>(i));
    const double NF = std::exp(2.0 * std::log(8.0 / kPi * static_cast<double>(F)) - log_sum / static_cast<double>(N - 1));

    RealSequence out = RealSequence::Zero(N);
    // nu_1 and nu_2 run over half-integers for even N; a = 2*nu_1, b = 2*nu_2.
    for (std::int64_t a = 1 - N; a <= N - 1; a += 2) {
        for (std::int64_t nu = 0; nu < N; ++nu) {
            if (!(2 * nu < a + N && 2 * nu > a - N)) continue;
            double prod = 1.0;
            for (std::int64_t b = 1 - N; b <= N - 3; b += 2) {
                const std::int64_t s = (a + b) / 2;
                const std::int64_t nu3 = nu - s - (nu <= s ? 1 : 0);
                prod /= NF * sqr(sin_pi_ratio(nu3, F));
            }
            out[nu] += prod;
        }
    }
    return out;
}

RealSequence phase_coeffs(const WindowSpec& spec, const BilinearParams& params,
                          std::vector<std::string>* warnings)
{
    check_spec(spec);
    const std::int64_t N = spec.N;
    const std::int64_t F = spec.F();
    if (N < 2) throw std::invalid_argument("phase_coeffs: needs N >= 2");
    const double c = params.c;
    const std::int64_t Ms = params.M_tilde;
    if (!(c > 0.0 && c < 2.0)) throw std::invalid_argument("phase_coeffs: c must lie in (0, 2)");
    if (Ms < 4 || (Ms & (Ms - 1)) != 0) throw std::invalid_argument("phase_coeffs: M_tilde must be a power of two >= 4");

    const std::int64_t half = Ms / 2;
    Eigen::VectorXd F_eta = Eigen::VectorXd::Zero(half + 1);
    const double NF = 1.0 / (c * c + 4.0 * (1.0 - c) * sqr(sin_pi_ratio(N - 1, F)));
    Eigen::VectorXd cumprod(half + 1);
    for (std::int64_t a = 1 - N; a <= N - 1; a += 2) {
        cumprod.setOnes();
        auto factor = [&](std::int64_t nu2) {
            const double s1 = sin_pi_ratio(nu2, F);
            const double K = NF * (c * c + 4.0 * (1.0 - c) * s1 * s1);
            const double Psi = std::atan((1.0 - c) * sin_pi_ratio(2 * nu2, F) / (c + 2.0 * (1.0 - c) * s1 * s1));
            const long double shift = static_cast<long double>(kPi) * nu2 / F + Psi;
            for (std::int64_t eta = 0; eta <= half; ++eta) {
                const long double arg = static_cast<long double>(kPi) * eta / Ms - shift;
                cumprod[eta] *= K * sqr(static_cast<double>(std::sin(arg)));
            }
        };
        // nu_2 in [1-N, nu_1-(N+1)/2] and [nu_1+(N+1)/2, N-1]
        for (std::int64_t nu2 = 1 - N; nu2 <= (a - N - 1) / 2; ++nu2) factor(nu2);
        for (std::int64_t nu2 = (a + N + 1) / 2; nu2 <= N - 1; ++nu2) factor(nu2);
        F_eta += cumprod;
    }
    // Normalize so that max = 1/min before the logarithm.
    F_eta *= 1.0 / std::sqrt(F_eta.maxCoeff() * F_eta.minCoeff());
    const Eigen::VectorXd L_eta = F_eta.array().log().matrix();

    Eigen::VectorXcd spec_log(Ms);
    for (std::int64_t i = 0; i <= half; ++i) spec_log[i] = L_eta[i];
    for (std::int64_t i = 1; i < half; ++i) spec_log[Ms - i] = L_eta[i];
    const Eigen::VectorXcd ceps_c = ifft(spec_log);
    Eigen::VectorXd ceps(Ms);
    for (std::int64_t i = 0; i < Ms; ++i) {
        const std::int64_t mirror = (Ms - i) % Ms;
        ceps[i] = (ceps_c[i].real() + ceps_c[mirror].real()) / 2.0;
    }

    const std::int64_t tail_start = static_cast<std::int64_t>(std::ceil(0.9 * static_cast<double>(half)));
    double tail = 0.0;
    for (std::int64_t k = std::max<std::int64_t>(tail_start, 1); k < half; ++k) tail = std::max(tail, std::abs(ceps[k]));
    if (tail >= 64.0 * kEps) {
        std::ostringstream msg;
        msg << "cepstrum tail " << tail << " exceeds 64*eps for M=" << spec.M << ", N=" << N
            << " (M_tilde=" << Ms << "); a larger cepstrum length is recommended";
        if (warnings) warnings->push_back(msg.str());
        warn(msg.str());
    }

    RealSequence phi(N - 1);
    for (std::int64_t nu = 1; nu < N; ++nu) {
        const double Omega = 2.0 * kPi / static_cast<double>(F) * static_cast<double>(nu);
        const double s_half = sin_pi_ratio(nu, F);
        const double Omega_s = Omega + 2.0 * std::atan((1.0 - c) * sin_pi_ratio(2 * nu, F) / (c + 2.0 * (1.0 - c) * s_half * s_half));
        double acc = 0.0;
        for (std::int64_t k = half - 1; k >= 1; --k) acc += std::sin(Omega_s * static_cast<double>(k)) * ceps[k];
        phi[nu - 1] = acc - static_cast<double>(N - 1) * Omega_s / 2.0 + static_cast<double>(F - N) * Omega / 2.0;
    }
    return phi;
}

RealSequence synthesize_window(const WindowSpec& spec, const Eigen::VectorXcd& fourier_coeffs)
{
    check_spec(spec);
    if (fourier_coeffs.size() != spec.N) throw std::invalid_argument("synthesize_window: need N coefficients");
    return synthesize_from_series(spec, fourier_coeffs / static_cast<double>(spec.F()));
}

WindowSequence design_window(const WindowSpec& spec)
{
    check_spec(spec);
    WindowSequence w;
    w.spec = spec;
    const std::int64_t N = spec.N;
    const std::int64_t F = spec.F();
    if (N == 1) {
        w.f = RealSequence::Ones(F);
        w.fourier_coeffs = Eigen::VectorXcd::Constant(1, cd(static_cast<double>(spec.M), 0.0));
        return w;
    }
    if (N > kMaxCheckedN) {
        std::ostringstream msg;
        msg << "N=" << N << " exceeds " << kMaxCheckedN
            << "; the empirical bilinear and cepstrum-length constants are unverified there";
        w.warnings.push_back(msg.str());
        warn(msg.str());
    }
    const BilinearParams params = bilinear_params(spec);
    const RealSequence mag2 = magnitude_squared_coeffs(spec);
    const RealSequence phi = phase_coeffs(spec, params, &w.warnings);

    Eigen::VectorXcd Fnu(N);
    const double m0 = std::sqrt(mag2[0]);
    for (std::int64_t nu = 0; nu < N; ++nu) Fnu[nu] = std::sqrt(mag2[nu]) / (static_cast<double>(N) * m0);
    for (std::int64_t nu = 1; nu < N; ++nu) Fnu[nu] *= std::polar(1.0, -phi[nu - 1]);
    Fnu[0] = 1.0 / static_cast<double>(N);

    w.fourier_coeffs = Fnu * static_cast<double>(F);
    w.f = synthesize_from_series(spec, Fnu);
    return w;
}

WindowVerification verify_window(const WindowSequence& w)
{
    check_spec(w.spec);
    const std::int64_t M = w.spec.M;
    const std::int64_t N = w.spec.N;
    const std::int64_t F = w.spec.F();
    if (w.f.size() != F) throw std::invalid_argument("verify_window: f has wrong length");

    WindowVerification v;
    v.max_abs_f = w.f.cwiseAbs().maxCoeff();
    v.acf.resize(2 * F - 1);
    for (std::int64_t k = 0; k < F; ++k) {
        const double d = lagged_product_sum(w.f, k) / static_cast<double>(M);
        v.acf[F - 1 + k] = d;
        v.acf[F - 1 - k] = d;
    }
    v.acf_grid_errors.resize(2 * N - 1);
    double sq = 0.0, abs_sum = 0.0;
    for (std::int64_t kt = 1 - N; kt <= N - 1; ++kt) {
        const double e = v.acf[F - 1 + kt * M] - (kt == 0 ? 1.0 : 0.0);
        v.acf_grid_errors[kt + N - 1] = e;
        sq += e * e;
        abs_sum += std::abs(e);
    }
    v.eps_2_20_rms = std::sqrt(sq);

    const TrigTables tab = trig_tables(M);
    v.zero_grid_errors.resize(M - 1);
    for (std::int64_t mu = 1; mu < M; ++mu) v.zero_grid_errors[mu - 1] = std::abs(direct_dft_bin(w.f, mu, M, tab));
    v.dc_error = direct_dft_bin(w.f, 0, M, tab).real() - static_cast<double>(M);
    v.energy_error = lagged_product_sum(w.f, 0) / static_cast<double>(M) - 1.0;

    const double acf_bound = 100.0 * kEps * static_cast<double>(2 * N - 1);
    if (abs_sum > acf_bound) {
        std::ostringstream msg;
        msg << "ACF grid condition violated: the window autocorrelation d(k) must be 1 at k = 0 and vanish at every nonzero multiple of M; sum over k of |d(k*M) - [k == 0]| = " << abs_sum
            << " exceeds " << acf_bound;
        v.failures.push_back(msg.str());
    }
    const double zero_bound = 10.0 * std::sqrt(static_cast<double>(F)) * kEps * v.max_abs_f;
    const double zmax = M > 1 ? v.zero_grid_errors.maxCoeff() : 0.0;
    if (zmax > zero_bound) {
        std::ostringstream msg;
        msg << "zero condition violated: max |F(mu*2*pi/M)| = " << zmax << " exceeds " << zero_bound;
        v.failures.push_back(msg.str());
    }
    if (std::abs(v.dc_error) > zero_bound) {
        std::ostringstream msg;
        msg << "spectrum at Omega=0 deviates from M by " << v.dc_error;
        v.failures.push_back(msg.str());
    }
    if (std::abs(v.energy_error) > 1e-12) {
        std::ostringstream msg;
        msg << "window energy sum f^2 deviates from F/N by relative " << v.energy_error;
        v.failures.push_back(msg.str());
    }
    return v;
}

RealSequence halfband_coeffs(std::int64_t N)
{
    if (N < 1) throw std::invalid_argument("halfband_coeffs: N must be >= 1");
    const WindowSequence w = design_window({2, N});
    const std::int64_t F = w.spec.F();
    RealSequence d(2 * F - 1);
    for (std::int64_t k = 0; k < F; ++k) {
        const double v = lagged_product_sum(w.f, k) / 2.0;
        d[F - 1 + k] = v;
        d[F - 1 - k] = v;
    }
    return d;
}

cd window_dtft(const Eigen::Ref<const Eigen::VectorXd>& f, double Omega)
{
    long double re = 0, im = 0;
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        const long double a = static_cast<long double>(Omega) * k;
        re += f[k] * std::cos(a);
        im -= f[k] * std::sin(a);
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

double stopband_slope(const Eigen::Ref<const Eigen::VectorXd>& f, double Omega_min)
{
    const std::int64_t F = f.size();
    if (F < 2) throw std::invalid_argument("stopband_slope: window too short");
    const TrigTables tab = trig_tables(F);
    // |F(pi*m/F)| for m = 0 ... F
    Eigen::VectorXd mag(F + 1);
    for (std::int64_t m = 0; m <= F; ++m) {
        long double re = 0, im = 0;
        for (std::int64_t k = 0; k < F; ++k) {
            const std::int64_t idx = (m * k) % (2 * F);
            re += f[k] * tab.cos[idx];
            im -= f[k] * tab.sin[idx];
        }
        mag[m] = std::hypot(static_cast<double>(re), static_cast<double>(im));
    }
    std::vector<double> xs, ys;
    for (std::int64_t m = 1; m <= F; ++m) {
        const double Omega = kPi * static_cast<double>(m) / static_cast<double>(F);
        if (Omega <= Omega_min) continue;
        const bool left_ok = mag[m] >= mag[m - 1];
        const bool right_ok = m == F || mag[m] >= mag[m + 1];
        if (!(left_ok && right_ok) || mag[m] <= 0.0) continue;
        xs.push_back(std::log(sin_pi_ratio(m, 2 * F)));
        ys.push_back(std::log(mag[m]));
    }
    if (xs.size() < 2) throw std::runtime_error("stopband_slope: too few envelope samples");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------- catalog

namespace {

struct KindName {
    CatalogKind kind;
    const char* name;
};

const KindName kKindNames[] = {
    {CatalogKind::rectangle, "rectangle"},
    {CatalogKind::triangle, "triangle"},
    {CatalogKind::parzen, "parzen"},
    {CatalogKind::hamming, "hamming"},
    {CatalogKind::hann, "hann"},
    {CatalogKind::blackman, "blackman"},
    {CatalogKind::exact_blackman, "exact-blackman"},
    {CatalogKind::cosine, "cosine"},
    {CatalogKind::tukey, "tukey"},
    {CatalogKind::riesz, "riesz"},
    {CatalogKind::bohman, "bohman"},
    {CatalogKind::cos_rolloff, "cos-rolloff"},
    {CatalogKind::root_cos_rolloff, "root-cos-rolloff"},
    {CatalogKind::gauss, "gauss"},
    {CatalogKind::poisson, "poisson"},
    {CatalogKind::cauchy, "cauchy"},
    {CatalogKind::kaiser, "kaiser"},
    {CatalogKind::dolph, "dolph"},
};

/// Sum of c0 + 2*sum c_i*cos(2*pi*i*t) at t = (k - F/2)/F.
RealSequence cosine_series(std::int64_t F, const std::vector<double>& c)
{
    RealSequence f(F);
    for (std::int64_t k = 0; k < F; ++k) {
        double v = c[0];
        for (std::size_t i = 1; i < c.size(); ++i)
            v += 2.0 * c[i] * cos_pi_ratio(static_cast<std::int64_t>(i) * (2 * k - F), F);
        f[k] = v;
    }
    return f;
}

double chebyshev_T(std::int64_t n, double x)
{
    if (std::abs(x) <= 1.0) return std::cos(static_cast<double>(n) * std::acos(x));
    const double v = std::cosh(static_cast<double>(n) * std::acosh(std::abs(x)));
    return (x < 0.0 && (n % 2 != 0)) ? -v : v;
}

/// Raised-cosine spectrum with roll-off alpha at omega = pi * r.
double raised_cosine(double r, double alpha)
{
    r = std::abs(r);
    if (r <= 1.0 - alpha) return 1.0;
    if (r >= 1.0 + alpha) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (r - (1.0 - alpha)) / (2.0 * alpha)));
}

bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-9; }

} // namespace

const std::vector<CatalogKind>& catalog_kinds()
{
    static const std::vector<CatalogKind> kinds = [] {
        std::vector<CatalogKind> k;
        for (const auto& kn : kKindNames) k.push_back(kn.kind);
        return k;
    }();
    return kinds;
}

std::string to_string(CatalogKind kind)
{
    for (const auto& kn : kKindNames)
        if (kn.kind == kind) return kn.name;
    return "unknown";
}

CatalogKind catalog_kind_from_string(const std::string& name)
{
    for (const auto& kn : kKindNames)
        if (name == kn.name) return kn.kind;
    throw std::invalid_argument("unknown catalog window kind '" + name + "'");
}

double catalog_default_param(CatalogKind kind, const WindowSpec& spec)
{
    switch (kind) {
    case CatalogKind::tukey: return spec.N == 1 ? 0.0 : 1.0 / static_cast<double>(spec.N);
    case CatalogKind::cos_rolloff:
    case CatalogKind::root_cos_rolloff: return 0.5;
    case CatalogKind::gauss: return 64.0;
    case CatalogKind::poisson: return 8.0;
    case CatalogKind::cauchy: return 0.25;
    case CatalogKind::kaiser: return kPi * static_cast<double>(spec.N);
    case CatalogKind::dolph: return 2.0 * kPi / static_cast<double>(spec.M);
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

CatalogWindow catalog_window(CatalogKind kind, double param, const WindowSpec& spec)
{
    check_spec(spec);
    if (std::isnan(param)) param = catalog_default_param(kind, spec);
    const std::int64_t M = spec.M;
    const std::int64_t N = spec.N;
    const std::int64_t F = spec.F();
    const bool short_window = F <= M; // any window of length <= M has d(kM) = 0 for k != 0

    CatalogWindow cw;
    cw.kind = kind;
    cw.param = param;
    cw.spec = spec;
    CatalogFeasibility& fe = cw.feasibility;
    RealSequence f(F);
    auto t_at = [&](std::int64_t k) { return (static_cast<double>(k) - static_cast<double>(F) / 2.0) / static_cast<double>(F); };
    auto need_N = [&](std::int64_t n_min) {
        if (N < n_min) {
            std::ostringstream msg;
            msg << to_string(kind) << " needs N >= " << n_min << " so that its " << n_min
                << " cosine terms fit the F = N*M sampling grid";
            throw std::invalid_argument(msg.str());
        }
    };

    switch (kind) {
    case CatalogKind::rectangle:
        f.setOnes();
        fe = {true, short_window, 1, "zero condition for any N; power complement only for F <= M"};
        break;
    case CatalogKind::triangle:
        for (std::int64_t k = 0; k < F; ++k) {
            const double u = (static_cast<double>(k) - static_cast<double>(F) / 2.0) / (static_cast<double>(F) / 2.0);
            f[k] = std::max(0.0, 1.0 - std::abs(u));
        }
        fe = {N % 2 == 0, short_window, 2, "zero condition when the sampling rate is an integer multiple N/2 of M"};
        break;
    case CatalogKind::parzen:
        for (std::int64_t k = 0; k < F; ++k) {
            const double u = std::abs((static_cast<double>(k) - static_cast<double>(F) / 2.0) / (static_cast<double>(F) / 4.0));
            f[k] = u < 1.0 ? 1.0 - 0.75 * u * u * (2.0 - u) : (u < 2.0 ? 0.25 * std::pow(2.0 - u, 3) : 0.0);
        }
        fe = {N % 4 == 0, short_window, 4, "zero condition when the sampling rate is an integer multiple N/4 of M"};
        break;
    case CatalogKind::hamming:
        need_N(2);
        f = cosine_series(F, {0.54, 0.23});
        fe = {true, false, 1, "M-th band property of the ACF is not given"};
        break;
    case CatalogKind::hann:
        need_N(2);
        f = cosine_series(F, {1.0, 0.5});
        fe = {true, false, 3, "M-th band property of the ACF is not given"};
        break;
    case CatalogKind::blackman:
        need_N(3);
        f = cosine_series(F, {42.0, 25.0, 4.0});
        fe = {true, false, 3, "M-th band property of the ACF is not given"};
        break;
    case CatalogKind::exact_blackman:
        need_N(3);
        f = cosine_series(F, {7938.0, 4620.0, 715.0});
        fe = {true, false, 1, "M-th band property of the ACF is not given"};
        break;
    case CatalogKind::cosine:
        for (std::int64_t k = 0; k < F; ++k) f[k] = cos_pi_ratio(2 * k - F, 2 * F);
        fe = {false, short_window, 2, "spectral zeros at odd multiples of pi never align with the 2*pi/M grid"};
        break;
    case CatalogKind::tukey: {
        const double a = param;
        if (!(a >= 0.0 && a <= 0.5)) throw std::invalid_argument("tukey: alpha must lie in [0, 1/2]");
        for (std::int64_t k = 0; k < F; ++k) {
            const double at = std::abs(t_at(k));
            if (at <= 0.5 - a)
                f[k] = 2.0;
            else if (at < 0.5)
                f[k] = 1.0 - std::cos(kPi / (2.0 * a) * (1.0 - 2.0 * at));
            else
                f[k] = 0.0;
        }
        const double Nt = static_cast<double>(N) * (1.0 - a);
        fe = {near_integer(Nt) && Nt >= 1.0, short_window, a > 0.0 ? 3 : 1,
              "zero condition when F*(1-alpha) is an integer multiple of M"};
        break;
    }
    case CatalogKind::riesz:
        for (std::int64_t k = 0; k < F; ++k) {
            const double t = t_at(k);
            f[k] = 1.0 - 4.0 * t * t;
        }
        fe = {false, short_window, 2, "spectral zeros are not equidistant"};
        break;
    case CatalogKind::bohman:
        for (std::int64_t k = 0; k < F; ++k) {
            const double at = std::abs(t_at(k));
            f[k] = std::sin(2.0 * kPi * at) + kPi * (1.0 - 2.0 * at) * std::cos(2.0 * kPi * at);
        }
        fe = {false, short_window, 4, "ACF of the cosine half-wave; zeros cannot be aligned"};
        break;
    case CatalogKind::cos_rolloff:
    case CatalogKind::root_cos_rolloff: {
        const double a = param;
        if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("rolloff: alpha must lie in (0, 1]");
        const bool root = kind == CatalogKind::root_cos_rolloff;
        // Period N continuation, excerpt of length N sampled at rate M: a line
        // spectrum at multiples of 2*pi/F with at most 2N-1 lines.
        f.setZero();
        for (std::int64_t l = -N; l <= N; ++l) {
            double g = raised_cosine(2.0 * static_cast<double>(l) / static_cast<double>(N), a);
            if (root) g = std::sqrt(g);
            if (g == 0.0) continue;
            for (std::int64_t k = 0; k < F; ++k) f[k] += g * cos_pi_ratio(l * (2 * k - F), F);
        }
        const double aN = a * static_cast<double>(N);
        const bool odd_multiple = near_integer(aN) && std::llround(aN) % 2 == 1 && std::llround(aN) > 1;
        const int decay = root ? 1 : ((N % 2 == 0 || odd_multiple) ? 3 : 1);
        fe = {true, N == 1, decay, "periodic continuation with period N keeps the zero condition"};
        break;
    }
    case CatalogKind::gauss:
        if (!(param > 0.0)) throw std::invalid_argument("gauss: alpha must be positive");
        for (std::int64_t k = 0; k < F; ++k) {
            const double t = t_at(k);
            f[k] = std::exp(-param / 2.0 * t * t);
        }
        fe = {false, short_window, 1, "truncated Gaussian starts and ends with a jump"};
        break;
    case CatalogKind::poisson:
        if (!(param > 0.0)) throw std::invalid_argument("poisson: alpha must be positive");
        for (std::int64_t k = 0; k < F; ++k) f[k] = std::exp(-param * std::abs(t_at(k)));
        fe = {false, short_window, 1, "truncated exponential starts and ends with a jump"};
        break;
    case CatalogKind::cauchy:
        if (!(param > 0.0)) throw std::invalid_argument("cauchy: alpha must be positive");
        for (std::int64_t k = 0; k < F; ++k) {
            const double t = t_at(k);
            f[k] = 1.0 / (param * param + t * t);
        }
        fe = {false, short_window, 1, "truncated Cauchy window starts and ends with a jump"};
        break;
    case CatalogKind::kaiser:
        if (!(param >= 0.0)) throw std::invalid_argument("kaiser: alpha must be nonnegative");
        for (std::int64_t k = 0; k < F; ++k) {
            const double t = t_at(k);
            f[k] = std::cyl_bessel_i(0.0, param * std::sqrt(std::max(0.0, 1.0 - 4.0 * t * t)));
        }
        fe = {false, false, 1, "zeros are not equidistant; included for comparison only"};
        break;
    case CatalogKind::dolph: {
        if (!(param > 0.0 && param < kPi)) throw std::invalid_argument("dolph: stopband edge must lie in (0, pi)");
        const double x0 = 1.0 / std::cos(param / 2.0);
        Eigen::VectorXcd X(F);
        for (std::int64_t nu = 0; nu < F; ++nu) {
            const double T = chebyshev_T(F - 1, cos_pi_ratio(nu, F) * x0);
            X[nu] = T * cd(cos_pi_ratio((F - 1) * nu, F), -sin_pi_ratio((F - 1) * nu, F));
        }
        f = ifft(X).real();
        fe = {false, false, 0, "equiripple stopband; zeros are not equidistant; included for comparison only"};
        break;
    }
    }
    const double sum = f.sum();
    if (!(sum != 0.0) || !std::isfinite(sum)) throw std::invalid_argument("catalog window has zero or non-finite sum");
    cw.f = f * (static_cast<double>(M) / sum);
    return cw;
}

} // namespace rkm
