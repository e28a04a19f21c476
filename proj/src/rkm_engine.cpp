#include "rkm/rkm_engine.hpp"

#include "rkm/test_signals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rkm {

namespace {

using q = __float128;

QuadComplex qmul(cd a, cd b)
{
    return {q(a.real()) * q(b.real()) - q(a.imag()) * q(b.imag()),
            q(a.real()) * q(b.imag()) + q(a.imag()) * q(b.real())};
}

QuadComplex qmul(const QuadComplex& a, const QuadComplex& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

QuadComplex qconj(const QuadComplex& a) { return {a.re, -a.im}; }
QuadComplex qscale(const QuadComplex& a, q s) { return {a.re * s, a.im * s}; }
QuadComplex qsub(const QuadComplex& a, const QuadComplex& b) { return {a.re - b.re, a.im - b.im}; }
QuadComplex qadd(const QuadComplex& a, const QuadComplex& b) { return {a.re + b.re, a.im + b.im}; }
q qnorm(const QuadComplex& a) { return a.re * a.re + a.im * a.im; }
q qabs2(cd a) { return q(a.real()) * q(a.real()) + q(a.imag()) * q(a.imag()); }

std::int64_t neg_bin(std::int64_t mu, std::int64_t M) { return (M - mu) % M; }

bool special_bin(std::int64_t mu, std::int64_t M) { return mu == 0 || (M % 2 == 0 && mu == M / 2); }

void check_alpha(double alpha)
{
    if (!(alpha > 1e-4 && alpha < 0.9))
        throw std::invalid_argument("alpha must lie in (1e-4, 0.9)");
}

double clamp0(double x) { return x > 0.0 ? x : 0.0; }

ConfidenceRegion make_interval(cd center, double var, double alpha)
{
    ConfidenceRegion r;
    r.kind = ConfidenceRegion::Kind::interval;
    r.center = center;
    r.alpha = alpha;
    r.half_width = std::sqrt(2.0 * clamp0(var)) * erfc_inv(alpha);
    return r;
}

ConfidenceRegion make_ellipse(cd center, double var, cd cov, double alpha)
{
    ConfidenceRegion r;
    r.kind = ConfidenceRegion::Kind::ellipse;
    r.center = center;
    r.alpha = alpha;
    const double la = -std::log(alpha);
    const double ac = std::abs(cov);
    const cd rot = std::polar(1.0, 0.5 * std::arg(cov));
    r.A1 = std::sqrt(clamp0(la * (var + ac))) * rot;
    r.A2 = cd(0.0, 1.0) * std::sqrt(clamp0(la * (var - ac))) * rot;
    return r;
}

void warn_odd_M(MeasurementResult& r)
{
    if (r.M % 2 != 0) {
        std::string msg = "odd M: the two bins next to pi use the generic variance formulas";
        r.warnings.push_back(msg);
        warn(msg);
    }
}

} // namespace

std::string to_string(SystemMode mode) { return mode == SystemMode::complex ? "complex" : "real"; }

SystemMode system_mode_from_string(const std::string& name)
{
    if (name == "complex")
        return SystemMode::complex;
    if (name == "real")
        return SystemMode::real;
    throw std::invalid_argument("unknown system mode: " + name);
}

void MeasurementConfig::validate() const
{
    if (M < 2)
        throw std::invalid_argument("M must be at least 2");
    if (window.spec.M != M)
        throw std::invalid_argument("window M does not match the measurement M");
    if (window.f.size() != window.spec.F())
        throw std::invalid_argument("window length does not match N*M");
    if (E < 0)
        throw std::invalid_argument("settling time E must be nonnegative");
    check_alpha(alpha);
}

double fallback_sign(std::uint64_t seed, std::int64_t lambda)
{
    return (splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(lambda))) >> 63) ? 1.0 : -1.0;
}

MeasurementAccumulator::MeasurementAccumulator(std::int64_t M_, std::uint64_t seed)
    : M(M_), L(0), fallback_seed(seed), Cvv(M_, 0), Cyy(M_, 0), Cvvm(M_), Cyv(M_), Cyvm(M_), Cyym(M_), g(M_),
      Syw(M_)
{
    if (M_ < 1)
        throw std::invalid_argument("accumulator needs M >= 1");
}

void MeasurementAccumulator::accumulate(const Eigen::VectorXcd& V, const Eigen::VectorXcd& Yf, std::int64_t lambda)
{
    if (V.size() != M || Yf.size() != M)
        throw std::invalid_argument("spectrum length does not match accumulator M");
    const double w = fallback_sign(fallback_seed, lambda < 0 ? L : lambda);
    for (std::int64_t mu = 0; mu < M; ++mu) {
        const std::int64_t nm = neg_bin(mu, M);
        const cd v = V[mu], y = Yf[mu];
        Cvv[mu] += qabs2(v);
        Cyy[mu] += qabs2(y);
        Cvvm[mu] += qmul(v, V[nm]);
        Cyv[mu] += qmul(y, std::conj(v));
        Cyvm[mu] += qmul(y, V[nm]);
        Cyym[mu] += qmul(y, Yf[nm]);
        g[mu] += QuadComplex{q(v.real()) * q(w), -q(v.imag()) * q(w)};
        Syw[mu] += QuadComplex{q(y.real()) * q(w), q(y.imag()) * q(w)};
    }
    ++L;
}

void MeasurementAccumulator::accumulate_output(const Eigen::VectorXcd& Yf)
{
    if (Yf.size() != M)
        throw std::invalid_argument("spectrum length does not match accumulator M");
    for (std::int64_t mu = 0; mu < M; ++mu) {
        Cyy[mu] += qabs2(Yf[mu]);
        Cyym[mu] += qmul(Yf[mu], Yf[neg_bin(mu, M)]);
    }
    ++L;
}

void MeasurementAccumulator::merge(const MeasurementAccumulator& o)
{
    if (o.M != M)
        throw std::invalid_argument("cannot merge accumulators of different M");
    for (std::int64_t mu = 0; mu < M; ++mu) {
        Cvv[mu] += o.Cvv[mu];
        Cyy[mu] += o.Cyy[mu];
        Cvvm[mu] += o.Cvvm[mu];
        Cyv[mu] += o.Cyv[mu];
        Cyvm[mu] += o.Cyvm[mu];
        Cyym[mu] += o.Cyym[mu];
        g[mu] += o.g[mu];
        Syw[mu] += o.Syw[mu];
    }
    L += o.L;
}

double MeasurementAccumulator::C_vv(std::int64_t mu) const { return static_cast<double>(Cvv[mu] / q(L)); }
double MeasurementAccumulator::C_yy(std::int64_t mu) const { return static_cast<double>(Cyy[mu] / q(L)); }
cd MeasurementAccumulator::C_vvm(std::int64_t mu) const { return qscale(Cvvm[mu], 1 / q(L)).to_cd(); }
cd MeasurementAccumulator::C_yv(std::int64_t mu) const { return qscale(Cyv[mu], 1 / q(L)).to_cd(); }
cd MeasurementAccumulator::C_yvm(std::int64_t mu) const { return qscale(Cyvm[mu], 1 / q(L)).to_cd(); }
cd MeasurementAccumulator::C_yym(std::int64_t mu) const { return qscale(Cyym[mu], 1 / q(L)).to_cd(); }

void accumulate(MeasurementAccumulator& acc, const Eigen::VectorXcd& V, const Eigen::VectorXcd& Yf)
{
    acc.accumulate(V, Yf);
}

bool ConfidenceRegion::contains(cd value) const
{
    const cd d = value - center;
    if (kind == Kind::interval)
        return std::abs(d.real()) <= half_width && std::abs(d.imag()) <= 8.0 * kEps * std::abs(value);
    const double n1 = std::norm(A1), n2 = std::norm(A2);
    const double a = std::real(d * std::conj(A1));
    const double b = std::real(d * std::conj(A2));
    if (n1 == 0.0 && n2 == 0.0)
        return d == 0.0;
    if (n2 == 0.0) {
        // Segment along A1: the orthogonal component must vanish up to rounding.
        const double perp = std::imag(d * std::conj(A1));
        return std::abs(perp) <= 8.0 * kEps * std::abs(d) * std::sqrt(n1) && a * a <= n1 * n1;
    }
    if (n1 == 0.0) {
        const double perp = std::imag(d * std::conj(A2));
        return std::abs(perp) <= 8.0 * kEps * std::abs(d) * std::sqrt(n2) && b * b <= n2 * n2;
    }
    return a * a / (n1 * n1) + b * b / (n2 * n2) <= 1.0;
}

Eigen::VectorXcd fold_and_dft(const Eigen::VectorXcd& record, const Eigen::VectorXd& f, std::int64_t M)
{
    if (M < 1 || f.size() % M != 0)
        throw std::invalid_argument("window length is not a multiple of M");
    if (record.size() != f.size())
        throw std::invalid_argument("record length does not match window length");
    Eigen::VectorXcd folded = Eigen::VectorXcd::Zero(M);
    for (Eigen::Index k = 0; k < f.size(); ++k)
        folded[k % M] += f[k] * record[k];
    return fft(folded);
}

Eigen::VectorXcd fold_and_dft(const Eigen::VectorXcd& record, const WindowSequence& window)
{
    return fold_and_dft(record, window.f, window.spec.M);
}

Eigen::VectorXcd estimate_H(const MeasurementAccumulator& acc)
{
    Eigen::VectorXcd H(acc.M);
    for (std::int64_t mu = 0; mu < acc.M; ++mu) {
        if (acc.Cvv[mu] == 0)
            H[mu] = 0.0;
        else
            H[mu] = qscale(acc.Cyv[mu], 1 / acc.Cvv[mu]).to_cd();
    }
    return H;
}

TraceformValue projection_traceform(const MeasurementAccumulator& acc, std::int64_t mu)
{
    if (acc.L <= 2)
        throw std::invalid_argument("complex-mode residual estimates need L >= 3");
    if (mu < 0 || mu >= acc.M)
        throw std::out_of_range("bin index out of range");
    const std::int64_t nm = neg_bin(mu, acc.M);
    const q denom = q(acc.M) * q(acc.L - 2);
    const q p = acc.Cvv[mu], r = acc.Cvv[nm];
    const QuadComplex c = acc.Cvvm[mu];
    const QuadComplex a1 = acc.Cyv[mu], a2 = acc.Cyvm[mu];
    const QuadComplex b1 = acc.Cyvm[nm], b2 = acc.Cyv[nm];

    TraceformValue out;
    if (p == 0) {
        out.singular = true;
        out.condition = std::numeric_limits<double>::infinity();
        const q d0 = q(acc.M) * q(acc.L);
        out.Phi = clamp0(static_cast<double>(acc.Cyy[mu] / d0));
        out.Psi = qscale(acc.Cyym[mu], 1 / d0).to_cd();
        return out;
    }

    const q det = p * r - qnorm(c);
    {
        const double pd = static_cast<double>(p), rd = static_cast<double>(r), cn = std::abs(c.to_cd());
        const double half = 0.5 * (pd + rd);
        const double rad = std::sqrt(0.25 * (pd - rd) * (pd - rd) + cn * cn);
        const double lo = half - rad;
        out.condition = lo > 0.0 ? (half + rad) / lo : std::numeric_limits<double>::infinity();
    }

    QuadComplex Hc, Gc;
    q quad;
    QuadComplex corr;
    if (det > q(1e6) * q(kEps) * q(kEps) * p * r) {
        // Widely linear regression on [V(mu), V(-mu)^*].
        Hc = qscale(qsub(qscale(a1, r), qmul(qconj(c), a2)), 1 / det);
        Gc = qscale(qsub(qscale(a2, p), qmul(c, a1)), 1 / det);
        quad = (r * qnorm(a1) + p * qnorm(a2) - 2 * qmul(qmul(c, a1), qconj(a2)).re) / det;
        corr = qadd(qmul(Hc, b1), qmul(Gc, b2));
    } else {
        // Replace the second regressor by the deterministic +-1 sequence w.
        out.singular = true;
        const QuadComplex gg = acc.g[mu];
        const q Lq = q(acc.L);
        const QuadComplex s1 = acc.Syw[mu], s2 = acc.Syw[nm];
        const q det2 = p * Lq - qnorm(gg);
        if (det2 <= q(1e6) * q(kEps) * q(kEps) * p * Lq) {
            Hc = qscale(a1, 1 / p);
            quad = qnorm(a1) / p;
            corr = qmul(Hc, b1);
        } else {
            // Gram [[p, g], [g^*, L]] times [h, gamma] = [a1, s1].
            Hc = qscale(qsub(qscale(a1, Lq), qmul(gg, s1)), 1 / det2);
            Gc = qscale(qsub(qscale(s1, p), qmul(qconj(gg), a1)), 1 / det2);
            quad = (Lq * qnorm(a1) + p * qnorm(s1) - 2 * qmul(qmul(qconj(gg), a1), qconj(s1)).re) / det2;
            corr = qadd(qmul(Hc, b1), qmul(Gc, s2));
        }
    }
    out.Phi = clamp0(static_cast<double>((acc.Cyy[mu] - quad) / denom));
    out.Psi = qscale(qsub(acc.Cyym[mu], corr), 1 / denom).to_cd();
    return out;
}

void estimate_variances(const MeasurementAccumulator& acc, MeasurementResult& result)
{
    const std::int64_t M = result.M;
    const double L = static_cast<double>(result.L);
    if (result.psd_only) {
        if (result.L < 2) {
            const double inf = std::numeric_limits<double>::infinity();
            for (auto& b : result.bins)
                b.var_Phi = b.var_Psi = inf;
            return;
        }
        for (auto& b : result.bins) {
            const double P = b.Phi, P2 = P * P, S2 = std::norm(b.Psi);
            if (result.mode == SystemMode::real) {
                b.var_Phi = special_bin(b.mu, M) ? 2.0 * P2 / (L + 2.0) : P2 / (L + 1.0);
                b.var_Psi = b.var_Phi;
                b.cov_Psi = b.var_Phi;
            } else if (special_bin(b.mu, M)) {
                const double k = (L + 2.0) * (L - 1.0);
                b.var_Phi = (L - 2.0) / k * P2 + L / k * S2;
                b.var_Psi = 2.0 * L / k * P2 - 2.0 / k * S2;
                b.cov_Psi = 2.0 * b.Psi * b.Psi / (L + 2.0);
            } else {
                const double Pm = result.bins[neg_bin(b.mu, M)].Phi;
                b.var_Phi = P2 / (L + 1.0);
                b.var_Psi = L / ((L + 1.0) * (L - 1.0)) * Pm * P - S2 / ((L + 1.0) * (L - 1.0));
                b.cov_Psi = b.Psi * b.Psi / (L + 1.0);
            }
            b.var_Psi = clamp0(b.var_Psi);
        }
        return;
    }

    if (result.mode == SystemMode::real) {
        for (auto& b : result.bins) {
            const double cvv = static_cast<double>(acc.Cvv[b.mu]);
            b.var_H = cvv > 0.0 ? static_cast<double>(M) * b.Phi / cvv : std::numeric_limits<double>::infinity();
            b.var_Phi = special_bin(b.mu, M) ? 2.0 * b.Phi * b.Phi / (L + 1.0) : b.Phi * b.Phi / L;
            b.var_Psi = b.var_Phi;
            b.cov_Psi = b.var_Phi;
        }
        return;
    }

    if (result.L < 4)
        throw std::invalid_argument("complex-mode variance estimates need L >= 4");
    for (auto& b : result.bins) {
        const double p = static_cast<double>(acc.Cvv[b.mu]);
        b.var_H = p > 0.0 ? static_cast<double>(M) * b.Phi / p : std::numeric_limits<double>::infinity();
        const double P = b.Phi, P2 = P * P, S2 = std::norm(b.Psi);
        if (special_bin(b.mu, M)) {
            if (p > 0.0) {
                b.cov_H = static_cast<double>(M) * std::conj(acc.Cvvm[b.mu].to_cd()) * b.Psi / (p * p);
                b.has_cov_H = true;
            }
            const double k = L * (L - 3.0);
            b.var_Phi = (L - 4.0) / k * P2 + (L - 2.0) / k * S2;
            b.var_Psi = 2.0 * (L - 2.0) / k * P2 - 2.0 / k * S2;
            b.cov_Psi = (2.0 / L) * b.Psi * b.Psi;
        } else {
            const double Pm = result.bins[neg_bin(b.mu, M)].Phi;
            b.var_Phi = P2 / (L - 1.0);
            b.var_Psi = (L - 2.0) / ((L - 1.0) * (L - 3.0)) * Pm * P - S2 / ((L - 1.0) * (L - 3.0));
            b.cov_Psi = b.Psi * b.Psi / (L - 1.0);
        }
        b.var_Phi = clamp0(b.var_Phi);
        b.var_Psi = clamp0(b.var_Psi);
    }
}

double ellipse_scale(double alpha)
{
    check_alpha(alpha);
    return std::sqrt(-2.0 * std::log(alpha));
}

void confidence_regions(MeasurementResult& result, double alpha)
{
    check_alpha(alpha);
    result.alpha = alpha;
    const bool real = result.mode == SystemMode::real;
    for (auto& b : result.bins) {
        b.ci_Phi = make_interval(b.Phi, b.var_Phi, alpha);
        if (real)
            b.ci_Psi = b.ci_Phi;
        else
            b.ci_Psi = make_ellipse(b.Psi, b.var_Psi, b.cov_Psi, alpha);
        if (result.psd_only)
            continue;
        if (real && special_bin(b.mu, result.M))
            b.ci_H = make_interval(b.H, b.var_H, alpha);
        else
            b.ci_H = make_ellipse(b.H, b.var_H, b.has_cov_H ? b.cov_H : cd(0.0), alpha);
    }
}

MeasurementResult run_complex(const MeasurementAccumulator& acc, double alpha)
{
    check_alpha(alpha);
    if (acc.L < 4)
        throw std::invalid_argument("complex-mode measurement needs L >= 4");
    MeasurementResult res;
    res.M = acc.M;
    res.L = acc.L;
    res.mode = SystemMode::complex;
    res.alpha = alpha;
    warn_odd_M(res);
    const Eigen::VectorXcd H = estimate_H(acc);
    res.bins.resize(static_cast<std::size_t>(acc.M));
    std::int64_t n_singular = 0;
    for (std::int64_t mu = 0; mu < acc.M; ++mu) {
        BinResult& b = res.bins[mu];
        b.mu = mu;
        b.H = H[mu];
        const TraceformValue t = projection_traceform(acc, mu);
        b.Phi = t.Phi;
        b.Psi = t.Psi;
        b.condition = t.condition;
        b.singular = t.singular;
        n_singular += t.singular ? 1 : 0;
    }
    // Keep |Psi(mu)|^2 <= Phi(mu) Phi(-mu) against rounding.
    for (auto& b : res.bins) {
        const double bound = b.Phi * res.bins[neg_bin(b.mu, acc.M)].Phi;
        const double s2 = std::norm(b.Psi);
        if (s2 > bound)
            b.Psi *= bound > 0.0 ? std::sqrt(bound / s2) : 0.0;
    }
    if (n_singular > 0) {
        std::string msg = "singular excitation covariance at " + std::to_string(n_singular) +
                          " bin(s); used the deterministic fallback regressor";
        res.warnings.push_back(msg);
        warn(msg);
    }
    estimate_variances(acc, res);
    confidence_regions(res, alpha);
    if (short_settling_suspected(res)) {
        res.possible_short_settling = true;
        res.warnings.push_back("possible short settling: residual PSD follows |H|^2");
    }
    return res;
}

MeasurementResult run_real_variant(const MeasurementAccumulator& acc, double alpha)
{
    check_alpha(alpha);
    if (acc.L < 2)
        throw std::invalid_argument("real-mode measurement needs L >= 2");
    const std::int64_t M = acc.M;
    for (std::int64_t mu = 0; mu < M; ++mu) {
        const QuadComplex dv = qsub(acc.Cvvm[mu], {acc.Cvv[mu], 0});
        const QuadComplex dy = qsub(acc.Cyym[mu], {acc.Cyy[mu], 0});
        if (qnorm(dv) > q(1e-18) * acc.Cvv[mu] * acc.Cvv[mu] ||
            qnorm(dy) > q(1e-18) * acc.Cyy[mu] * acc.Cyy[mu])
            throw std::invalid_argument("real mode needs conjugate-symmetric spectra");
    }
    MeasurementResult res;
    res.M = M;
    res.L = acc.L;
    res.mode = SystemMode::real;
    res.alpha = alpha;
    warn_odd_M(res);
    const std::int64_t half = M / 2;
    res.bins.resize(static_cast<std::size_t>(half + 1));
    for (std::int64_t mu = 0; mu <= half; ++mu) {
        BinResult& b = res.bins[mu];
        b.mu = mu;
        const q p = acc.Cvv[mu];
        q resid;
        q trace;
        if (p == 0) {
            b.H = 0.0;
            b.singular = true;
            resid = acc.Cyy[mu];
            trace = q(acc.L);
        } else {
            b.H = qscale(acc.Cyv[mu], 1 / p).to_cd();
            if (special_bin(mu, M))
                b.H = b.H.real();
            resid = acc.Cyy[mu] - qnorm(acc.Cyv[mu]) / p;
            trace = q(acc.L - 1);
        }
        b.Phi = clamp0(static_cast<double>(resid / (q(M) * trace)));
        b.Psi = b.Phi;
    }
    estimate_variances(acc, res);
    confidence_regions(res, alpha);
    if (short_settling_suspected(res)) {
        res.possible_short_settling = true;
        res.warnings.push_back("possible short settling: residual PSD follows |H|^2");
    }
    return res;
}

MeasurementResult run_psd_only(const MeasurementAccumulator& acc, bool real_mode, double alpha)
{
    check_alpha(alpha);
    if (acc.L < 1)
        throw std::invalid_argument("PSD-only estimation needs L >= 1");
    const std::int64_t M = acc.M;
    MeasurementResult res;
    res.M = M;
    res.L = acc.L;
    res.mode = real_mode ? SystemMode::real : SystemMode::complex;
    res.psd_only = true;
    res.alpha = alpha;
    warn_odd_M(res);
    const std::int64_t nb = real_mode ? M / 2 + 1 : M;
    res.bins.resize(static_cast<std::size_t>(nb));
    const q denom = q(M) * q(acc.L);
    for (std::int64_t mu = 0; mu < nb; ++mu) {
        BinResult& b = res.bins[mu];
        b.mu = mu;
        b.Phi = clamp0(static_cast<double>(acc.Cyy[mu] / denom));
        b.Psi = real_mode ? cd(b.Phi) : qscale(acc.Cyym[mu], 1 / denom).to_cd();
    }
    estimate_variances(acc, res);
    if (acc.L >= 2)
        confidence_regions(res, alpha);
    return res;
}

MeasurementResult run_psd_only(const std::vector<Eigen::VectorXcd>& records, const WindowSequence& window,
                               bool real_mode, double alpha)
{
    MeasurementAccumulator acc(window.spec.M);
    for (const auto& r : records)
        acc.accumulate_output(fold_and_dft(r, window));
    return run_psd_only(acc, real_mode, alpha);
}

MeasurementResult estimate(const MeasurementAccumulator& acc, const MeasurementConfig& config)
{
    config.validate();
    if (acc.M != config.M)
        throw std::invalid_argument("accumulator M does not match the configuration");
    MeasurementResult res;
    if (config.psd_only)
        res = run_psd_only(acc, config.mode == SystemMode::real, config.alpha);
    else if (config.mode == SystemMode::real)
        res = run_real_variant(acc, config.alpha);
    else
        res = run_complex(acc, config.alpha);
    res.window_id = "M=" + std::to_string(config.window.spec.M) + ",N=" + std::to_string(config.window.spec.N);
    return res;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.size() < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

bool short_settling_suspected(const MeasurementResult& result, double threshold)
{
    if (result.psd_only)
        return false;
    std::vector<double> phi_db, h_db;
    for (const auto& b : result.bins) {
        const double h2 = std::norm(b.H);
        if (b.Phi > 0.0 && h2 > 0.0) {
            phi_db.push_back(10.0 * std::log10(b.Phi));
            h_db.push_back(10.0 * std::log10(h2));
        }
    }
    const double r = pearson(phi_db, h_db);
    return std::isfinite(r) && r > threshold;
}

} // namespace rkm
