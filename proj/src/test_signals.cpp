#include "rkm/test_signals.hpp"

#include <cmath>
#include <stdexcept>

namespace rkm {

namespace {

void check_sizes(std::int64_t M, std::int64_t L)
{
    if (M < 1) throw std::invalid_argument("excitation: M must be >= 1");
    if (L < 1) throw std::invalid_argument("excitation: L must be >= 1");
}

/// Forces V(M - mu) = conj(V(mu)) and real values at mu = 0 and M/2.
void make_conjugate_symmetric(Eigen::VectorXcd& V)
{
    const std::int64_t M = V.size();
    V[0] = V[0].real();
    for (std::int64_t mu = 1; 2 * mu < M; ++mu) V[M - mu] = std::conj(V[mu]);
    if (M % 2 == 0) V[M / 2] = V[M / 2].real();
}

Eigen::VectorXcd time_block(const Eigen::VectorXcd& V, bool real)
{
    Eigen::VectorXcd v = ifft(V);
    if (real) v = v.real().cast<cd>();
    return v;
}

double uniform(std::mt19937_64& g, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

} // namespace

std::string to_string(ExcitationKind kind)
{
    switch (kind) {
    case ExcitationKind::gaussian: return "gaussian";
    case ExcitationKind::multitone: return "multitone";
    case ExcitationKind::chirp_complex: return "chirp";
    case ExcitationKind::chirp_real: return "chirp-real";
    }
    return "unknown";
}

ExcitationKind excitation_kind_from_string(const std::string& name)
{
    if (name == "gaussian") return ExcitationKind::gaussian;
    if (name == "multitone") return ExcitationKind::multitone;
    if (name == "chirp" || name == "chirp_complex") return ExcitationKind::chirp_complex;
    if (name == "chirp-real" || name == "chirp_real") return ExcitationKind::chirp_real;
    throw std::invalid_argument("unknown excitation kind '" + name + "'");
}

ChirpParams ChirpParams::from_crest(double V_C, double cr_max, bool random_sign, bool random_rotation)
{
    ChirpParams p;
    p.V_C = V_C;
    p.cr_max = cr_max;
    p.phi_max = 1.0 - 2.0 / (cr_max * cr_max);
    p.random_sign = random_sign;
    p.random_rotation = random_rotation;
    p.validate();
    return p;
}

void ChirpParams::validate() const
{
    if (!(cr_max > std::sqrt(2.0))) throw std::invalid_argument("chirp: cr_max must exceed sqrt(2)");
    if (!(phi_max >= 0.0 && phi_max < 1.0)) throw std::invalid_argument("chirp: phi_max must lie in [0, 1)");
    if (!(V_C > 0.0)) throw std::invalid_argument("chirp: V_C must be positive");
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 lambda_stream(std::uint64_t seed, std::uint64_t lambda)
{
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ lambda));
}

ExcitationPlan gen_multitone(std::int64_t M, std::int64_t L, const Eigen::VectorXd& magnitudes, std::uint64_t seed,
                             bool real_mode)
{
    check_sizes(M, L);
    if (magnitudes.size() != M) throw std::invalid_argument("multitone: need M magnitudes");
    if ((magnitudes.array() < 0.0).any()) throw std::invalid_argument("multitone: magnitudes must be nonnegative");
    if (real_mode) {
        if (M % 2 != 0) throw std::invalid_argument("multitone: real mode needs even M");
        for (std::int64_t mu = 1; mu < M; ++mu)
            if (magnitudes[mu] != magnitudes[M - mu])
                throw std::invalid_argument("multitone: real mode needs symmetric magnitudes");
    }
    ExcitationPlan plan;
    plan.kind = ExcitationKind::multitone;
    plan.M = M;
    plan.L = L;
    plan.seed = seed;
    plan.real = real_mode;
    plan.multitone = {magnitudes, real_mode};
    for (std::int64_t lam = 0; lam < L; ++lam) {
        std::mt19937_64 g = lambda_stream(seed, static_cast<std::uint64_t>(lam));
        Eigen::VectorXcd V(M);
        if (real_mode) {
            std::bernoulli_distribution coin(0.5);
            V[0] = coin(g) ? magnitudes[0] : -magnitudes[0];
            V[M / 2] = coin(g) ? magnitudes[M / 2] : -magnitudes[M / 2];
            for (std::int64_t mu = 1; mu < M / 2; ++mu) {
                V[mu] = std::polar(magnitudes[mu], uniform(g, -kPi, kPi));
                V[M - mu] = std::conj(V[mu]);
            }
        } else {
            for (std::int64_t mu = 0; mu < M; ++mu) V[mu] = std::polar(magnitudes[mu], uniform(g, -kPi, kPi));
        }
        plan.time_signals.push_back(time_block(V, real_mode));
        plan.spectra.push_back(std::move(V));
    }
    return plan;
}

Eigen::VectorXcd chirp_complex_base(std::int64_t M, double V_C)
{
    if (M < 2 || M % 2 != 0) throw std::invalid_argument("chirp: M must be even");
    Eigen::VectorXcd v(M);
    const double a = V_C / std::sqrt(static_cast<double>(M));
    for (std::int64_t k = 0; k < M; ++k) {
        const std::int64_t n = (k * k) % (2 * M); // angle pi*k^2/M
        v[k] = a * cd(cos_pi_ratio(n, M), sin_pi_ratio(n, M));
    }
    return v;
}

ExcitationPlan gen_chirp_complex(std::int64_t M, std::int64_t L, double V_C, std::uint64_t seed, bool random_shift)
{
    check_sizes(M, L);
    if (M % 2 != 0) throw std::invalid_argument("chirp: M must be even");
    ExcitationPlan plan;
    plan.kind = ExcitationKind::chirp_complex;
    plan.M = M;
    plan.L = L;
    plan.seed = seed;
    plan.chirp_complex = {V_C, random_shift};
    // DFT of the base chirp: V_C * exp(j*pi/4) * exp(-j*pi*mu^2/M)
    Eigen::VectorXcd base(M);
    const cd rot45(std::sqrt(0.5), std::sqrt(0.5));
    for (std::int64_t mu = 0; mu < M; ++mu) {
        const std::int64_t n = (mu * mu) % (2 * M);
        base[mu] = V_C * rot45 * cd(cos_pi_ratio(n, M), -sin_pi_ratio(n, M));
    }
    for (std::int64_t lam = 0; lam < L; ++lam) {
        std::mt19937_64 g = lambda_stream(seed, static_cast<std::uint64_t>(lam));
        const double phi = uniform(g, 0.0, 2.0 * kPi);
        const std::int64_t shift = random_shift ? std::uniform_int_distribution<std::int64_t>(0, M - 1)(g) : 0;
        plan.lambda_phase.push_back(phi);
        plan.lambda_shift.push_back(shift);
        Eigen::VectorXcd V(M);
        const cd r = std::polar(1.0, phi);
        for (std::int64_t mu = 0; mu < M; ++mu) {
            const std::int64_t n = 2 * ((mu * shift) % M); // exp(-j*2*pi*mu*shift/M)
            V[mu] = base[mu] * r * cd(cos_pi_ratio(n, M), -sin_pi_ratio(n, M));
        }
        plan.time_signals.push_back(time_block(V, false));
        plan.spectra.push_back(std::move(V));
    }
    return plan;
}

Eigen::VectorXcd chirp_real_spectrum(std::int64_t M, double V_C, double phi)
{
    if (M < 2 || M % 2 != 0) throw std::invalid_argument("real chirp: M must be even");
    Eigen::VectorXcd V(M);
    const double scale = phi * static_cast<double>(M) / kPi;
    for (std::int64_t m = 1 - M / 2; m <= M / 2; ++m) {
        const std::int64_t idx = (m + M) % M;
        // (2*pi/M)*m*|m| = pi * (2*m*|m|)/M, reduced on integers
        const std::int64_t n = 2 * m * std::abs(m);
        const cd quad(cos_pi_ratio(n, M), -sin_pi_ratio(n, M));
        V[idx] = V_C * quad * std::polar(1.0, -scale * sin_pi_ratio(2 * m, M));
    }
    make_conjugate_symmetric(V);
    return V;
}

ExcitationPlan gen_chirp_real(std::int64_t M, std::int64_t L, const ChirpParams& params, std::uint64_t seed)
{
    check_sizes(M, L);
    if (M % 2 != 0) throw std::invalid_argument("real chirp: M must be even");
    params.validate();
    ExcitationPlan plan;
    plan.kind = ExcitationKind::chirp_real;
    plan.M = M;
    plan.L = L;
    plan.seed = seed;
    plan.real = true;
    plan.chirp_real = params;
    for (std::int64_t lam = 0; lam < L; ++lam) {
        std::mt19937_64 g = lambda_stream(seed, static_cast<std::uint64_t>(lam));
        const double phi = uniform(g, 0.0, params.phi_max);
        const bool flip = params.random_sign && std::bernoulli_distribution(0.5)(g);
        const std::int64_t shift = params.random_rotation ? std::uniform_int_distribution<std::int64_t>(0, M - 1)(g) : 0;
        plan.lambda_phase.push_back(phi);
        plan.lambda_shift.push_back(shift);
        Eigen::VectorXcd V = chirp_real_spectrum(M, params.V_C, phi);
        if (flip) V = -V;
        if (shift != 0)
            for (std::int64_t mu = 0; mu < M; ++mu) {
                const std::int64_t n = 2 * ((mu * shift) % M);
                V[mu] *= cd(cos_pi_ratio(n, M), -sin_pi_ratio(n, M));
            }
        make_conjugate_symmetric(V);
        plan.time_signals.push_back(time_block(V, true));
        plan.spectra.push_back(std::move(V));
    }
    return plan;
}

ExcitationPlan gen_gaussian(std::int64_t M, std::int64_t L, double variance, bool complex_mode, cd rho,
                            std::uint64_t seed)
{
    check_sizes(M, L);
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian: variance must be positive");
    if (std::abs(rho) > 1.0 + 1e-15) throw std::invalid_argument("gaussian: |rho| must be <= 1");
    ExcitationPlan plan;
    plan.kind = ExcitationKind::gaussian;
    plan.M = M;
    plan.L = L;
    plan.seed = seed;
    plan.real = !complex_mode;
    plan.gaussian = {variance, complex_mode, rho};
    // Re/Im covariance [[sa2, c], [c, sb2]] giving E{|v|^2} = variance and E{v^2} = rho*variance.
    const double sa2 = variance * (1.0 + rho.real()) / 2.0;
    const double sb2 = variance * (1.0 - rho.real()) / 2.0;
    const double c = variance * rho.imag() / 2.0;
    const double sa = std::sqrt(std::max(sa2, 0.0));
    const double b1 = sa > 0.0 ? c / sa : 0.0;
    const double b2 = std::sqrt(std::max(sb2 - b1 * b1, 0.0));
    for (std::int64_t lam = 0; lam < L; ++lam) {
        std::mt19937_64 g = lambda_stream(seed, static_cast<std::uint64_t>(lam));
        std::normal_distribution<double> n01;
        Eigen::VectorXcd v(M);
        if (complex_mode) {
            for (std::int64_t k = 0; k < M; ++k) {
                const double z1 = n01(g);
                const double z2 = n01(g);
                v[k] = cd(sa * z1, b1 * z1 + b2 * z2);
            }
        } else {
            const double s = std::sqrt(variance);
            for (std::int64_t k = 0; k < M; ++k) v[k] = s * n01(g);
        }
        Eigen::VectorXcd V = fft(v);
        if (!complex_mode) make_conjugate_symmetric(V);
        plan.time_signals.push_back(std::move(v));
        plan.spectra.push_back(std::move(V));
    }
    return plan;
}

ExcitationPlan regenerate(const ExcitationPlan& r)
{
    switch (r.kind) {
    case ExcitationKind::multitone: return gen_multitone(r.M, r.L, r.multitone.magnitudes, r.seed, r.multitone.real_mode);
    case ExcitationKind::chirp_complex:
        return gen_chirp_complex(r.M, r.L, r.chirp_complex.V_C, r.seed, r.chirp_complex.random_shift);
    case ExcitationKind::chirp_real: return gen_chirp_real(r.M, r.L, r.chirp_real, r.seed);
    case ExcitationKind::gaussian:
        return gen_gaussian(r.M, r.L, r.gaussian.variance, r.gaussian.complex_mode, r.gaussian.rho, r.seed);
    }
    throw std::invalid_argument("regenerate: unknown kind");
}

double crest_factor(const Eigen::VectorXcd& v)
{
    if (v.size() == 0) throw std::invalid_argument("crest_factor: empty block");
    const double rms = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
    return v.cwiseAbs().maxCoeff() / rms;
}

Eigen::VectorXcd periodic_extend(const ExcitationPlan& plan, std::int64_t lambda, std::int64_t E, std::int64_t F)
{
    if (lambda < 0 || lambda >= static_cast<std::int64_t>(plan.time_signals.size()))
        throw std::invalid_argument("periodic_extend: lambda out of range");
    if (E < 0) throw std::invalid_argument("periodic_extend: E must be >= 0");
    if (F < plan.M || F % plan.M != 0) throw std::invalid_argument("periodic_extend: F must be a multiple of M");
    const Eigen::VectorXcd& base = plan.time_signals[static_cast<std::size_t>(lambda)];
    const std::int64_t M = plan.M;
    Eigen::VectorXcd out(E + F);
    for (std::int64_t i = 0; i < E + F; ++i) {
        const std::int64_t k = i - E;
        out[i] = base[((k % M) + M) % M];
    }
    return out;
}

} // namespace rkm
