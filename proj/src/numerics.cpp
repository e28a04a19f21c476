#include "rkm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rkm {

namespace {

std::mutex g_sink_mutex;
WarningSink g_sink;

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

/// Disjoint-set "next alive" links used by ordered_sum.
struct AliveLinks {
    std::vector<std::int64_t> parent;
    explicit AliveLinks(std::int64_t n) : parent(static_cast<std::size_t>(n + 2))
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int64_t find(std::int64_t i)
    {
        std::int64_t root = i;
        while (parent[root] != root) root = parent[root];
        while (parent[i] != root) {
            const std::int64_t next = parent[i];
            parent[i] = root;
            i = next;
        }
        return root;
    }
};

void fft_radix2(Eigen::VectorXcd& a, bool inverse)
{
    const Eigen::Index n = a.size();
    for (Eigen::Index i = 1, j = 0; i < n; ++i) {
        Eigen::Index bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // w[k] = exp(-j*2*pi*k/n) for k < n/2, exact-argument evaluation
    std::vector<cd> w(static_cast<std::size_t>(n / 2));
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        const double s = sin_pi_ratio(2 * k, n);
        w[k] = cd(cos_pi_ratio(2 * k, n), inverse ? s : -s);
    }
    for (Eigen::Index len = 2; len <= n; len <<= 1) {
        const Eigen::Index step = n / len;
        for (Eigen::Index i = 0; i < n; i += len) {
            for (Eigen::Index k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * w[k * step];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

Eigen::VectorXcd dft_direct(const Eigen::VectorXcd& x, bool inverse)
{
    const Eigen::Index n = x.size();
    std::vector<cd> w(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = sin_pi_ratio(2 * k, n);
        w[k] = cd(cos_pi_ratio(2 * k, n), inverse ? s : -s);
    }
    Eigen::VectorXcd out(n);
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        std::complex<long double> acc = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            const cd t = x[k] * w[static_cast<std::size_t>((mu * k) % n)];
            acc += std::complex<long double>(t.real(), t.imag());
        }
        out[mu] = cd(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    return out;
}

/// Giles' single-precision erfinv approximation, used as a starting point.
double erfinv_guess(double x, double one_minus_x_times_one_plus_x)
{
    double w = -std::log(one_minus_x_times_one_plus_x);
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * x;
}

} // namespace

void set_warning_sink(WarningSink sink)
{
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    g_sink = std::move(sink);
}

void warn(const std::string& message)
{
    std::lock_guard<std::mutex> lock(g_sink_mutex);
    if (g_sink)
        g_sink(message);
    else
        std::cerr << "warning: " << message << '\n';
}

double sin_pi_ratio(std::int64_t n, std::int64_t d)
{
    if (d <= 0) throw std::invalid_argument("sin_pi_ratio: denominator must be positive");
    std::int64_t m = floor_mod(n, 2 * d);
    double sign = 1.0;
    if (m >= d) {
        m -= d;
        sign = -1.0;
    }
    const std::int64_t r = std::min(m, d - m); // sin(pi*m/d) = sin(pi*(d-m)/d)
    if (4 * r <= d)
        return sign * static_cast<double>(std::sin(static_cast<long double>(r) * kPiL / static_cast<long double>(d)));
    // pi/2 - pi*r/d = pi*(d-2r)/(2d) with 0 <= d-2r < d/2
    return sign * static_cast<double>(
        std::cos(static_cast<long double>(d - 2 * r) * kPiL / static_cast<long double>(2 * d)));
}

double cos_pi_ratio(std::int64_t n, std::int64_t d)
{
    if (d <= 0) throw std::invalid_argument("cos_pi_ratio: denominator must be positive");
    return sin_pi_ratio(d - 2 * floor_mod(n, 2 * d), 2 * d);
}

TrigTables trig_tables(std::int64_t F)
{
    if (F < 1) throw std::invalid_argument("trig_tables: F must be >= 1");
    TrigTables t;
    t.sin.resize(2 * F);
    t.cos.resize(2 * F);
    for (std::int64_t k = 0; k < 2 * F; ++k) {
        t.sin[k] = sin_pi_ratio(k, F);
        t.cos[k] = cos_pi_ratio(k, F);
    }
    return t;
}

Eigen::VectorXcd fft(const Eigen::VectorXcd& x, bool inverse)
{
    const Eigen::Index n = x.size();
    if (n == 0) return x;
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag()))
            throw std::invalid_argument("fft: non-finite input");
    Eigen::VectorXcd out;
    if ((n & (n - 1)) == 0) {
        out = x;
        fft_radix2(out, inverse);
    } else {
        out = dft_direct(x, inverse);
    }
    if (inverse) out /= static_cast<double>(n);
    return out;
}

double ordered_sum(const Eigen::Ref<const Eigen::VectorXd>& terms)
{
    const std::int64_t n = terms.size();
    if (n == 0) return 0.0;
    std::vector<double> v(terms.data(), terms.data() + n);
    for (double t : v)
        if (!std::isfinite(t)) throw std::invalid_argument("ordered_sum: non-finite term");
    std::sort(v.begin(), v.end());

    // Indices are shifted by one so that 0 and n+1 act as sentinels.
    AliveLinks left(n), right(n);
    double s = 0.0;
    double comp = 0.0;
    for (std::int64_t step = 0; step < n; ++step) {
        const double target = -(s + comp);
        const std::int64_t pos = std::lower_bound(v.begin(), v.end(), target) - v.begin();
        const std::int64_t r = right.find(pos + 1) - 1; // first alive >= target, n if none
        const std::int64_t l = left.find(pos) - 1;      // last alive < target, -1 if none
        std::int64_t pick;
        if (l < 0)
            pick = r;
        else if (r >= n)
            pick = l;
        else
            pick = (v[r] - target < target - v[l]) ? r : l;
        double e;
        two_sum(s, v[pick], s, e);
        comp += e;
        left.parent[pick + 1] = pick;
        right.parent[pick + 1] = pick + 2;
    }
    return s + comp;
}

cd direct_dft_bin(const Eigen::Ref<const Eigen::VectorXd>& x, std::int64_t mu, std::int64_t M)
{
    if (M < 1) throw std::invalid_argument("direct_dft_bin: need M >= 1");
    return direct_dft_bin(x, mu, M, trig_tables(M));
}

cd direct_dft_bin(const Eigen::Ref<const Eigen::VectorXd>& x, std::int64_t mu, std::int64_t M,
                  const TrigTables& tables)
{
    if (M < 1 || mu < 0 || mu >= M) throw std::invalid_argument("direct_dft_bin: need 0 <= mu < M");
    if (tables.sin.size() != 2 * M) throw std::invalid_argument("direct_dft_bin: tables do not match M");
    const std::int64_t n = x.size();
    Eigen::VectorXd re(n), im(n);
    for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t idx = 2 * ((mu * (k % M)) % M); // angle pi*idx/M
        re[k] = x[k] * tables.cos[idx];
        im[k] = -x[k] * tables.sin[idx];
    }
    return {ordered_sum(re), ordered_sum(im)};
}

double erfc_inv(double y)
{
    if (!(y > 0.0 && y < 2.0)) throw std::invalid_argument("erfc_inv: argument must lie in (0, 2)");
    if (y > 1.5) return -erfc_inv(2.0 - y);
    const double two_over_sqrt_pi = 1.1283791670955126;
    double x = erfinv_guess(1.0 - y, y * (2.0 - y));
    if (y >= 0.5) {
        // erf(x) = 1 - y, where 1 - y is exact here
        const double g = 1.0 - y;
        if (g == 0.0) return 0.0;
        for (int it = 0; it < 8; ++it) {
            const double f = std::erf(x) - g;
            const double t = f / (two_over_sqrt_pi * std::exp(-x * x));
            const double dx = t / (1.0 + x * t);
            x -= dx;
            if (std::abs(dx) <= 1e-17 * std::abs(x)) break;
        }
        return x;
    }
    for (int it = 0; it < 50; ++it) {
        const double f = std::erfc(x) - y;
        const double t = f / (-two_over_sqrt_pi * std::exp(-x * x));
        const double dx = t / (1.0 + x * t);
        x -= dx;
        if (std::abs(dx) <= 1e-17 * std::abs(x)) break;
    }
    return x;
}

} // namespace rkm
