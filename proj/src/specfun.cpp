#include "ivt/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivt/grid.hpp"

namespace ivt {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Ascending series around z = 0. Reliable up to |z| ~ 12 in double precision
// (beyond that the alternating terms cancel too violently).
Complex bessel_j_series(int n, Complex z) {
    if (z == Complex(0.0, 0.0)) return n == 0 ? Complex(1.0) : Complex(0.0);
    const Complex half = 0.5 * z;
    Complex term(1.0, 0.0);
    for (int k = 1; k <= n; ++k) term *= half / static_cast<double>(k);
    Complex sum = term;
    const Complex q = -half * half;
    for (int k = 1; k <= 120; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Hankel's large-argument expansion
//   J_n(z) = sqrt(2/(pi z)) (P cos w - Q sin w),  w = z - n pi/2 - pi/4,
// truncated at the smallest term. Returns false when the reachable accuracy
// is worse than ~1e-11 (term sequence bottoms out too early).
bool bessel_j_asymptotic(int n, Complex z, Complex& out) {
    const double mu = 4.0 * static_cast<double>(n) * static_cast<double>(n);
    Complex p(1.0, 0.0), q(0.0, 0.0);
    Complex t(1.0, 0.0);
    double prev = std::numeric_limits<double>::max();
    double reached = prev;
    for (int k = 1; k <= 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        t *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * z);
        const double mag = std::abs(t);
        if (mag >= prev) {
            reached = prev;
            break;
        }
        prev = mag;
        const int j = (k % 2 == 1) ? (k - 1) / 2 : k / 2;
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 1)
            q += sgn * t;
        else
            p += sgn * t;
        if (mag <= 1e-17) {
            reached = mag;
            break;
        }
        reached = mag;
    }
    if (reached > 1e-11) return false;
    const Complex omega = z - (0.5 * n + 0.25) * kPi;
    out = std::sqrt(2.0 / (kPi * z)) * (p * std::cos(omega) - q * std::sin(omega));
    return true;
}

// Miller's downward recurrence with even-order normalization
// J_0 + 2 sum_k J_{2k} = 1 (entire identity, valid for complex z).
void bessel_miller(int n_max, Complex z, std::span<Complex> out) {
    const double az = std::abs(z);
    const int turning = static_cast<int>(std::ceil(az));
    int start = std::max(n_max, turning);
    start += 16 + static_cast<int>(12.0 * std::cbrt(static_cast<double>(std::max(start, 1))));
    if (start % 2 == 1) ++start;

    const Complex two_over_z = 2.0 / z;
    Complex jp(0.0, 0.0);     // J_{k+1}
    Complex jc(1e-280, 0.0);  // J_k, arbitrary seed
    Complex norm(0.0, 0.0);
    const double big = 1e260;
    for (int k = start; k >= 1; --k) {
        const Complex jm = static_cast<double>(k) * two_over_z * jc - jp;  // J_{k-1}
        jp = jc;
        jc = jm;
        if (k - 1 <= n_max) out[k - 1] = jc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += jc;
        if (std::abs(jc.real()) > big || std::abs(jc.imag()) > big) {
            // rescale the state and everything recorded so far (orders >= k-1)
            const double s = 1e-260;
            jc *= s;
            jp *= s;
            norm *= s;
            for (int i = std::max(0, k - 1); i <= n_max; ++i) out[i] *= s;
        }
    }
    norm = 2.0 * norm + jc;  // jc now holds J_0
    for (int i = 0; i <= n_max; ++i) out[i] /= norm;
}

void bessel_upward(int n_max, Complex z, std::span<Complex> out) {
    Complex j0, j1;
    bool ok0 = bessel_j_asymptotic(0, z, j0);
    bool ok1 = bessel_j_asymptotic(1, z, j1);
    if (!ok0 || !ok1) {
        bessel_miller(n_max, z, out);
        return;
    }
    out[0] = j0;
    if (n_max >= 1) out[1] = j1;
    for (int k = 1; k < n_max; ++k)
        out[k + 1] = static_cast<double>(2 * k) / z * out[k] - out[k - 1];
}

}  // namespace

Complex bessel_j(int n, Complex z) {
    if (n < 0) throw ConfigError("bessel_j: order must be >= 0");
    const double az = std::abs(z);
    if (!std::isfinite(az) || az > 1e6) throw ConfigError("bessel_j: argument out of supported range");
    if (az <= 12.0) return bessel_j_series(n, z);
    if (az >= 35.0 && 2.0 * n * n <= az) {
        Complex v;
        if (bessel_j_asymptotic(n, z, v)) return v;
    }
    std::vector<Complex> buf(static_cast<size_t>(n) + 1);
    if (az >= 35.0 && static_cast<double>(n) <= 0.8 * az - 8.0)
        bessel_upward(n, z, buf);
    else
        bessel_miller(n, z, buf);
    return buf[n];
}

void bessel_jn(int n_max, Complex z, std::span<Complex> out) {
    if (n_max < 0) throw ConfigError("bessel_jn: order must be >= 0");
    if (out.size() < static_cast<size_t>(n_max) + 1) throw ConfigError("bessel_jn: output too small");
    const double az = std::abs(z);
    if (!std::isfinite(az) || az > 1e6) throw ConfigError("bessel_jn: argument out of supported range");
    if (az <= 1.0) {
        for (int n = 0; n <= n_max; ++n) out[n] = bessel_j_series(n, z);
        return;
    }
    if (az >= 35.0 && static_cast<double>(n_max) <= 0.8 * az - 8.0)
        bessel_upward(n_max, z, out);
    else
        bessel_miller(n_max, z, out);
}

Contour build_contour(double a, double M, int n_vertical, int n_horizontal) {
    if (a <= 0.0 || M <= 0.0) throw ConfigError("build_contour: a and M must be > 0");
    if (n_vertical < 2 || n_horizontal < 2) throw ConfigError("build_contour: need >= 2 nodes per segment");

    Contour c;
    c.a = a;
    c.M = M;
    c.n_vertical = n_vertical;
    c.n_horizontal = n_horizontal;
    c.nodes.reserve(n_vertical + n_horizontal);
    c.weights.reserve(n_vertical + n_horizontal);

    // Trapezoid weights; Gregory 3/8, 7/6, 23/24 endpoint correction once the
    // segment has enough nodes (restores exactness for quadratics).
    auto segment_weights = [](int n, double h) {
        std::vector<double> w(n, h);
        w.front() = w.back() = 0.5 * h;
        if (n >= 6) {
            w[0] = w[n - 1] = 3.0 / 8.0 * h;
            w[1] = w[n - 2] = 7.0 / 6.0 * h;
            w[2] = w[n - 3] = 23.0 / 24.0 * h;
        }
        return w;
    };

    const double hv = a / (n_vertical - 1);
    const auto wv = segment_weights(n_vertical, hv);
    for (int k = 0; k < n_vertical; ++k) {
        c.nodes.emplace_back(0.0, k * hv);
        c.weights.emplace_back(0.0, wv[k]);  // dz = i dt on the vertical leg
    }
    const double hh = M / (n_horizontal - 1);
    const auto wh = segment_weights(n_horizontal, hh);
    for (int k = 0; k < n_horizontal; ++k) {
        c.nodes.emplace_back(k * hh, a);
        c.weights.emplace_back(wh[k], 0.0);
    }
    return c;
}

double abel_weighted_integral(std::span<const double> h, double grid_max, double r) {
    if (r <= 0.0) throw ConfigError("abel_weighted_integral: r must be > 0");
    if (h.size() < 2 || grid_max <= 0.0) throw ConfigError("abel_weighted_integral: bad sample grid");
    const int n = static_cast<int>(h.size());
    const double dt = grid_max / (n - 1);
    auto interp = [&](double t) -> double {
        const double f = t / dt;
        int i = static_cast<int>(f);
        if (i >= n - 1) return h[n - 1];
        const double w = f - i;
        return (1.0 - w) * h[i] + w * h[i + 1];
    };
    // t = r sin(theta): integral becomes int_0^{pi/2} h(r sin theta) d theta
    const int covered = static_cast<int>(r / dt) + 1;
    const int m = std::max(32, 4 * covered);
    const double dth = 0.5 * kPi / m;
    double sum = 0.5 * (interp(0.0) + interp(std::min(r, grid_max)));
    for (int k = 1; k < m; ++k) sum += interp(r * std::sin(k * dth));
    return sum * dth;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

}  // namespace ivt
