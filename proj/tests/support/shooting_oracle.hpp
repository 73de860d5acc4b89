#pragma once

// Reference solutions of the Euler-Lagrange problem f'' = -m beta p |f|^(p-1)
// sign(f) by classical RK4 shooting. Only valid for p >= 1, where the right
// side is continuous at f = 0.

#include <cmath>
#include <functional>
#include <vector>

namespace bbm::testing {

struct Shot {
    std::vector<double> s, f, df;
    double K = 0.0;  // int of m beta |f|^p - f'^2/2 over the shot, by Simpson
};

inline Shot rk4_shoot(double m_beta, double p, double s0, double f0, double v0, int steps) {
    auto acc = [&](double f) { return -m_beta * p * std::pow(std::abs(f), p - 1.0) * (f < 0 ? -1.0 : 1.0); };
    const double h = (1.0 - s0) / steps;
    Shot shot;
    double f = f0, v = v0;
    for (int i = 0; i <= steps; ++i) {
        shot.s.push_back(s0 + i * h);
        shot.f.push_back(f);
        shot.df.push_back(v);
        if (i == steps) break;
        const double k1f = v, k1v = acc(f);
        const double k2f = v + 0.5 * h * k1v, k2v = acc(f + 0.5 * h * k1f);
        const double k3f = v + 0.5 * h * k2v, k3v = acc(f + 0.5 * h * k2f);
        const double k4f = v + h * k3v, k4v = acc(f + h * k3f);
        f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    if (steps % 2 == 0) {
        double sum = 0.0;
        for (int i = 0; i <= steps; ++i) {
            const double g = m_beta * std::pow(std::abs(shot.f[i]), p) - 0.5 * shot.df[i] * shot.df[i];
            sum += g * (i == 0 || i == steps ? 1.0 : (i % 2 ? 4.0 : 2.0));
        }
        shot.K = sum * h / 3.0;
    }
    return shot;
}

// Bisection for the root of an increasing function on [lo, hi].
inline double bisect_increasing(const std::function<double(double)>& g, double lo, double hi, int iterations = 200) {
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// h_z: shoot from the origin on the initial slope.
inline Shot shoot_unconstrained(double m_beta, double p, double z, int steps = 20000) {
    const double v = bisect_increasing(
        [&](double v0) { return rk4_shoot(m_beta, p, 0.0, 0.0, v0, 200).f.back() - z; }, -10.0, 10.0, 60);
    // Polish with the fine step around the coarse root.
    const double fine = bisect_increasing(
        [&](double v0) { return rk4_shoot(m_beta, p, 0.0, 0.0, v0, steps).f.back() - z; }, v - 0.05, v + 0.05, 60);
    return rk4_shoot(m_beta, p, 0.0, 0.0, fine, steps);
}

struct ConstrainedShot {
    double s_switch = 0.0;
    Shot tail;  // the Euler-Lagrange phase on [s_switch, 1]
};

// g_z: follow the frontier r(s) = (m beta s^2 (2-p)^2 / 2)^(1/(2-p)) up to
// s_switch, then shoot; bisect on s_switch.
inline ConstrainedShot shoot_constrained(double m_beta, double p, double z, int steps = 20000) {
    const double q = 2.0 / (2.0 - p);
    const double c = std::pow(m_beta * (2.0 - p) * (2.0 - p) / 2.0, 1.0 / (2.0 - p));
    auto start = [&](double s0, int n) { return rk4_shoot(m_beta, p, s0, c * std::pow(s0, q), c * q * std::pow(s0, q - 1.0), n); };
    ConstrainedShot out;
    out.s_switch = bisect_increasing([&](double s0) { return start(s0, steps).f.back() - z; }, 1e-9, 1.0, 60);
    out.tail = start(out.s_switch, steps);
    return out;
}

}  // namespace bbm::testing
