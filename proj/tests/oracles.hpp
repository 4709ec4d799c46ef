// Test-side reference computations, kept independent of the library's own
// quadrature and integration paths.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// Composite Simpson rule, 2*halves panels.
inline double simpson_1d(const std::function<double(double)>& f, double lo, double hi,
                         int halves) {
    const int n = 2 * halves;
    const double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int k = 1; k < n; ++k) acc += f(lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline double simpson_2d(const std::function<double(double, double)>& f, double x0, double x1,
                         double y0, double y1, int halves) {
    return simpson_1d(
        [&](double y) {
            return simpson_1d([&](double x) { return f(x, y); }, x0, x1, halves);
        },
        y0, y1, halves);
}

// Central finite differences.
inline double fd_partial_x(const std::function<double(double, double)>& f, double x, double y,
                           double h = 1e-6) {
    return (f(x + h, y) - f(x - h, y)) / (2.0 * h);
}

inline double fd_partial_y(const std::function<double(double, double)>& f, double x, double y,
                           double h = 1e-6) {
    return (f(x, y + h) - f(x, y - h)) / (2.0 * h);
}

// Plain vector RK4 for dx/dt = A x, fixed step.
inline Eigen::VectorXd rk4_linear(const Eigen::MatrixXd& a, Eigen::VectorXd x, double t_final,
                                  double dt) {
    double t = 0.0;
    while (t < t_final - 1e-12) {
        const double h = std::min(dt, t_final - t);
        const Eigen::VectorXd k1 = a * x;
        const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = a * (x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return x;
}

// Largest real part over the spectrum, via the dense eigensolver.
inline double max_real_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> eig(m);
    double worst = -1e300;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
        worst = std::max(worst, eig.eigenvalues()(k).real());
    return worst;
}

} // namespace oracles
