#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace fanocqed::detail {

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.
// Deriv: void(double t, const std::array<double,N>& y, std::array<double,N>& dy).
template <std::size_t N, typename Deriv>
class Rk45 {
public:
    using State = std::array<double, N>;

    Rk45(Deriv deriv, double rtol, double atol)
        : deriv_(std::move(deriv)), rtol_(rtol), atol_(atol) {}

    // Advance y from t0 to t1, hitting t1 exactly.
    void integrate(State& y, double t0, double t1) {
        if (t1 <= t0) return;
        double t = t0;
        double h = initial_step(y, t0, t1);
        std::size_t rejected_in_a_row = 0;
        while (t < t1) {
            h = std::min(h, t1 - t);
            State y_new, err;
            step(y, t, h, y_new, err);
            const double scale = error_norm(y, y_new, err);
            if (scale <= 1.0) {
                t += h;
                y = y_new;
                ++steps_;
                rejected_in_a_row = 0;
                h *= std::clamp(0.9 * std::pow(std::max(scale, 1e-10), -0.2),
                                1.0, 5.0);
            } else {
                ++rejected_in_a_row;
                if (rejected_in_a_row > 60)
                    throw std::runtime_error(
                        "rk45: step size control failed to converge");
                h *= std::clamp(0.9 * std::pow(scale, -0.2), 0.1, 0.9);
            }
            if (!(h > 0.0) || t + h == t)
                throw std::runtime_error("rk45: step size underflow");
        }
    }

    std::size_t steps() const { return steps_; }

private:
    double initial_step(const State& y, double t0, double t1) const {
        State dy{};
        deriv_(t0, y, dy);
        double ynorm = atol_, dynorm = atol_;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            dynorm = std::max(dynorm, std::abs(dy[i]));
        }
        const double h = 0.01 * ynorm / dynorm;
        return std::clamp(h, 1e-14 * (t1 - t0), 0.1 * (t1 - t0));
    }

    void step(const State& y, double t, double h, State& y5, State& err) const {
        State k1, k2, k3, k4, k5, k6, k7, tmp;
        deriv_(t, y, k1);
        axpy(tmp, y, h, {1.0 / 5}, {&k1});
        deriv_(t + h / 5, tmp, k2);
        axpy(tmp, y, h, {3.0 / 40, 9.0 / 40}, {&k1, &k2});
        deriv_(t + 3 * h / 10, tmp, k3);
        axpy(tmp, y, h, {44.0 / 45, -56.0 / 15, 32.0 / 9}, {&k1, &k2, &k3});
        deriv_(t + 4 * h / 5, tmp, k4);
        axpy(tmp, y, h,
             {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
             {&k1, &k2, &k3, &k4});
        deriv_(t + 8 * h / 9, tmp, k5);
        axpy(tmp, y, h,
             {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
              -5103.0 / 18656},
             {&k1, &k2, &k3, &k4, &k5});
        deriv_(t + h, tmp, k6);
        axpy(y5, y, h,
             {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
              11.0 / 84},
             {&k1, &k2, &k3, &k4, &k5, &k6});
        deriv_(t + h, y5, k7);
        // difference between 5th and embedded 4th order solutions
        static constexpr std::array<double, 7> e{
            35.0 / 384 - 5179.0 / 57600,   0.0,
            500.0 / 1113 - 7571.0 / 16695, 125.0 / 192 - 393.0 / 640,
            -2187.0 / 6784 + 92097.0 / 339200,
            11.0 / 84 - 187.0 / 2100,      -1.0 / 40};
        const std::array<const State*, 7> ks{&k1, &k2, &k3, &k4,
                                             &k5, &k6, &k7};
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 7; ++j) s += e[j] * (*ks[j])[i];
            err[i] = h * s;
        }
    }

    static void axpy(State& out, const State& y, double h,
                     std::initializer_list<double> coeffs,
                     std::initializer_list<const State*> ks) {
        out = y;
        auto c = coeffs.begin();
        auto k = ks.begin();
        for (; c != coeffs.end(); ++c, ++k)
            for (std::size_t i = 0; i < N; ++i) out[i] += h * (*c) * (**k)[i];
    }

    double error_norm(const State& y, const State& y_new,
                      const State& err) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc =
                atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = err[i] / sc;
            acc += r * r;
        }
        return std::sqrt(acc / N);
    }

    Deriv deriv_;
    double rtol_;
    double atol_;
    std::size_t steps_ = 0;
};

}  // namespace fanocqed::detail
