#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fanocqed::detail {

// Solve A x = b for a dense row-major n x n matrix by Gaussian elimination
// with partial pivoting. A and b are overwritten; the solution lands in b.
inline void solve_dense_inplace(std::vector<double>& a,
                                std::vector<double>& b, std::size_t n) {
    if (a.size() != n * n || b.size() != n)
        throw std::invalid_argument("solve_dense_inplace: bad dimensions");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[r * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (!(best > 0.0))
            throw std::runtime_error("solve_dense_inplace: singular matrix");
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c)
                std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c)
                a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * b[c];
        b[i] = s / a[i * n + i];
    }
}

inline std::vector<double> solve_dense(std::vector<double> a,
                                       std::vector<double> b, std::size_t n) {
    solve_dense_inplace(a, b, n);
    return b;
}

}  // namespace fanocqed::detail
