#pragma once

// Independent reference implementations used only by the tests. They are
// deliberately naive: dense matrices, double loops, brute-force scans.

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "svl/graph.hpp"
#include "svl/rng.hpp"

namespace oracle {

using svl::Index;

/// A_ij = 1 when the ring distance between i and j is in [1, r].
inline Eigen::MatrixXd dense_adjacency(Index n, Index r) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Index d = std::abs(i - j);
            const Index ring = std::min(d, n - d);
            if (ring >= 1 && ring <= r) a(i, j) = 1.0;
        }
    }
    return a;
}

inline double dense_hamiltonian(const Eigen::MatrixXd& a, double j, double h, const Eigen::VectorXd& theta) {
    double pair = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index k = 0; k < a.cols(); ++k) pair += a(i, k) * std::sin(theta[i]) * std::sin(theta[k]);
    }
    double field = 0.0;
    for (Index i = 0; i < theta.size(); ++i) field += std::cos(theta[i]);
    return -0.5 * j * pair - h * field;
}

inline int sgn(double angle) { return std::sin(angle) < 0.0 ? -1 : 1; }

/// (1/4Nr) sum_ij A_ij [1 - s_i s_j] by the double sum.
inline double dense_defect_density(const Eigen::MatrixXd& a, Index r, const Eigen::VectorXd& theta) {
    double sum = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index k = 0; k < a.cols(); ++k) sum += a(i, k) * (1.0 - sgn(theta[i]) * sgn(theta[k]));
    }
    return sum / (4.0 * static_cast<double>(a.rows()) * static_cast<double>(r));
}

/// Minimum over a uniform scan of [0, pi] refined by repeated local rescans.
template <typename F>
double scan_minimum(F f, double lo = 0.0, double hi = M_PI) {
    double best_x = lo;
    double best = f(lo);
    for (int level = 0; level < 12; ++level) {
        const int m = 2000;
        for (int k = 0; k <= m; ++k) {
            const double x = lo + (hi - lo) * k / m;
            const double v = f(x);
            if (v < best) {
                best = v;
                best_x = x;
            }
        }
        const double w = (hi - lo) / m;
        lo = std::max(0.0, best_x - 2.0 * w);
        hi = std::min(M_PI, best_x + 2.0 * w);
    }
    return best;
}

inline Eigen::VectorXd uniform_vector(svl::Rng& rng, Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
    return v;
}

}  // namespace oracle
