#pragma once

#include <Eigen/Core>

#include "svl/errors.hpp"

namespace svl {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Ring of N vertices where each vertex is joined to its `range` nearest
/// neighbours on either side. The adjacency matrix is never stored; every
/// operation works from index arithmetic.
class CirculantGraph {
public:
    CirculantGraph(Index n_vertices, Index range) : n_(n_vertices), r_(range) {
        if (n_vertices < 3) {
            throw InvalidParameter("circulant graph: n_vertices must be >= 3 (got " + std::to_string(n_vertices) + ")");
        }
        const Index max_range = (n_vertices - 1) / 2;
        if (range < 1 || range > max_range) {
            throw InvalidParameter("circulant graph: range must satisfy 1 <= range <= floor((n_vertices-1)/2) = " +
                                   std::to_string(max_range) + " (got " + std::to_string(range) + ")");
        }
    }

    Index size() const noexcept { return n_; }
    Index range() const noexcept { return r_; }
    Index degree() const noexcept { return 2 * r_; }

    /// Edge density 2r/(N-1).
    double connectance() const noexcept { return 2.0 * static_cast<double>(r_) / static_cast<double>(n_ - 1); }

    bool is_complete() const noexcept { return 2 * r_ == n_ - 1; }

    /// Mathematical modulo; result lies in [0, N) for any integer offset.
    Index wrap(Index i) const noexcept {
        const Index m = i % n_;
        return m < 0 ? m + n_ : m;
    }

    bool adjacent(Index i, Index j) const noexcept {
        const Index d = wrap(i - j);
        return d != 0 && (d <= r_ || n_ - d <= r_);
    }

    friend bool operator==(const CirculantGraph&, const CirculantGraph&) = default;

private:
    Index n_;
    Index r_;
};

inline CirculantGraph new_circulant(Index n_vertices, Index range) { return {n_vertices, range}; }

inline double connectance(const CirculantGraph& g) noexcept { return g.connectance(); }

/// out[i] = sum_{m=1..r} values[i+m] + values[i-m], indices modulo N.
///
/// A window of width 2r+1 slides around the ring: one element enters and one
/// leaves per site, so the cost is O(N + r). The window is rebuilt from scratch
/// at the start of every pass (every N updates), which bounds rounding drift.
/// `out` must not alias `values`.
template <typename Derived, typename OutDerived>
void neighbor_sums(const CirculantGraph& g, const Eigen::MatrixBase<Derived>& values_in,
                   Eigen::MatrixBase<OutDerived> const& out_) {
    using Scalar = typename Derived::Scalar;
    auto& out = const_cast<Eigen::MatrixBase<OutDerived>&>(out_);
    const Index n = g.size();
    const Index r = g.range();
    if (values_in.size() != n) {
        throw InvalidParameter("neighbor_sums: values has length " + std::to_string(values_in.size()) +
                               ", graph has N = " + std::to_string(n));
    }
    const Eigen::Ref<const VectorX<Scalar>> values(values_in);
    out.derived().resize(n);

    if (r == 1) {
        out(0) = values(n - 1) + values(1);
        for (Index i = 1; i + 1 < n; ++i) out(i) = values(i - 1) + values(i + 1);
        out(n - 1) = values(n - 2) + values(0);
        return;
    }

    Scalar window = values(0);
    for (Index m = 1; m <= r; ++m) window += values(m) + values(n - m);
    for (Index i = 0; i < n; ++i) {
        out(i) = window - values(i);
        Index enter = i + r + 1;
        if (enter >= n) enter -= n;
        Index leave = i - r;
        if (leave < 0) leave += n;
        window += values(enter) - values(leave);
    }
}

template <typename Derived>
VectorX<typename Derived::Scalar> neighbor_sums(const CirculantGraph& g, const Eigen::MatrixBase<Derived>& values) {
    VectorX<typename Derived::Scalar> out(g.size());
    neighbor_sums(g, values, out);
    return out;
}

/// sum_{i,j} A_ij x_i y_j, evaluated as x . neighbor_sums(y).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar quadratic_form(const CirculantGraph& g, const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedY>& y) {
    if (x.size() != g.size() || y.size() != g.size()) {
        throw InvalidParameter("quadratic_form: vector lengths must equal N = " + std::to_string(g.size()));
    }
    return x.dot(neighbor_sums(g, y));
}

}  // namespace svl
