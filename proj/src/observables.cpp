#include "svl/observables.hpp"

#include <cmath>

namespace svl {

double kink_density_1d(const Eigen::Ref<const Eigen::VectorXd>& angles, KinkConvention convention) {
    const Index n = angles.size();
    if (n < 2) throw InvalidParameter("kink_density_1d: need N >= 2");
    long discordant = 0;
    int prev = rotor_sign(angles[0]);
    const int first = prev;
    for (Index i = 1; i < n; ++i) {
        const int cur = rotor_sign(angles[i]);
        discordant += (cur != prev);
        prev = cur;
    }
    if (convention == KinkConvention::Periodic) discordant += (prev != first);
    // Each discordant pair contributes 1 - (-1) = 2 to the bracket.
    return static_cast<double>(discordant) / static_cast<double>(n);
}

double graph_defect_density(const CirculantGraph& g, const Eigen::Ref<const Eigen::VectorXd>& angles) {
    const Index n = g.size();
    const Index r = g.range();
    if (angles.size() != n) throw InvalidParameter("graph_defect_density: angles must have length N");

    std::vector<unsigned char> negative(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) negative[static_cast<std::size_t>(i)] = rotor_sign(angles[i]) < 0;
    auto neg = [&](Index i) { return static_cast<long>(negative[static_cast<std::size_t>(i)]); };

    // Negative sites among the 2r+1 window centred on site 0.
    long window = neg(0);
    for (Index m = 1; m <= r; ++m) window += neg(m) + neg(n - m);

    // For each i: number of neighbours j with a sign different from site i.
    long discordant_ordered = 0;
    for (Index i = 0; i < n; ++i) {
        const long neg_neighbours = window - neg(i);
        discordant_ordered += neg(i) ? (2 * r - neg_neighbours) : neg_neighbours;
        Index enter = i + r + 1;
        if (enter >= n) enter -= n;
        Index leave = i - r;
        if (leave < 0) leave += n;
        window += neg(enter) - neg(leave);
    }
    // Every ordered discordant pair adds 2 to the bracket.
    return 2.0 * static_cast<double>(discordant_ordered) / (4.0 * static_cast<double>(n) * static_cast<double>(r));
}

double excess_energy_density(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state) {
    const double h = hamiltonian(g, s, state);
    const double emin = s.has_standard_binding(g) ? e_min(g, s, state.time) : e_min_numeric(g, s, state.time);
    return (h - emin) / (static_cast<double>(g.size()) * static_cast<double>(g.range()));
}

double magnetization(const Eigen::Ref<const Eigen::VectorXd>& angles) {
    return angles.array().sin().abs().mean();
}

Eigen::VectorXd spatial_correlation(const Eigen::Ref<const Eigen::VectorXd>& angles, Index d_max) {
    const Index n = angles.size();
    if (d_max < 0 || d_max > n / 2) throw InvalidParameter("spatial_correlation: need 0 <= d_max <= N/2");
    const Eigen::VectorXd s = angles.array().sin().matrix();
    Eigen::VectorXd out(d_max + 1);
    for (Index d = 0; d <= d_max; ++d) {
        // Split at the wrap to keep the inner loops contiguous.
        const double head = s.head(n - d).dot(s.segment(d, n - d));
        const double tail = d > 0 ? s.tail(d).dot(s.head(d)) : 0.0;
        out[d] = (head + tail) / static_cast<double>(n);
    }
    return out;
}

CorrelationProfile::CorrelationProfile(Index n_sites, Index d_max, double epsilon)
    : n_sites_(n_sites), epsilon_(epsilon), sum_(Eigen::VectorXd::Zero(d_max + 1)), sum_sq_(Eigen::VectorXd::Zero(d_max + 1)) {
    if (d_max < 0 || d_max > n_sites / 2) throw InvalidParameter("CorrelationProfile: need 0 <= d_max <= N/2");
}

CorrelationProfile CorrelationProfile::from_sums(Index n_sites, double epsilon, std::uint64_t count, Eigen::VectorXd sum,
                                                 Eigen::VectorXd sum_sq) {
    if (sum.size() != sum_sq.size()) throw InvalidParameter("CorrelationProfile: sum lengths differ");
    CorrelationProfile p(n_sites, sum.size() - 1, epsilon);
    p.sum_ = std::move(sum);
    p.sum_sq_ = std::move(sum_sq);
    p.count_ = count;
    return p;
}

void CorrelationProfile::accumulate(const Eigen::Ref<const Eigen::VectorXd>& angles) {
    if (angles.size() != n_sites_) throw InvalidParameter("CorrelationProfile: state size does not match");
    add_sample(spatial_correlation(angles, d_max()));
}

void CorrelationProfile::add_sample(const Eigen::Ref<const Eigen::VectorXd>& g) {
    if (g.size() != sum_.size()) throw InvalidParameter("CorrelationProfile: sample length does not match d_max + 1");
    sum_ += g;
    sum_sq_ += g.cwiseAbs2();
    ++count_;
}

void CorrelationProfile::merge(const CorrelationProfile& other) {
    if (other.n_sites_ != n_sites_ || other.sum_.size() != sum_.size()) {
        throw InvalidParameter("CorrelationProfile: merge of incompatible profiles");
    }
    sum_ += other.sum_;
    sum_sq_ += other.sum_sq_;
    count_ += other.count_;
}

Eigen::VectorXd CorrelationProfile::g_values() const {
    if (count_ == 0) throw InsufficientData("CorrelationProfile: no trajectories accumulated");
    return sum_ / static_cast<double>(count_);
}

Eigen::VectorXd CorrelationProfile::standard_errors() const {
    if (count_ < 2) throw InsufficientData("CorrelationProfile: need >= 2 trajectories for errors");
    const double n = static_cast<double>(count_);
    const Eigen::ArrayXd mean = sum_.array() / n;
    const Eigen::ArrayXd var = ((sum_sq_.array() / n - mean.square()) * n / (n - 1.0)).max(0.0);
    return (var / n).sqrt().matrix();
}

}  // namespace svl
