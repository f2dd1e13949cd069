#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "svl/graph.hpp"
#include "svl/model.hpp"

namespace svl {

/// Whether the (N-1, 0) pair closes the ring when counting kinks.
enum class KinkConvention {
    Open,      ///< sum over i = 1..N-1 only
    Periodic,  ///< include the wrap pair
};

struct SeriesSample {
    double time = 0.0;
    double rho_e = 0.0;
    double mz = 0.0;
};

/// Final observables of one annealing trajectory.
struct TrajectoryRecord {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    double n1_final = 0.0;
    double n2_final = 0.0;
    double rho_e_final = 0.0;
    double mz_final = 0.0;
    std::vector<SeriesSample> series;
    /// Set when integration failed; the finals are then meaningless.
    std::optional<std::string> failure;

    bool ok() const noexcept { return !failure.has_value(); }
};

/// sgn with sgn(0) = +1.
inline int rotor_sign(double angle) noexcept { return std::sin(angle) < 0.0 ? -1 : 1; }

/// n1 = (1/2N) sum_i [1 - sgn(sin theta_i) sgn(sin theta_{i+1})].
double kink_density_1d(const Eigen::Ref<const Eigen::VectorXd>& angles, KinkConvention convention = KinkConvention::Open);

/// n2 = (1/4Nr) sum_ij A_ij [1 - sgn(sin theta_i) sgn(sin theta_j)], computed in O(N)
/// by sliding a count of negative-sign sites around the ring.
double graph_defect_density(const CirculantGraph& g, const Eigen::Ref<const Eigen::VectorXd>& angles);

/// rho_E(t) = (H - E_min(t)) / (N r). Uses the closed-form minimum when the
/// schedule has the standard binding, the numeric one otherwise.
double excess_energy_density(const CirculantGraph& g, const AnnealSchedule& s, const RotorState& state);

/// M_z = (1/N) sum_i |sin theta_i|.
double magnetization(const Eigen::Ref<const Eigen::VectorXd>& angles);

/// Spatial average (1/N) sum_i sin theta_i sin theta_{i+d} for d = 0..d_max.
Eigen::VectorXd spatial_correlation(const Eigen::Ref<const Eigen::VectorXd>& angles, Index d_max);

/// Ensemble accumulator for G(d) = < (1/N) sum_i sin theta_i sin theta_{i+d} >_traj.
/// Stores d = 0..d_max; G(N-d) = G(d) so d_max <= N/2.
class CorrelationProfile {
public:
    CorrelationProfile() = default;
    CorrelationProfile(Index n_sites, Index d_max, double epsilon = 0.0);

    /// Rebuilds a profile from stored running sums (as written to disk).
    static CorrelationProfile from_sums(Index n_sites, double epsilon, std::uint64_t count, Eigen::VectorXd sum,
                                        Eigen::VectorXd sum_sq);

    void accumulate(const Eigen::Ref<const Eigen::VectorXd>& angles);
    /// Adds one precomputed spatial_correlation() vector.
    void add_sample(const Eigen::Ref<const Eigen::VectorXd>& g);

    /// Elementwise sum of sums and counts; associative and commutative.
    void merge(const CorrelationProfile& other);

    Index n_sites() const noexcept { return n_sites_; }
    Index d_max() const noexcept { return sum_.size() - 1; }
    std::uint64_t n_trajectories() const noexcept { return count_; }
    double epsilon() const noexcept { return epsilon_; }
    void set_epsilon(double e) noexcept { epsilon_ = e; }

    Eigen::VectorXi distances() const { return Eigen::VectorXi::LinSpaced(sum_.size(), 0, static_cast<int>(d_max())); }
    Eigen::VectorXd g_values() const;
    /// Standard error of each G(d) across trajectories.
    Eigen::VectorXd standard_errors() const;
    const Eigen::VectorXd& sums() const noexcept { return sum_; }
    const Eigen::VectorXd& sums_of_squares() const noexcept { return sum_sq_; }

private:
    Index n_sites_ = 0;
    double epsilon_ = 0.0;
    std::uint64_t count_ = 0;
    Eigen::VectorXd sum_;
    Eigen::VectorXd sum_sq_;
};

}  // namespace svl
