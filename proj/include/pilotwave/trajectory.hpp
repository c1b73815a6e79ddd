#pragma once

#include <array>
#include <vector>

#include "pilotwave/madelung.hpp"
#include "pilotwave/rng.hpp"

namespace pilotwave {

// One sampled de Broglie-Bohm path. Positions are recorded at the snapshot
// times the integrator was driven with; spin angles only for spinor runs.
struct Trajectory {
    int label = 0;
    std::vector<double> times;
    std::vector<std::array<double, 2>> positions;
    std::vector<double> theta;
    std::vector<double> phi;
    bool aborted = false;
    double abort_time = 0.0;

    std::array<double, 2> back() const { return positions.back(); }
};

// Kinematic snapshots held in memory, linearly interpolated in time.
class SnapshotSequence {
public:
    void push(double t, MadelungView view);

    std::size_t size() const { return times_.size(); }
    double time(std::size_t i) const { return times_[i]; }
    const MadelungView& view(std::size_t i) const { return views_[i]; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }

private:
    std::vector<double> times_;
    std::vector<MadelungView> views_;
};

// Ensemble advanced interval by interval so that streaming drivers never
// have to keep more than two views alive. RK4 substeps never straddle a
// snapshot boundary; the velocity field is lerped in time between the two
// views. A sample whose stencil enters the invalid mask is flagged aborted
// (kept at its last position) rather than failing the run.
class TrajectoryBatch {
public:
    TrajectoryBatch(const std::vector<std::array<double, 2>>& starts, double t0,
                    bool record_spin = false);

    void advance(const MadelungView& a, double ta, const MadelungView& b, double tb,
                 int substeps,
                 kernels::ExecPolicy policy = kernels::default_policy());

    // Record current positions (and spin from `spin_source` if recording).
    void record(double t, const MadelungView* spin_source = nullptr);

    std::size_t size() const { return trajectories_.size(); }
    const Trajectory& trajectory(std::size_t i) const { return trajectories_[i]; }
    std::vector<Trajectory> take() { return std::move(trajectories_); }

    std::array<double, 2> position(std::size_t i) const { return state_[i]; }
    bool aborted(std::size_t i) const { return trajectories_[i].aborted; }
    std::size_t abort_count() const;

private:
    std::vector<Trajectory> trajectories_;
    std::vector<std::array<double, 2>> state_;
    bool record_spin_;
};

// 4th-order Runge-Kutta integration of dX/dt = v(X, t) against a stored
// snapshot sequence; positions are recorded at every snapshot time.
Trajectory integrate_trajectory(const SnapshotSequence& store,
                                std::array<double, 2> x0, int substeps = 4,
                                int label = 0);

std::vector<Trajectory> integrate_trajectories(
    const SnapshotSequence& store, const std::vector<std::array<double, 2>>& starts,
    int substeps = 4, kernels::ExecPolicy policy = kernels::default_policy());

// n i.i.d. samples from |field|^2: inverse-CDF in 1D, rejection in 2D.
// Sample i consumes its own counter stream, so results do not depend on
// evaluation order.
std::vector<std::array<double, 2>> sample_initial_positions(const ComplexField& field,
                                                            std::size_t n,
                                                            const CounterRng& rng);
std::vector<std::array<double, 2>> sample_initial_positions(const MadelungView& view,
                                                            std::size_t n,
                                                            const CounterRng& rng);

} // namespace pilotwave
