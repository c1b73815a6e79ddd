#include "pilotwave/trajectory.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pilotwave {

void SnapshotSequence::push(double t, MadelungView view) {
    if (!times_.empty() && t <= times_.back())
        throw ValidationError("snapshot times must be strictly increasing");
    times_.push_back(t);
    views_.push_back(std::move(view));
}

TrajectoryBatch::TrajectoryBatch(const std::vector<std::array<double, 2>>& starts,
                                 double t0, bool record_spin)
    : state_(starts), record_spin_(record_spin) {
    trajectories_.resize(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        trajectories_[i].label = static_cast<int>(i);
        trajectories_[i].times.push_back(t0);
        trajectories_[i].positions.push_back(starts[i]);
    }
}

namespace {

struct LerpField {
    const MadelungView& a;
    const MadelungView& b;
    double ta, tb;

    bool eval(std::array<double, 2> x, double t, std::array<double, 2>& v) const {
        const auto va = a.velocity_at(x);
        if (!va) return false;
        const auto vb = b.velocity_at(x);
        if (!vb) return false;
        const double w = (t - ta) / (tb - ta);
        v[0] = (1.0 - w) * (*va)[0] + w * (*vb)[0];
        v[1] = (1.0 - w) * (*va)[1] + w * (*vb)[1];
        return true;
    }
};

// One RK4 substep; returns false if any stage left the valid region.
bool rk4_substep(const LerpField& f, std::array<double, 2>& x, double t, double h) {
    std::array<double, 2> k1{}, k2{}, k3{}, k4{}, p{};
    if (!f.eval(x, t, k1)) return false;
    p = {x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]};
    if (!f.eval(p, t + 0.5 * h, k2)) return false;
    p = {x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]};
    if (!f.eval(p, t + 0.5 * h, k3)) return false;
    p = {x[0] + h * k3[0], x[1] + h * k3[1]};
    if (!f.eval(p, t + h, k4)) return false;
    x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    return std::isfinite(x[0]) && std::isfinite(x[1]);
}

} // namespace

void TrajectoryBatch::advance(const MadelungView& a, double ta, const MadelungView& b,
                              double tb, int substeps, kernels::ExecPolicy policy) {
    if (!(tb > ta)) throw ValidationError("trajectory interval must advance in time");
    const LerpField field{a, b, ta, tb};
    const double h = (tb - ta) / static_cast<double>(substeps);

    auto advance_one = [&](std::size_t i) {
        if (trajectories_[i].aborted) return;
        std::array<double, 2> x = state_[i];
        for (int s = 0; s < substeps; ++s) {
            if (!rk4_substep(field, x, ta + h * s, h)) {
                trajectories_[i].aborted = true;
                trajectories_[i].abort_time = ta + h * s;
                return;
            }
        }
        state_[i] = x;
    };

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(state_.size());
    if (policy == kernels::ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) advance_one(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) advance_one(static_cast<std::size_t>(i));
    }
}

void TrajectoryBatch::record(double t, const MadelungView* spin_source) {
    for (std::size_t i = 0; i < state_.size(); ++i) {
        auto& traj = trajectories_[i];
        if (traj.aborted) continue;
        traj.times.push_back(t);
        traj.positions.push_back(state_[i]);
        if (record_spin_ && spin_source) {
            const auto s = spin_source->spin_at(state_[i]);
            const auto angles =
                s ? spin_angles_from_vector(*s) : std::array<double, 2>{0.0, 0.0};
            traj.theta.push_back(angles[0]);
            traj.phi.push_back(angles[1]);
        }
    }
}

std::size_t TrajectoryBatch::abort_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories_)
        if (t.aborted) ++n;
    return n;
}

Trajectory integrate_trajectory(const SnapshotSequence& store,
                                std::array<double, 2> x0, int substeps, int label) {
    auto out = integrate_trajectories(store, {x0}, substeps,
                                      kernels::ExecPolicy::Serial);
    out[0].label = label;
    return out[0];
}

std::vector<Trajectory> integrate_trajectories(
    const SnapshotSequence& store, const std::vector<std::array<double, 2>>& starts,
    int substeps, kernels::ExecPolicy policy) {
    if (store.size() < 2)
        throw ValidationError("trajectory integration needs at least two snapshots");

    TrajectoryBatch batch(starts, store.time(0));
    for (std::size_t s = 0; s + 1 < store.size(); ++s) {
        batch.advance(store.view(s), store.time(s), store.view(s + 1),
                      store.time(s + 1), substeps, policy);
        batch.record(store.time(s + 1));
    }
    return batch.take();
}

// ---- sampling -----------------------------------------------------------------

namespace {

std::vector<std::array<double, 2>> sample_from_density(
    const Grid& g, const std::vector<double>& rho, std::size_t n,
    const CounterRng& rng) {
    if (n < 1) throw ValidationError("sample count must be >= 1");

    if (g.dims() == 1) {
        // Piecewise-constant density per cell; the CDF is linear inside a
        // cell, so inversion is exact for the discretized density.
        const std::size_t m = g.npoints(0);
        std::vector<double> cdf(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            cdf[i + 1] = cdf[i] + std::max(rho[i], 0.0);
        const double total = cdf[m];
        if (!(total > 0.0)) throw ValidationError("cannot sample zero density");

        const CounterRng draw = rng.fork("sample-1d");
        std::vector<std::array<double, 2>> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = draw.uniform(i) * total;
            std::size_t lo = 0, hi = m;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (cdf[mid] <= u) ? lo = mid : hi = mid;
            }
            const double frac = (u - cdf[lo]) / (cdf[lo + 1] - cdf[lo]);
            out[i] = {g.coord(0, lo) + (frac - 0.5) * g.spacing(0), 0.0};
        }
        return out;
    }

    // 2D rejection against the cell maximum.
    double rho_max = 0.0;
    for (double r : rho) rho_max = std::max(rho_max, r);
    const double bound = rho_max * 1.0000001;

    const double lo0 = g.origin(0), ext0 = g.extent(0) - g.spacing(0);
    const double lo1 = g.origin(1), ext1 = g.extent(1) - g.spacing(1);

    auto rho_interp = [&](double x, double y) -> double {
        const double u = (x - g.origin(0)) / g.spacing(0);
        const double v = (y - g.origin(1)) / g.spacing(1);
        const auto i = static_cast<std::size_t>(u);
        const auto j = static_cast<std::size_t>(v);
        if (i + 1 >= g.npoints(0) || j + 1 >= g.npoints(1)) return 0.0;
        const double fu = u - static_cast<double>(i), fv = v - static_cast<double>(j);
        return (1 - fu) * ((1 - fv) * rho[g.index(i, j)] + fv * rho[g.index(i, j + 1)]) +
               fu * ((1 - fv) * rho[g.index(i + 1, j)] + fv * rho[g.index(i + 1, j + 1)]);
    };

    std::vector<std::array<double, 2>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngSequence seq(rng.fork("sample-2d:" + std::to_string(i)));
        for (;;) {
            const double x = lo0 + seq.uniform() * ext0;
            const double y = lo1 + seq.uniform() * ext1;
            if (seq.uniform() * bound <= rho_interp(x, y)) {
                out[i] = {x, y};
                break;
            }
        }
    }
    return out;
}

} // namespace

std::vector<std::array<double, 2>> sample_initial_positions(const ComplexField& field,
                                                            std::size_t n,
                                                            const CounterRng& rng) {
    std::vector<double> rho(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) rho[i] = std::norm(field.values()[i]);
    return sample_from_density(field.grid(), rho, n, rng);
}

std::vector<std::array<double, 2>> sample_initial_positions(const MadelungView& view,
                                                            std::size_t n,
                                                            const CounterRng& rng) {
    return sample_from_density(view.grid, view.rho, n, rng);
}

} // namespace pilotwave
