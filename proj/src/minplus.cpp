#include "pilotwave/minplus.hpp"

#include <algorithm>
#include <cmath>

#include "pilotwave/madelung.hpp"
#include "pilotwave/propagator.hpp"

namespace pilotwave::minplus {

double ClassicalAction::s_cl(double x, double t, double x0) const {
    if (!(t > 0.0)) throw ValidationError("classical action needs t > 0");
    switch (kind) {
    case Kind::Free:
        return mass * (x - x0) * (x - x0) / (2.0 * t);
    case Kind::LinearGravity:
        return mass * (x - x0) * (x - x0) / (2.0 * t) -
               0.5 * mass * g * t * (x + x0) - mass * g * g * t * t * t / 24.0;
    case Kind::Harmonic: {
        const double wt = omega * t;
        if (wt >= M_PI)
            throw CausticError("harmonic action past the first focus");
        const double s = std::sin(wt);
        return mass * omega / (2.0 * s) *
               ((x * x + x0 * x0) * std::cos(wt) - 2.0 * x * x0);
    }
    }
    return 0.0;
}

double ClassicalAction::characteristic(double x0, double v0, double t) const {
    switch (kind) {
    case Kind::Free: return x0 + v0 * t;
    case Kind::LinearGravity: return x0 + v0 * t - 0.5 * g * t * t;
    case Kind::Harmonic:
        return x0 * std::cos(omega * t) + v0 / omega * std::sin(omega * t);
    }
    return x0;
}

Potential ClassicalAction::potential() const {
    switch (kind) {
    case Kind::Free: return Potential::none();
    case Kind::LinearGravity: return Potential::linear({mass * g, 0.0});
    case Kind::Harmonic: return Potential::harmonic(mass, omega);
    }
    return Potential::none();
}

double ClassicalAction::potential_value(double x) const {
    switch (kind) {
    case Kind::Free: return 0.0;
    case Kind::LinearGravity: return mass * g * x;
    case Kind::Harmonic: return 0.5 * mass * omega * omega * x * x;
    }
    return 0.0;
}

void InitialData::validate() const {
    if (grid.dims() != 1) throw ValidationError("initial data must be 1D");
    if (rho0.size() != grid.size() || s0.size() != grid.size())
        throw ValidationError("initial data size mismatch");
    double total = 0.0;
    for (double r : rho0) {
        if (r < 0.0) throw ValidationError("rho0 must be nonnegative");
        total += r;
    }
    total *= grid.cell_volume();
    if (std::abs(total - 1.0) > 1e-6)
        throw NormalizationError("rho0 must integrate to 1");
    for (std::size_t i = 0; i < s0.size(); ++i)
        if (rho0[i] > 0.0 && !std::isfinite(s0[i]))
            throw ValidationError("S0 must be finite on the support of rho0");
}

double minplus_action(const InitialData& init, const ClassicalAction& act, double x,
                      double t) {
    if (!(t > 0.0)) throw ValidationError("minplus_action needs t > 0");
    const Grid& g = init.grid;
    const std::size_t n = g.npoints(0);

    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double val = init.s0[j] + act.s_cl(x, t, g.coord(0, j));
        if (val < best_val) {
            best_val = val;
            best = j;
        }
    }
    if (best == 0 || best == n - 1)
        throw CoverageError("minplus minimizer on the x0 grid boundary");

    // Parabolic refinement through the three bracketing nodes; exact for
    // objectives quadratic in x0 (free/linear/harmonic actions with linear or
    // quadratic S0).
    const double fm = init.s0[best - 1] + act.s_cl(x, t, g.coord(0, best - 1));
    const double f0 = best_val;
    const double fp = init.s0[best + 1] + act.s_cl(x, t, g.coord(0, best + 1));
    const double denom = fp - 2.0 * f0 + fm;
    if (denom <= 0.0) return f0; // flat or degenerate: keep the node value
    const double delta = 0.5 * (fm - fp) / denom; // in units of spacing
    return f0 - 0.25 * (fm - fp) * delta;
}

ClassicalFlow hj_velocity_and_density(const InitialData& init,
                                      const ClassicalAction& act, double t) {
    init.validate();
    const Grid& g = init.grid;
    const std::size_t n = g.npoints(0);
    const double h = g.spacing(0);

    // Initial velocity field from centered differences of S0.
    std::vector<double> v0(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t jm = (j == 0) ? 0 : j - 1;
        const std::size_t jp = (j == n - 1) ? n - 1 : j + 1;
        v0[j] = (init.s0[jp] - init.s0[jm]) /
                (static_cast<double>(jp - jm) * h * act.mass);
    }

    ClassicalFlow flow;
    flow.x.resize(n);
    flow.v.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        flow.x[j] = act.characteristic(g.coord(0, j), v0[j], t);

    for (std::size_t j = 0; j + 1 < n; ++j)
        if (flow.x[j + 1] <= flow.x[j])
            throw CausticError("characteristic map not monotone: caustic at t");

    // Continuity: rho(x(t;x0)) = rho0(x0) / |dx/dx0|.
    flow.rho.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t jm = (j == 0) ? 0 : j - 1;
        const std::size_t jp = (j == n - 1) ? n - 1 : j + 1;
        const double jac =
            (flow.x[jp] - flow.x[jm]) / (static_cast<double>(jp - jm) * h);
        if (jac < 1e-12) throw CausticError("vanishing Jacobian: caustic at t");
        flow.rho[j] = init.rho0[j] / jac;
    }

    // Velocity transported along the characteristic.
    for (std::size_t j = 0; j < n; ++j) {
        switch (act.kind) {
        case ClassicalAction::Kind::Free: flow.v[j] = v0[j]; break;
        case ClassicalAction::Kind::LinearGravity:
            flow.v[j] = v0[j] - act.g * t;
            break;
        case ClassicalAction::Kind::Harmonic:
            flow.v[j] = -g.coord(0, j) * act.omega * std::sin(act.omega * t) +
                        v0[j] * std::cos(act.omega * t);
            break;
        }
    }
    return flow;
}

namespace {

double monotone_interp(const std::vector<double>& xs, const std::vector<double>& ys,
                       double xq, double outside) {
    if (xq <= xs.front() || xq >= xs.back()) return outside;
    std::size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (xs[mid] <= xq) ? lo = mid : hi = mid;
    }
    const double f = (xq - xs[lo]) / (xs[lo + 1] - xs[lo]);
    return (1.0 - f) * ys[lo] + f * ys[lo + 1];
}

} // namespace

double ClassicalFlow::rho_at(double xq) const {
    return monotone_interp(x, rho, xq, 0.0);
}

double ClassicalFlow::velocity_at(double xq) const {
    return monotone_interp(x, v, xq, std::numeric_limits<double>::quiet_NaN());
}

double hj_velocity(const InitialData& init, const ClassicalAction& act, double x,
                   double t, double dx) {
    const double sp = minplus_action(init, act, x + dx, t);
    const double sm = minplus_action(init, act, x - dx, t);
    return (sp - sm) / (2.0 * dx * act.mass);
}

SweepReport hbar_sweep_compare(const InitialData& init, const ClassicalAction& act,
                               const std::vector<double>& hbars, double t) {
    init.validate();
    const Grid& g = init.grid;
    const std::size_t n = g.npoints(0);

    const ClassicalFlow flow = hj_velocity_and_density(init, act, t);

    SweepReport report;
    for (double hbar : hbars) {
        // Phase resolvability of exp(i S0 / hbar) on this grid.
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (std::abs(init.s0[j + 1] - init.s0[j]) / hbar > M_PI)
                throw ResolutionError("S0 phase under-resolved at this hbar");

        PhysicalParams params;
        params.mass = act.mass;
        params.hbar = hbar;

        ComplexField psi(g);
        for (std::size_t j = 0; j < n; ++j) {
            const double mag = std::sqrt(init.rho0[j]);
            const double ph = init.s0[j] / hbar;
            psi.at(j) = cplx(mag * std::cos(ph), mag * std::sin(ph));
        }
        normalize(psi);

        // Accuracy guard keyed to the occupied spectrum, not the grid Nyquist:
        // the kinetic factor is exact at any dt, what matters is the splitting
        // error over the wavenumbers the state actually carries.
        double k_occ = 0.0;
        {
            auto hat = psi.values();
            auto plan = kernels::fft_plan(n);
            kernels::fft_inplace(*plan, hat.data(), false);
            double top = 0.0;
            for (const auto& c : hat) top = std::max(top, std::norm(c));
            for (std::size_t j = 0; j < n; ++j)
                if (std::norm(hat[j]) > 1e-12 * top)
                    k_occ = std::max(k_occ, std::abs(g.wavenumber(0, j)));
        }
        // momentum the potential can add over the run (only steers dt; actual
        // aliasing is checked after the run)
        double k_dyn = k_occ;
        if (act.kind == ClassicalAction::Kind::LinearGravity) {
            k_dyn += act.mass * std::abs(act.g) * t / hbar;
        } else if (act.kind == ClassicalAction::Kind::Harmonic) {
            double xc = 0.0, vc = 0.0, x2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                xc += g.coord(0, j) * init.rho0[j];
                x2 += g.coord(0, j) * g.coord(0, j) * init.rho0[j];
            }
            xc *= g.cell_volume();
            x2 *= g.cell_volume();
            for (std::size_t j = 1; j + 1 < n; ++j)
                vc += (init.s0[j + 1] - init.s0[j - 1]) / (2.0 * g.spacing(0)) *
                      init.rho0[j];
            vc *= g.cell_volume() / act.mass;
            const double amp = std::hypot(xc, vc / act.omega);
            const double sigma0 = std::sqrt(std::max(x2 - xc * xc, 0.0));
            k_dyn += act.mass * act.omega * (amp + 2.0 * sigma0) / hbar;
        }

        const double dt_kin =
            0.1 * 2.0 * params.mass / (hbar * std::max(k_dyn * k_dyn, 1e-12));
        const double dt = t / std::max(16.0, std::ceil(t / dt_kin));

        StepConfig cfg;
        cfg.dt = dt;
        SchrodingerPropagator prop(g, params, act.potential(), cfg);
        ComplexField state = psi;
        const std::size_t nsteps = step_count(0.0, t, dt);
        for (std::size_t s = 0; s < nsteps; ++s) prop.step_inplace(state);

        // aliasing check: the final spectrum must not be pinned near Nyquist
        {
            auto hat = state.values();
            auto plan = kernels::fft_plan(n);
            kernels::fft_inplace(*plan, hat.data(), false);
            double total = 0.0, top_band = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double w = std::norm(hat[j]);
                total += w;
                if (std::abs(g.wavenumber(0, j)) > 0.9 * M_PI / g.spacing(0))
                    top_band += w;
            }
            if (top_band > 1e-10 * total)
                throw ResolutionError(
                    "state reached the grid Nyquist band at this hbar");
        }

        MadelungOptions mopts;
        mopts.with_qpotential = false;
        const MadelungView view = madelung_decompose(state, params, mopts);

        double l1 = 0.0;
        double vmax = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double xq = g.coord(0, j);
            l1 += std::abs(view.rho[j] - flow.rho_at(xq));
            // velocity compared where both sides are meaningful
            if (view.valid[j] && view.rho[j] > 1e-4) {
                const double vc = flow.velocity_at(xq);
                if (std::isfinite(vc))
                    vmax = std::max(vmax, std::abs(view.velocity[0][j] - vc));
            }
        }
        report.entries.push_back({hbar, l1 * g.cell_volume(), vmax});
    }

    report.rho_monotone = true;
    report.v_monotone = true;
    for (std::size_t i = 0; i + 1 < report.entries.size(); ++i) {
        if (report.entries[i + 1].rho_l1 >= report.entries[i].rho_l1)
            report.rho_monotone = false;
        if (report.entries[i + 1].v_linf >= report.entries[i].v_linf)
            report.v_monotone = false;
    }
    return report;
}

} // namespace pilotwave::minplus
