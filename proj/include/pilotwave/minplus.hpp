#pragma once

#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/potential.hpp"

namespace pilotwave::minplus {

// Closed-form classical actions S_cl(x, t; x0). Only the potentials every
// scenario needs (free, linear, harmonic) are supported; anything else would
// require a two-point boundary-value solver this artifact does not carry.
struct ClassicalAction {
    enum class Kind { Free, LinearGravity, Harmonic };

    Kind kind = Kind::Free;
    double mass = 1.0;
    double g = 0.0;     // V = m g x
    double omega = 0.0; // V = m w^2 x^2 / 2

    static ClassicalAction free_motion(double mass) {
        return {Kind::Free, mass, 0.0, 0.0};
    }
    static ClassicalAction linear_gravity(double mass, double g) {
        return {Kind::LinearGravity, mass, g, 0.0};
    }
    static ClassicalAction harmonic(double mass, double omega) {
        return {Kind::Harmonic, mass, 0.0, omega};
    }

    double s_cl(double x, double t, double x0) const;

    // Characteristic launched from x0 with initial velocity v0.
    double characteristic(double x0, double v0, double t) const;

    // Matching quantum-side potential.
    Potential potential() const;

    double potential_value(double x) const;
};

// Sampled rho0(x) and S0(x), both independent of hbar by hypothesis.
struct InitialData {
    Grid grid = Grid::line(8, 0.0, 1.0);
    std::vector<double> rho0;
    std::vector<double> s0;

    void validate() const;
};

// Minplus path integral S(x,t) = min_x0 [ S0(x0) + S_cl(x,t;x0) ]:
// brute-force scan over the x0 grid plus one 3-point parabolic refinement.
// The minimizer must be interior to the grid (CoverageError otherwise).
double minplus_action(const InitialData& init, const ClassicalAction& act, double x,
                      double t);

// Transported classical flow at time t: monotone characteristic map with
// Jacobian-weighted density. Throws CausticError when the map stops being
// strictly monotone (multivalued flow).
struct ClassicalFlow {
    std::vector<double> x;   // transported positions (strictly increasing)
    std::vector<double> rho; // density at x
    std::vector<double> v;   // velocity at x (along the characteristic)

    double rho_at(double xq) const;  // 0 outside the transported support
    double velocity_at(double xq) const;
};

ClassicalFlow hj_velocity_and_density(const InitialData& init,
                                      const ClassicalAction& act, double t);

// Velocity from the gradient of minplus_action by central differences.
double hj_velocity(const InitialData& init, const ClassicalAction& act, double x,
                   double t, double dx);

// Classical-limit comparison: for each hbar, build psi0 = sqrt(rho0)
// exp(i S0/hbar), propagate with the matching potential, extract the Madelung
// density/velocity and compare against the classical flow.
struct SweepEntry {
    double hbar;
    double rho_l1;  // || rho_h - rho_cl ||_1
    double v_linf;  // masked max |v_h - v_cl|
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    bool rho_monotone = false; // strictly decreasing along the given hbar order
    bool v_monotone = false;
};

SweepReport hbar_sweep_compare(const InitialData& init, const ClassicalAction& act,
                               const std::vector<double>& hbars, double t);

} // namespace pilotwave::minplus
