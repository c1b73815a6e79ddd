#pragma once

#include <array>

#include "pilotwave/field.hpp"

namespace pilotwave::oracle {

// Closed-form references. Everything here is evaluated directly from the
// formulas and shares no evolution code with the propagators, so the two
// paths can check each other.

// sigma(t) = sigma0 sqrt(1 + (hbar t / 2 m sigma0^2)^2)
double gaussian_width(double sigma0, double t, double mass, double hbar);

// Free/falling Gaussian packet and its pilot trajectory per axis:
// X(t) = xg0 + v0 t [- g t^2/2 on gravity axes] + (x0 - xg0)(1 - sigma(t)/sigma0)
// where x0 is the packet center and xg0 the sampled start.
struct GaussianGravityPacket {
    std::array<double, 3> sigma0{1.0, 1.0, 1.0};
    std::array<double, 3> center{0.0, 0.0, 0.0};   // packet center at t=0
    std::array<double, 3> start{0.0, 0.0, 0.0};    // pilot start position
    std::array<double, 3> v0{0.0, 0.0, 0.0};
    double g = 0.0;                                // acts on axis 2 (z), downward
    double mass = 1.0;
    double hbar = 1.0;
};

std::array<double, 3> gravity_packet_trajectory(const GaussianGravityPacket& p,
                                                double t);

// Packet-center (classical) trajectory, same conventions.
std::array<double, 3> gravity_packet_center(const GaussianGravityPacket& p, double t);

// Harmonic-oscillator coherent state. The modulus follows the translated
// ground-state Gaussian; the phase convention used here is
//   psi(x,t) = (2 pi sh^2)^(-1/4) exp(-(x-xc)^2 / 4 sh^2)
//              * exp(i [m v(t) x + gamma(t)] / hbar),
//   gamma(t) = -hbar w t / 2 - m xc(t) v(t) / 2,
// which solves the Schrodinger equation exactly; modulus-level statements
// do not depend on gamma.
struct CoherentState {
    double omega = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
    double x0 = 0.0;

    double sigma_h() const { return std::sqrt(hbar / (2.0 * mass * omega)); }
    double center(double t) const { return x0 * std::cos(omega * t); }
    double velocity(double t) const { return -x0 * omega * std::sin(omega * t); }
};

ComplexField coherent_state_field(const CoherentState& c, double t, const Grid& grid);

// Post-magnet Stern-Gerlach spinor: up component centered at +(zd + u t) with
// weight cos(theta0/2) and phase +m u z/hbar, down at -(zd + u t) with weight
// sin(theta0/2) and phase -m u z/hbar. The constant phases are set to 0.
struct PostMagnetParams {
    double theta0 = M_PI / 3.0;
    double phi0 = 0.0; // enters only through the constant phases; kept for the record
    double sigma0 = 1.0;
    double z_delta = 0.0;
    double u = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
};

SpinorField postmagnet_spinor(const PostMagnetParams& p, double t, const Grid& grid);

// Two-slit far-field spacing lambda L / d. Sets `regime_warning` when
// L >> d >> lambda does not hold (result still returned).
double fringe_spacing(double lambda_db, double slit_separation, double distance,
                      bool* regime_warning = nullptr);

} // namespace pilotwave::oracle
