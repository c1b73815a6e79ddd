#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pilotwave/field.hpp"

namespace pilotwave {

// Kinematic snapshot of a state: density, velocity field, quantum potential,
// and a validity mask. Velocity and Q are meaningless where rho falls under
// eps_rho = 1e-12 * max(rho); the mask guards the trajectory integrator
// against the node divergences.
struct MadelungView {
    Grid grid = Grid::line(8, 0.0, 1.0);
    std::vector<double> rho;
    std::array<std::vector<double>, 2> velocity; // velocity[a] along axis a
    std::vector<double> qpotential;              // may be empty if not requested
    std::vector<std::uint8_t> valid;
    double eps_rho = 0.0;

    // Spin vector field (hbar/2rho) Psi^dag sigma Psi, filled for spinor views.
    std::array<std::vector<double>, 3> spin; // sx, sy, sz

    bool has_spin() const { return !spin[0].empty(); }

    bool valid_at_cell(std::size_t i0, std::size_t i1 = 0) const {
        return valid[grid.index(i0, i1)] != 0;
    }

    // Linear (1D) / bilinear (2D) interpolation. Returns nullopt when the
    // stencil touches an invalid cell or leaves the grid.
    std::optional<std::array<double, 2>> velocity_at(std::array<double, 2> x) const;
    std::optional<double> rho_at(std::array<double, 2> x) const;
    std::optional<std::array<double, 3>> spin_at(std::array<double, 2> x) const;
};

struct MadelungOptions {
    bool with_qpotential = true;
    bool with_spin = true; // spinor overload only
    kernels::ExecPolicy policy = kernels::default_policy();
};

// rho = |psi|^2, v = (hbar/m) Im(psi* grad psi)/rho with a spectral gradient
// (gauge-safe at nodes; no phase unwrapping anywhere), Q = -(hbar^2/2m)
// Lap(sqrt rho)/sqrt(rho) with a centered-difference Laplacian.
MadelungView madelung_decompose(const ComplexField& field, const PhysicalParams& params,
                                const MadelungOptions& opts = {});

// Spinor version: rho = Psi^dag Psi, v = (hbar/m) Im(Psi^dag grad Psi)/rho,
// plus the spin vector field.
MadelungView madelung_decompose(const SpinorField& spinor, const PhysicalParams& params,
                                const MadelungOptions& opts = {});

// Every k-th cell of a view (used to keep trajectory snapshot stores small
// when the propagation grid resolves a fast phase ramp the kinematics does
// not need).
MadelungView decimate(const MadelungView& view, std::size_t factor);

// Velocity at a point; throws LowDensityError in masked regions.
double scalar_velocity(const ComplexField& field, std::array<double, 2> at,
                       const PhysicalParams& params, int axis = 0);
std::array<double, 2> spinor_velocity(const SpinorField& spinor,
                                      std::array<double, 2> at,
                                      const PhysicalParams& params);

// Spin polar angles at a point: theta = angle to z, phi from (sx, sy) with
// the convention sx = |s| sin(theta) sin(phi), sy = |s| sin(theta) cos(phi);
// phi reported as 0 at the poles.
std::array<double, 2> spin_vector(const SpinorField& spinor, std::array<double, 2> at);

std::array<double, 2> spin_angles_from_vector(const std::array<double, 3>& s);

} // namespace pilotwave
