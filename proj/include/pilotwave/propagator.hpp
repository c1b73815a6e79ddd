#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pilotwave/field.hpp"
#include "pilotwave/potential.hpp"

namespace pilotwave {

// Strang split-operator stepper: exp(-iV dt/2h) exp(-iT dt/h) exp(-iV dt/2h)
// with the kinetic factor applied spectrally. With periodic boundary and no
// mask a step is unitary to roundoff.
//
// Step-size guard: what aliases the potential phase is its variation between
// neighbouring cells, not its absolute value (a constant offset is a global
// phase), so the guard is max_adjacent |dV| dt / hbar < pi/2.
class SchrodingerPropagator {
public:
    SchrodingerPropagator(const Grid& grid, const PhysicalParams& params,
                          const Potential& potential, const StepConfig& cfg,
                          kernels::ExecPolicy policy = kernels::default_policy());

    void step_inplace(ComplexField& field) const;
    ComplexField step(const ComplexField& field) const;

    const Grid& grid() const { return grid_; }
    double dt() const { return cfg_.dt; }

private:
    friend class PauliPropagator;

    void apply_half_potential(ComplexField& field) const;
    void apply_kinetic(ComplexField& field) const;
    void apply_mask(ComplexField& field) const;
    void check_finite(const ComplexField& field) const;

    Grid grid_;
    PhysicalParams params_;
    StepConfig cfg_;
    kernels::ExecPolicy policy_;
    std::vector<cplx> half_potential_phase_; // empty when V == 0
    std::vector<cplx> kinetic_phase_;
    std::vector<double> mask_; // empty when periodic
};

// Pauli stepper for 2-component spinors. The magnetic term is applied per
// cell through the closed-form SU(2) exponential, which keeps the norm exact
// for arbitrarily stiff fields; it is grouped with the scalar potential in
// the half steps. The field window is time-gated, so steps carry a time.
class PauliPropagator {
public:
    PauliPropagator(const Grid& grid, const PhysicalParams& params,
                    const Potential& potential, const MagneticField& bfield,
                    const StepConfig& cfg,
                    kernels::ExecPolicy policy = kernels::default_policy());

    // Advances [t, t+dt).
    void step_inplace(SpinorField& spinor, double t) const;
    SpinorField step(const SpinorField& spinor, double t) const;

    double dt() const { return scalar_.dt(); }

private:
    void apply_half_magnetic(SpinorField& spinor) const;

    SchrodingerPropagator scalar_;
    MagneticField bfield_;
    PhysicalParams params_;
    kernels::ExecPolicy policy_;
};

// Exact spectral free flight by an arbitrary time (V = 0 makes the kinetic
// factor the whole propagator).
void free_advance_inplace(ComplexField& field, const PhysicalParams& params,
                          double t,
                          kernels::ExecPolicy policy = kernels::default_policy());

// One-shot wrappers matching the operation contracts.
ComplexField schrodinger_step(const ComplexField& field, const Potential& potential,
                              const PhysicalParams& params, const StepConfig& cfg);
SpinorField pauli_step(const SpinorField& spinor, const MagneticField& bfield,
                       const Potential& potential, const PhysicalParams& params,
                       const StepConfig& cfg, double t = 0.0);

// Repeated stepping with snapshot emission every `snapshot_every` steps
// (0 = no snapshots). t_final must be a multiple of dt within 1e-6 relative.
struct EvolveResult {
    ComplexField final;
    std::vector<double> snapshot_times;
    std::vector<ComplexField> snapshots;
};

EvolveResult evolve(const ComplexField& initial, const SchrodingerPropagator& prop,
                    double t0, double t_final, std::size_t snapshot_every,
                    const std::function<void(const ComplexField&, double)>& observer = {});

struct SpinorEvolveResult {
    SpinorField final;
    std::vector<double> snapshot_times;
    std::vector<SpinorField> snapshots;
};

SpinorEvolveResult evolve(const SpinorField& initial, const PauliPropagator& prop,
                          double t0, double t_final, std::size_t snapshot_every,
                          const std::function<void(const SpinorField&, double)>& observer = {});

// Number of steps implied by (t_final - t0) / dt; throws unless it is an
// integer to 1 part in 1e6.
std::size_t step_count(double t0, double t_final, double dt);

} // namespace pilotwave
