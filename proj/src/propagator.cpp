#include "pilotwave/propagator.hpp"

#include <cmath>

namespace pilotwave {

namespace {

std::vector<double> build_mask(const Grid& grid, const StepConfig& cfg) {
    if (cfg.boundary != StepConfig::Boundary::AbsorbingMask) return {};
    const double w = static_cast<double>(cfg.mask_width);

    auto ramp = [&](std::size_t i, std::size_t n) {
        const double dist = std::min<double>(static_cast<double>(i),
                                             static_cast<double>(n - 1 - i));
        if (dist >= w) return 1.0;
        const double f = 0.5 * (1.0 - std::cos(M_PI * dist / w));
        return std::pow(f, cfg.mask_strength);
    };

    std::vector<double> mask(grid.size(), 1.0);
    if (grid.dims() == 1) {
        for (std::size_t i = 0; i < grid.npoints(0); ++i) mask[i] = ramp(i, grid.npoints(0));
    } else {
        for (std::size_t i = 0; i < grid.npoints(0); ++i)
            for (std::size_t j = 0; j < grid.npoints(1); ++j)
                mask[grid.index(i, j)] =
                    ramp(i, grid.npoints(0)) * ramp(j, grid.npoints(1));
    }
    return mask;
}

} // namespace

SchrodingerPropagator::SchrodingerPropagator(const Grid& grid,
                                             const PhysicalParams& params,
                                             const Potential& potential,
                                             const StepConfig& cfg,
                                             kernels::ExecPolicy policy)
    : grid_(grid), params_(params), cfg_(cfg), policy_(policy) {
    params_.validate();
    cfg_.validate(grid_);

    if (potential.kind() != Potential::Kind::None) {
        const std::vector<double> v = potential.sample(grid_);

        // Phase-aliasing guard on the sampled potential.
        double max_jump = 0.0;
        if (grid_.dims() == 1) {
            for (std::size_t i = 0; i + 1 < grid_.npoints(0); ++i)
                max_jump = std::max(max_jump, std::abs(v[i + 1] - v[i]));
        } else {
            for (std::size_t i = 0; i < grid_.npoints(0); ++i)
                for (std::size_t j = 0; j < grid_.npoints(1); ++j) {
                    if (i + 1 < grid_.npoints(0))
                        max_jump = std::max(max_jump,
                                            std::abs(v[grid_.index(i + 1, j)] -
                                                     v[grid_.index(i, j)]));
                    if (j + 1 < grid_.npoints(1))
                        max_jump = std::max(max_jump,
                                            std::abs(v[grid_.index(i, j + 1)] -
                                                     v[grid_.index(i, j)]));
                }
        }
        if (max_jump * cfg_.dt / params_.hbar >= M_PI / 2.0)
            throw StepSizeError(
                "potential phase jump per cell exceeds pi/2 per step; reduce dt "
                "or refine the grid");

        half_potential_phase_.resize(v.size());
        const double c = -0.5 * cfg_.dt / params_.hbar;
        for (std::size_t i = 0; i < v.size(); ++i)
            half_potential_phase_[i] = cplx(std::cos(c * v[i]), std::sin(c * v[i]));
    }

    kinetic_phase_.resize(grid_.size());
    const double c = -0.5 * params_.hbar * cfg_.dt / params_.mass;
    if (grid_.dims() == 1) {
        for (std::size_t j = 0; j < grid_.npoints(0); ++j) {
            const double k = grid_.wavenumber(0, j);
            kinetic_phase_[j] = cplx(std::cos(c * k * k), std::sin(c * k * k));
        }
    } else {
        for (std::size_t j0 = 0; j0 < grid_.npoints(0); ++j0) {
            const double k0 = grid_.wavenumber(0, j0);
            for (std::size_t j1 = 0; j1 < grid_.npoints(1); ++j1) {
                const double k1 = grid_.wavenumber(1, j1);
                const double ph = c * (k0 * k0 + k1 * k1);
                kinetic_phase_[grid_.index(j0, j1)] = cplx(std::cos(ph), std::sin(ph));
            }
        }
    }

    mask_ = build_mask(grid_, cfg_);
}

void SchrodingerPropagator::apply_half_potential(ComplexField& field) const {
    if (!half_potential_phase_.empty())
        kernels::multiply_inplace(field.data(), half_potential_phase_.data(),
                                  field.size(), policy_);
}

void SchrodingerPropagator::apply_kinetic(ComplexField& field) const {
    if (grid_.dims() == 1) {
        auto plan = kernels::fft_plan(grid_.npoints(0));
        kernels::fft_inplace(*plan, field.data(), false);
        kernels::multiply_inplace(field.data(), kinetic_phase_.data(), field.size(),
                                  policy_);
        kernels::fft_inplace(*plan, field.data(), true);
    } else {
        kernels::fft_2d(field.data(), grid_.npoints(0), grid_.npoints(1), false,
                        policy_);
        kernels::multiply_inplace(field.data(), kinetic_phase_.data(), field.size(),
                                  policy_);
        kernels::fft_2d(field.data(), grid_.npoints(0), grid_.npoints(1), true,
                        policy_);
    }
}

void SchrodingerPropagator::apply_mask(ComplexField& field) const {
    if (!mask_.empty())
        kernels::scale_inplace(field.data(), mask_.data(), field.size(), policy_);
}

void SchrodingerPropagator::check_finite(const ComplexField& field) const {
    if (!kernels::all_finite(field.data(), field.size()))
        throw BlowupError("non-finite amplitude detected during propagation");
}

void SchrodingerPropagator::step_inplace(ComplexField& field) const {
    if (!field.grid().same_as(grid_))
        throw ValidationError("field grid does not match propagator grid");
    apply_half_potential(field);
    apply_kinetic(field);
    apply_half_potential(field);
    apply_mask(field);
    check_finite(field);
}

ComplexField SchrodingerPropagator::step(const ComplexField& field) const {
    ComplexField out = field;
    step_inplace(out);
    return out;
}

// ---- Pauli ------------------------------------------------------------------

PauliPropagator::PauliPropagator(const Grid& grid, const PhysicalParams& params,
                                 const Potential& potential,
                                 const MagneticField& bfield, const StepConfig& cfg,
                                 kernels::ExecPolicy policy)
    : scalar_(grid, params, potential, cfg, policy),
      bfield_(bfield),
      params_(params),
      policy_(policy) {}

void PauliPropagator::apply_half_magnetic(SpinorField& spinor) const {
    const Grid& g = spinor.grid();
    const double phi_scale = 0.5 * scalar_.dt() * params_.mu_bohr / params_.hbar;

    cplx* up = spinor.component(0).data();
    cplx* dn = spinor.component(1).data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
    const std::size_t n1 = g.npoints(1);
    const bool two_d = g.dims() == 2;

    // U = cos(phi) I - i sin(phi) (Bhat . sigma), phi = mu_B |B| dt / (2 hbar)
    auto rotate_cell = [&](std::ptrdiff_t idx) {
        const std::size_t i0 = static_cast<std::size_t>(idx) / n1;
        const std::size_t i1 = static_cast<std::size_t>(idx) % n1;
        const double z = g.coord(0, i0);
        const double x = two_d ? g.coord(1, i1) : 0.0;
        const auto B = bfield_.at(z, x);
        const double bmag = std::sqrt(B[0] * B[0] + B[1] * B[1] + B[2] * B[2]);
        if (bmag == 0.0) return;
        const double phi = phi_scale * bmag;
        const double c = std::cos(phi);
        const double s = std::sin(phi) / bmag;

        const cplx u11(c, -s * B[2]);
        const cplx u12(-s * B[1], -s * B[0]);
        const cplx u21(s * B[1], -s * B[0]);
        const cplx u22(c, s * B[2]);

        const cplx a = up[idx], b = dn[idx];
        up[idx] = u11 * a + u12 * b;
        dn[idx] = u21 * a + u22 * b;
    };

    if (policy_ == kernels::ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) rotate_cell(i);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) rotate_cell(i);
    }
}

void PauliPropagator::step_inplace(SpinorField& spinor, double t) const {
    if (spinor.ncomponents() != 2)
        throw ValidationError("pauli_step needs a 2-component spinor");

    const bool magnetic = bfield_.active(t);
    for (std::size_t c = 0; c < 2; ++c)
        scalar_.apply_half_potential(spinor.component(c));
    if (magnetic) apply_half_magnetic(spinor);

    for (std::size_t c = 0; c < 2; ++c) scalar_.apply_kinetic(spinor.component(c));

    if (magnetic) apply_half_magnetic(spinor);
    for (std::size_t c = 0; c < 2; ++c) {
        scalar_.apply_half_potential(spinor.component(c));
        scalar_.apply_mask(spinor.component(c));
        scalar_.check_finite(spinor.component(c));
    }
}

SpinorField PauliPropagator::step(const SpinorField& spinor, double t) const {
    SpinorField out = spinor;
    step_inplace(out, t);
    return out;
}

// ---- helpers ------------------------------------------------------------------

void free_advance_inplace(ComplexField& field, const PhysicalParams& params,
                          double t, kernels::ExecPolicy policy) {
    if (t == 0.0) return;
    const Grid& g = field.grid();
    std::vector<cplx> phase(g.size());
    const double c = -0.5 * params.hbar * t / params.mass;
    if (g.dims() == 1) {
        for (std::size_t j = 0; j < g.npoints(0); ++j) {
            const double k = g.wavenumber(0, j);
            phase[j] = cplx(std::cos(c * k * k), std::sin(c * k * k));
        }
        auto plan = kernels::fft_plan(g.npoints(0));
        kernels::fft_inplace(*plan, field.data(), false);
        kernels::multiply_inplace(field.data(), phase.data(), field.size(), policy);
        kernels::fft_inplace(*plan, field.data(), true);
    } else {
        for (std::size_t j0 = 0; j0 < g.npoints(0); ++j0)
            for (std::size_t j1 = 0; j1 < g.npoints(1); ++j1) {
                const double k0 = g.wavenumber(0, j0);
                const double k1 = g.wavenumber(1, j1);
                const double ph = c * (k0 * k0 + k1 * k1);
                phase[g.index(j0, j1)] = cplx(std::cos(ph), std::sin(ph));
            }
        kernels::fft_2d(field.data(), g.npoints(0), g.npoints(1), false, policy);
        kernels::multiply_inplace(field.data(), phase.data(), field.size(), policy);
        kernels::fft_2d(field.data(), g.npoints(0), g.npoints(1), true, policy);
    }
}

ComplexField schrodinger_step(const ComplexField& field, const Potential& potential,
                              const PhysicalParams& params, const StepConfig& cfg) {
    SchrodingerPropagator prop(field.grid(), params, potential, cfg);
    return prop.step(field);
}

SpinorField pauli_step(const SpinorField& spinor, const MagneticField& bfield,
                       const Potential& potential, const PhysicalParams& params,
                       const StepConfig& cfg, double t) {
    PauliPropagator prop(spinor.grid(), params, potential, bfield, cfg);
    return prop.step(spinor, t);
}

std::size_t step_count(double t0, double t_final, double dt) {
    if (t_final < t0) throw ValidationError("t_final must be >= t0");
    const double span = t_final - t0;
    if (span == 0.0) return 0;
    const double raw = span / dt;
    const double rounded = std::round(raw);
    if (rounded < 1.0 || std::abs(raw - rounded) > 1e-6 * rounded)
        throw ValidationError("t_final - t0 must be a multiple of dt (1e-6)");
    return static_cast<std::size_t>(rounded);
}

EvolveResult evolve(const ComplexField& initial, const SchrodingerPropagator& prop,
                    double t0, double t_final, std::size_t snapshot_every,
                    const std::function<void(const ComplexField&, double)>& observer) {
    const std::size_t nsteps = step_count(t0, t_final, prop.dt());
    EvolveResult result{initial, {}, {}};
    for (std::size_t s = 1; s <= nsteps; ++s) {
        prop.step_inplace(result.final);
        const double t = t0 + prop.dt() * static_cast<double>(s);
        if (snapshot_every != 0 && s % snapshot_every == 0) {
            result.snapshot_times.push_back(t);
            result.snapshots.push_back(result.final);
        }
        if (observer && snapshot_every != 0 && s % snapshot_every == 0)
            observer(result.final, t);
    }
    return result;
}

SpinorEvolveResult evolve(const SpinorField& initial, const PauliPropagator& prop,
                          double t0, double t_final, std::size_t snapshot_every,
                          const std::function<void(const SpinorField&, double)>& observer) {
    const std::size_t nsteps = step_count(t0, t_final, prop.dt());
    SpinorEvolveResult result{initial, {}, {}};
    for (std::size_t s = 1; s <= nsteps; ++s) {
        const double t_before = t0 + prop.dt() * static_cast<double>(s - 1);
        prop.step_inplace(result.final, t_before);
        const double t = t0 + prop.dt() * static_cast<double>(s);
        if (snapshot_every != 0 && s % snapshot_every == 0) {
            result.snapshot_times.push_back(t);
            result.snapshots.push_back(result.final);
        }
        if (observer && snapshot_every != 0 && s % snapshot_every == 0)
            observer(result.final, t);
    }
    return result;
}

} // namespace pilotwave
