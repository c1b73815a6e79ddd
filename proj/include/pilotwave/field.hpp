#pragma once

#include <array>
#include <vector>

#include "pilotwave/grid.hpp"
#include "pilotwave/kernels.hpp"

namespace pilotwave {

// Physical parameter set in whatever unit system the caller works in.
// Scenarios run in per-scenario scaled units; nothing here assumes SI.
struct PhysicalParams {
    double mass = 1.0;
    double hbar = 1.0;
    std::array<double, 2> gravity{0.0, 0.0}; // acceleration per grid axis
    double mu_bohr = 0.0;                    // magneton for spinor runs
    double charge = 0.0;                     // Q of the sampled-potential coupling

    void validate() const {
        if (!(mass > 0.0)) throw ValidationError("mass must be positive");
        if (!(hbar > 0.0)) throw ValidationError("hbar must be positive");
    }
};

// Complex amplitudes on a grid, |psi|^2 integrating to 1 for normalized states.
class ComplexField {
public:
    ComplexField(Grid grid, cplx fill = cplx(0.0, 0.0))
        : grid_(grid), values_(grid.size(), fill) {}

    const Grid& grid() const { return grid_; }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }
    cplx* data() { return values_.data(); }
    const cplx* data() const { return values_.data(); }
    std::size_t size() const { return values_.size(); }

    cplx& at(std::size_t i0, std::size_t i1 = 0) { return values_[grid_.index(i0, i1)]; }
    const cplx& at(std::size_t i0, std::size_t i1 = 0) const {
        return values_[grid_.index(i0, i1)];
    }

    void scale(double s) {
        for (auto& v : values_) v *= s;
    }

private:
    Grid grid_;
    std::vector<cplx> values_;
};

// 2 components for one spin-1/2 particle, 4 for the entangled pair.
class SpinorField {
public:
    SpinorField(Grid grid, std::size_t ncomp)
        : components_(ncomp, ComplexField(grid)) {
        if (ncomp != 2 && ncomp != 4)
            throw ValidationError("spinor needs 2 or 4 components");
    }

    explicit SpinorField(std::vector<ComplexField> comps)
        : components_(std::move(comps)) {
        if (components_.size() != 2 && components_.size() != 4)
            throw ValidationError("spinor needs 2 or 4 components");
        for (const auto& c : components_)
            if (!c.grid().same_as(grid()))
                throw ValidationError("spinor components must share one grid");
    }

    const Grid& grid() const { return components_.front().grid(); }
    std::size_t ncomponents() const { return components_.size(); }
    ComplexField& component(std::size_t i) { return components_[i]; }
    const ComplexField& component(std::size_t i) const { return components_[i]; }

private:
    std::vector<ComplexField> components_;
};

// ---- operations -----------------------------------------------------------

// Normalized Gaussian with linear phase exp(i m v.x / hbar). 1D or 2D
// isotropic-in-form (per-axis sigma/center/velocity).
ComplexField gaussian_packet(const Grid& grid, std::array<double, 2> center,
                             std::array<double, 2> sigma0,
                             std::array<double, 2> velocity,
                             const PhysicalParams& params);

inline ComplexField gaussian_packet(const Grid& grid, double center, double sigma0,
                                    double velocity, const PhysicalParams& params) {
    return gaussian_packet(grid, {center, 0.0}, {sigma0, sigma0}, {velocity, 0.0},
                           params);
}

// Spin-1/2 packet: the Gaussian modulus carrying the spin orientation
// (theta0, phi0) as (cos(theta0/2) e^{i phi0/2}, i sin(theta0/2) e^{-i phi0/2}).
SpinorField spinor_packet(const Grid& grid, std::array<double, 2> center,
                          std::array<double, 2> sigma0,
                          std::array<double, 2> velocity, double theta0,
                          double phi0, const PhysicalParams& params);

// Riemann sum of |values|^2 times cell volume.
double norm2(const ComplexField& field,
             kernels::ExecPolicy policy = kernels::default_policy());
double norm2(const SpinorField& field,
             kernels::ExecPolicy policy = kernels::default_policy());

void normalize(ComplexField& field);
void normalize(SpinorField& field);

// <x> along `axis`; requires |norm2 - 1| <= 1e-6.
double expectation_position(const ComplexField& field, int axis = 0,
                            kernels::ExecPolicy policy = kernels::default_policy());

// Mean position of an (unnormalized) component: sum x rho / sum rho.
double component_centroid(const ComplexField& field, int axis = 0);

} // namespace pilotwave
