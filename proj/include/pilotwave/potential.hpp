#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pilotwave/grid.hpp"

namespace pilotwave {

// Scalar external potential. Linear covers M g.x (and any uniform force),
// Sampled covers the general V(x_G) case and the two-body pair coupling.
class Potential {
public:
    enum class Kind { None, Linear, Harmonic, Sampled };

    static Potential none() { return Potential(Kind::None); }

    static Potential linear(std::array<double, 2> slope) {
        Potential p(Kind::Linear);
        p.slope_ = slope;
        return p;
    }

    static Potential harmonic(double mass, double omega,
                              std::array<double, 2> center = {0.0, 0.0}) {
        Potential p(Kind::Harmonic);
        p.mass_ = mass;
        p.omega_ = omega;
        p.center_ = center;
        return p;
    }

    // fn(x0, x1); for 1D grids x1 is passed as 0.
    static Potential sampled(std::function<double(double, double)> fn) {
        Potential p(Kind::Sampled);
        p.fn_ = std::move(fn);
        return p;
    }

    Kind kind() const { return kind_; }

    double value(double x0, double x1 = 0.0) const {
        switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Linear: return slope_[0] * x0 + slope_[1] * x1;
        case Kind::Harmonic: {
            const double dx = x0 - center_[0];
            const double dy = x1 - center_[1];
            return 0.5 * mass_ * omega_ * omega_ * (dx * dx + dy * dy);
        }
        case Kind::Sampled: return fn_(x0, x1);
        }
        return 0.0;
    }

    std::vector<double> sample(const Grid& grid) const {
        std::vector<double> v(grid.size());
        if (grid.dims() == 1) {
            for (std::size_t i = 0; i < grid.npoints(0); ++i)
                v[i] = value(grid.coord(0, i));
        } else {
            for (std::size_t i = 0; i < grid.npoints(0); ++i)
                for (std::size_t j = 0; j < grid.npoints(1); ++j)
                    v[grid.index(i, j)] = value(grid.coord(0, i), grid.coord(1, j));
        }
        for (double x : v)
            if (!std::isfinite(x))
                throw ValidationError("sampled potential is not finite on the grid");
        return v;
    }

private:
    explicit Potential(Kind k) : kind_(k) {}

    Kind kind_;
    std::array<double, 2> slope_{0.0, 0.0};
    double mass_ = 0.0, omega_ = 0.0;
    std::array<double, 2> center_{0.0, 0.0};
    std::function<double(double, double)> fn_;
};

// Stern-Gerlach style field: B_z = B0 - B'0 z, B_x = B'0 x, B_y = 0,
// active during [t_on, t_off). Axis 0 of the grid is z; axis 1 (if present) x.
// The stated geometry is divergence-free by construction.
struct MagneticField {
    double b0 = 0.0;      // T
    double bprime = 0.0;  // T/m
    double t_on = 0.0;
    double t_off = 0.0;

    bool active(double t) const { return t >= t_on && t < t_off; }

    std::array<double, 3> at(double z, double x) const {
        return {bprime * x, 0.0, b0 - bprime * z};
    }
};

struct StepConfig {
    enum class Boundary { Periodic, AbsorbingMask };

    double dt = 0.0;
    Boundary boundary = Boundary::Periodic;
    std::size_t mask_width = 0;   // cells per edge
    double mask_strength = 1.0;   // exponent on the cosine ramp

    void validate(const Grid& grid) const {
        if (!(dt > 0.0)) throw ValidationError("dt must be positive");
        if (boundary == Boundary::AbsorbingMask) {
            for (int a = 0; a < grid.dims(); ++a)
                if (mask_width >= grid.npoints(a) / 4)
                    throw ValidationError("absorbing width must stay below n_points/4");
        }
    }
};

} // namespace pilotwave
