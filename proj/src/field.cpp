#include "pilotwave/field.hpp"

#include <cmath>

namespace pilotwave {

ComplexField gaussian_packet(const Grid& grid, std::array<double, 2> center,
                             std::array<double, 2> sigma0,
                             std::array<double, 2> velocity,
                             const PhysicalParams& params) {
    params.validate();

    for (int a = 0; a < grid.dims(); ++a) {
        if (!(sigma0[a] > 0.0)) throw ValidationError("sigma0 must be positive");

        const double lo = grid.origin(a);
        const double hi = grid.origin(a) + grid.extent(a);
        if (center[a] - 4.0 * sigma0[a] < lo || center[a] + 4.0 * sigma0[a] > hi)
            throw DomainError("gaussian packet clipped by grid boundary");

        if (grid.spacing(a) > sigma0[a] / 4.0)
            throw ResolutionError("grid spacing exceeds sigma0/4");
        if (velocity[a] != 0.0) {
            const double lambda_db =
                2.0 * M_PI * params.hbar / (params.mass * std::abs(velocity[a]));
            if (grid.spacing(a) > lambda_db / 4.0)
                throw ResolutionError("grid spacing exceeds de Broglie wavelength / 4");
        }
    }

    ComplexField field(grid);
    const double k0 = params.mass * velocity[0] / params.hbar;
    const double k1 = params.mass * velocity[1] / params.hbar;

    if (grid.dims() == 1) {
        const double amp = std::pow(2.0 * M_PI * sigma0[0] * sigma0[0], -0.25);
        for (std::size_t i = 0; i < grid.npoints(0); ++i) {
            const double x = grid.coord(0, i) - center[0];
            const double mag = amp * std::exp(-x * x / (4.0 * sigma0[0] * sigma0[0]));
            const double ph = k0 * grid.coord(0, i);
            field.at(i) = cplx(mag * std::cos(ph), mag * std::sin(ph));
        }
    } else {
        const double amp = std::pow(2.0 * M_PI * sigma0[0] * sigma0[0], -0.25) *
                           std::pow(2.0 * M_PI * sigma0[1] * sigma0[1], -0.25);
        for (std::size_t i = 0; i < grid.npoints(0); ++i) {
            const double x = grid.coord(0, i) - center[0];
            const double gx = std::exp(-x * x / (4.0 * sigma0[0] * sigma0[0]));
            for (std::size_t j = 0; j < grid.npoints(1); ++j) {
                const double y = grid.coord(1, j) - center[1];
                const double mag =
                    amp * gx * std::exp(-y * y / (4.0 * sigma0[1] * sigma0[1]));
                const double ph = k0 * grid.coord(0, i) + k1 * grid.coord(1, j);
                field.at(i, j) = cplx(mag * std::cos(ph), mag * std::sin(ph));
            }
        }
    }

    normalize(field); // analytic prefactor is already right; this absorbs grid truncation
    return field;
}

SpinorField spinor_packet(const Grid& grid, std::array<double, 2> center,
                          std::array<double, 2> sigma0,
                          std::array<double, 2> velocity, double theta0,
                          double phi0, const PhysicalParams& params) {
    const ComplexField envelope = gaussian_packet(grid, center, sigma0, velocity, params);
    const cplx up = std::cos(0.5 * theta0) *
                    cplx(std::cos(0.5 * phi0), std::sin(0.5 * phi0));
    const cplx dn = std::sin(0.5 * theta0) * cplx(0.0, 1.0) *
                    cplx(std::cos(0.5 * phi0), -std::sin(0.5 * phi0));

    SpinorField spinor(grid, 2);
    spinor.component(0) = envelope;
    spinor.component(1) = envelope;
    for (auto& v : spinor.component(0).values()) v *= up;
    for (auto& v : spinor.component(1).values()) v *= dn;
    return spinor;
}

double norm2(const ComplexField& field, kernels::ExecPolicy policy) {
    return kernels::sum_abs2(field.data(), field.size(), policy) *
           field.grid().cell_volume();
}

double norm2(const SpinorField& field, kernels::ExecPolicy policy) {
    double total = 0.0;
    for (std::size_t c = 0; c < field.ncomponents(); ++c)
        total += norm2(field.component(c), policy);
    return total;
}

void normalize(ComplexField& field) {
    const double n2 = norm2(field);
    if (!(n2 > 0.0)) throw NormalizationError("cannot normalize zero field");
    field.scale(1.0 / std::sqrt(n2));
}

void normalize(SpinorField& field) {
    const double n2 = norm2(field);
    if (!(n2 > 0.0)) throw NormalizationError("cannot normalize zero spinor");
    const double s = 1.0 / std::sqrt(n2);
    for (std::size_t c = 0; c < field.ncomponents(); ++c) field.component(c).scale(s);
}

namespace {

double weighted_position(const ComplexField& field, int axis, double& mass_out) {
    const Grid& g = field.grid();
    std::vector<double> coord(field.size());
    if (g.dims() == 1) {
        for (std::size_t i = 0; i < g.npoints(0); ++i) coord[i] = g.coord(0, i);
    } else {
        for (std::size_t i = 0; i < g.npoints(0); ++i)
            for (std::size_t j = 0; j < g.npoints(1); ++j)
                coord[g.index(i, j)] = g.coord(axis, axis == 0 ? i : j);
    }
    const double num = kernels::sum_weighted_abs2(field.data(), coord.data(),
                                                  field.size(),
                                                  kernels::default_policy());
    mass_out = kernels::sum_abs2(field.data(), field.size(),
                                 kernels::default_policy());
    return num;
}

} // namespace

double expectation_position(const ComplexField& field, int axis,
                            kernels::ExecPolicy policy) {
    const double n2 = norm2(field, policy);
    if (std::abs(n2 - 1.0) > 1e-6)
        throw NormalizationError("expectation_position requires a normalized field");
    double mass = 0.0;
    const double num = weighted_position(field, axis, mass);
    return num * field.grid().cell_volume();
}

double component_centroid(const ComplexField& field, int axis) {
    double mass = 0.0;
    const double num = weighted_position(field, axis, mass);
    if (!(mass > 0.0)) throw LowDensityError("component carries no density");
    return num / mass;
}

} // namespace pilotwave
