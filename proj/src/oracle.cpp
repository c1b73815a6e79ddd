#include "pilotwave/oracle.hpp"

#include <cmath>

namespace pilotwave::oracle {

double gaussian_width(double sigma0, double t, double mass, double hbar) {
    const double r = hbar * t / (2.0 * mass * sigma0 * sigma0);
    return sigma0 * std::sqrt(1.0 + r * r);
}

std::array<double, 3> gravity_packet_trajectory(const GaussianGravityPacket& p,
                                                double t) {
    if (t < 0.0) throw ValidationError("trajectory time must be >= 0");
    std::array<double, 3> x{};
    for (int a = 0; a < 3; ++a) {
        const double spread =
            1.0 - gaussian_width(p.sigma0[a], t, p.mass, p.hbar) / p.sigma0[a];
        x[a] = p.start[a] + p.v0[a] * t + (p.center[a] - p.start[a]) * spread;
        if (a == 2) x[a] -= 0.5 * p.g * t * t;
    }
    return x;
}

std::array<double, 3> gravity_packet_center(const GaussianGravityPacket& p, double t) {
    std::array<double, 3> x{};
    for (int a = 0; a < 3; ++a) {
        x[a] = p.center[a] + p.v0[a] * t;
        if (a == 2) x[a] -= 0.5 * p.g * t * t;
    }
    return x;
}

ComplexField coherent_state_field(const CoherentState& c, double t, const Grid& grid) {
    if (grid.dims() != 1)
        throw ValidationError("coherent state oracle is one-dimensional");
    const double sh = c.sigma_h();
    if (grid.spacing(0) > sh / 4.0)
        throw ResolutionError("grid spacing exceeds sigma_h/4");

    const double xc = c.center(t);
    const double vc = c.velocity(t);
    const double gamma = -0.5 * c.hbar * c.omega * t - 0.5 * c.mass * xc * vc;
    const double amp = std::pow(2.0 * M_PI * sh * sh, -0.25);

    ComplexField field(grid);
    for (std::size_t i = 0; i < grid.npoints(0); ++i) {
        const double x = grid.coord(0, i);
        const double mag = amp * std::exp(-(x - xc) * (x - xc) / (4.0 * sh * sh));
        const double ph = (c.mass * vc * x + gamma) / c.hbar;
        field.at(i) = cplx(mag * std::cos(ph), mag * std::sin(ph));
    }
    return field;
}

SpinorField postmagnet_spinor(const PostMagnetParams& p, double t, const Grid& grid) {
    if (t < 0.0) throw ValidationError("post-magnet time must be >= 0");
    if (grid.dims() != 1)
        throw ValidationError("post-magnet oracle lives on the z axis");

    const double zc = p.z_delta + p.u * t;
    const double lo = grid.origin(0);
    const double hi = grid.origin(0) + grid.extent(0);
    if (zc + 4.0 * p.sigma0 > hi || -zc - 4.0 * p.sigma0 < lo)
        throw DomainError("post-magnet packets clipped by grid");

    const double amp = std::pow(2.0 * M_PI * p.sigma0 * p.sigma0, -0.25);
    const double wu = std::cos(0.5 * p.theta0);
    const double wd = std::sin(0.5 * p.theta0);
    const double k = p.mass * p.u / p.hbar;

    SpinorField spinor(grid, 2);
    for (std::size_t i = 0; i < grid.npoints(0); ++i) {
        const double z = grid.coord(0, i);
        const double gu =
            amp * std::exp(-(z - zc) * (z - zc) / (4.0 * p.sigma0 * p.sigma0));
        const double gd =
            amp * std::exp(-(z + zc) * (z + zc) / (4.0 * p.sigma0 * p.sigma0));
        spinor.component(0).at(i) =
            wu * gu * cplx(std::cos(k * z), std::sin(k * z));
        // the lower component carries a factor i in this spinor convention
        spinor.component(1).at(i) =
            wd * gd * cplx(0.0, 1.0) * cplx(std::cos(-k * z), std::sin(-k * z));
    }
    return spinor;
}

double fringe_spacing(double lambda_db, double slit_separation, double distance,
                      bool* regime_warning) {
    if (!(lambda_db > 0.0) || !(slit_separation > 0.0) || !(distance > 0.0))
        throw ValidationError("fringe_spacing needs positive arguments");
    if (regime_warning)
        *regime_warning =
            !(distance > 10.0 * slit_separation && slit_separation > 10.0 * lambda_db);
    return lambda_db * distance / slit_separation;
}

} // namespace pilotwave::oracle
