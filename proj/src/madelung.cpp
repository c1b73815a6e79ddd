#include "pilotwave/madelung.hpp"

#include <cmath>

namespace pilotwave {

namespace {

// Spectral derivative along one axis; result overwrites `out`.
void spectral_gradient(const ComplexField& field, int axis, ComplexField& out,
                       kernels::ExecPolicy policy) {
    const Grid& g = field.grid();
    out = field;

    if (g.dims() == 1) {
        auto plan = kernels::fft_plan(g.npoints(0));
        kernels::fft_inplace(*plan, out.data(), false);
        for (std::size_t j = 0; j < g.npoints(0); ++j) {
            const double k = g.wavenumber(0, j);
            out.values()[j] *= cplx(0.0, k);
        }
        kernels::fft_inplace(*plan, out.data(), true);
        return;
    }

    kernels::fft_2d(out.data(), g.npoints(0), g.npoints(1), false, policy);
    for (std::size_t j0 = 0; j0 < g.npoints(0); ++j0)
        for (std::size_t j1 = 0; j1 < g.npoints(1); ++j1) {
            const double k = g.wavenumber(axis, axis == 0 ? j0 : j1);
            out.values()[g.index(j0, j1)] *= cplx(0.0, k);
        }
    kernels::fft_2d(out.data(), g.npoints(0), g.npoints(1), true, policy);
}

// -(hbar^2/2m) Lap(sqrt rho)/sqrt(rho), centered differences, periodic wrap.
std::vector<double> quantum_potential(const Grid& g, const std::vector<double>& rho,
                                      const std::vector<std::uint8_t>& valid,
                                      double hbar, double mass) {
    std::vector<double> sq(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) sq[i] = std::sqrt(std::max(rho[i], 0.0));

    std::vector<double> q(rho.size(), 0.0);
    const double pref = -hbar * hbar / (2.0 * mass);

    if (g.dims() == 1) {
        const std::size_t n = g.npoints(0);
        const double h2 = g.spacing(0) * g.spacing(0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!valid[i]) continue;
            const double lap =
                (sq[(i + 1) % n] - 2.0 * sq[i] + sq[(i + n - 1) % n]) / h2;
            q[i] = pref * lap / sq[i];
        }
    } else {
        const std::size_t n0 = g.npoints(0), n1 = g.npoints(1);
        const double h0 = g.spacing(0) * g.spacing(0);
        const double h1 = g.spacing(1) * g.spacing(1);
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) {
                const std::size_t idx = g.index(i, j);
                if (!valid[idx]) continue;
                const double lap =
                    (sq[g.index((i + 1) % n0, j)] - 2.0 * sq[idx] +
                     sq[g.index((i + n0 - 1) % n0, j)]) / h0 +
                    (sq[g.index(i, (j + 1) % n1)] - 2.0 * sq[idx] +
                     sq[g.index(i, (j + n1 - 1) % n1)]) / h1;
                q[idx] = pref * lap / sq[idx];
            }
    }
    return q;
}

void finalize_mask(MadelungView& view) {
    double rho_max = 0.0;
    for (double r : view.rho) rho_max = std::max(rho_max, r);
    view.eps_rho = 1e-12 * rho_max;
    view.valid.resize(view.rho.size());
    for (std::size_t i = 0; i < view.rho.size(); ++i)
        view.valid[i] = view.rho[i] >= view.eps_rho ? 1 : 0;
}

} // namespace

MadelungView madelung_decompose(const ComplexField& field, const PhysicalParams& params,
                                const MadelungOptions& opts) {
    params.validate();
    const Grid& g = field.grid();

    MadelungView view;
    view.grid = g;
    view.rho.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) view.rho[i] = std::norm(field.values()[i]);
    finalize_mask(view);

    ComplexField grad(g);
    for (int axis = 0; axis < g.dims(); ++axis) {
        spectral_gradient(field, axis, grad, opts.policy);
        auto& v = view.velocity[axis];
        v.assign(g.size(), 0.0);
        const double pref = params.hbar / params.mass;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!view.valid[i]) continue;
            const cplx p = field.values()[i];
            const cplx dp = grad.values()[i];
            // Im(psi* dpsi)
            v[i] = pref * (p.real() * dp.imag() - p.imag() * dp.real()) / view.rho[i];
        }
    }

    if (opts.with_qpotential)
        view.qpotential = quantum_potential(g, view.rho, view.valid, params.hbar,
                                            params.mass);
    return view;
}

MadelungView madelung_decompose(const SpinorField& spinor, const PhysicalParams& params,
                                const MadelungOptions& opts) {
    params.validate();
    const Grid& g = spinor.grid();
    const std::size_t ncomp = spinor.ncomponents();

    MadelungView view;
    view.grid = g;
    view.rho.assign(g.size(), 0.0);
    for (std::size_t c = 0; c < ncomp; ++c)
        for (std::size_t i = 0; i < g.size(); ++i)
            view.rho[i] += std::norm(spinor.component(c).values()[i]);
    finalize_mask(view);

    ComplexField grad(g);
    for (int axis = 0; axis < g.dims(); ++axis) {
        auto& v = view.velocity[axis];
        v.assign(g.size(), 0.0);
        for (std::size_t c = 0; c < ncomp; ++c) {
            spectral_gradient(spinor.component(c), axis, grad, opts.policy);
            const auto& p = spinor.component(c).values();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!view.valid[i]) continue;
                const cplx dp = grad.values()[i];
                v[i] += p[i].real() * dp.imag() - p[i].imag() * dp.real();
            }
        }
        const double pref = params.hbar / params.mass;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (view.valid[i]) v[i] = pref * v[i] / view.rho[i];
    }

    if (opts.with_spin && ncomp == 2) {
        const auto& up = spinor.component(0).values();
        const auto& dn = spinor.component(1).values();
        for (auto& s : view.spin) s.assign(g.size(), 0.0);
        const double half_h = 0.5 * params.hbar;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!view.valid[i]) continue;
            const cplx cross = std::conj(up[i]) * dn[i];
            view.spin[0][i] = half_h * 2.0 * cross.real() / view.rho[i];
            view.spin[1][i] = half_h * 2.0 * cross.imag() / view.rho[i];
            view.spin[2][i] =
                half_h * (std::norm(up[i]) - std::norm(dn[i])) / view.rho[i];
        }
    }

    if (opts.with_qpotential)
        view.qpotential = quantum_potential(g, view.rho, view.valid, params.hbar,
                                            params.mass);
    return view;
}

MadelungView decimate(const MadelungView& view, std::size_t factor) {
    if (factor <= 1) return view;
    const Grid& g = view.grid;

    auto pick = [&](const std::vector<double>& src, std::vector<double>& dst,
                    const Grid& cg) {
        if (src.empty()) return;
        dst.resize(cg.size());
        if (g.dims() == 1) {
            for (std::size_t i = 0; i < cg.npoints(0); ++i) dst[i] = src[i * factor];
        } else {
            for (std::size_t i = 0; i < cg.npoints(0); ++i)
                for (std::size_t j = 0; j < cg.npoints(1); ++j)
                    dst[cg.index(i, j)] = src[g.index(i * factor, j * factor)];
        }
    };

    MadelungView out;
    if (g.dims() == 1) {
        out.grid = Grid::line(g.npoints(0) / factor, g.origin(0),
                              g.spacing(0) * static_cast<double>(factor));
    } else {
        out.grid = Grid::plane(g.npoints(0) / factor, g.npoints(1) / factor,
                               g.origin(0), g.origin(1),
                               g.spacing(0) * static_cast<double>(factor),
                               g.spacing(1) * static_cast<double>(factor));
    }
    out.eps_rho = view.eps_rho;
    pick(view.rho, out.rho, out.grid);
    for (int a = 0; a < 2; ++a) pick(view.velocity[a], out.velocity[a], out.grid);
    pick(view.qpotential, out.qpotential, out.grid);
    for (int s = 0; s < 3; ++s) pick(view.spin[s], out.spin[s], out.grid);

    out.valid.resize(out.grid.size());
    if (g.dims() == 1) {
        for (std::size_t i = 0; i < out.grid.npoints(0); ++i)
            out.valid[i] = view.valid[i * factor];
    } else {
        for (std::size_t i = 0; i < out.grid.npoints(0); ++i)
            for (std::size_t j = 0; j < out.grid.npoints(1); ++j)
                out.valid[out.grid.index(i, j)] =
                    view.valid[g.index(i * factor, j * factor)];
    }
    return out;
}

// ---- interpolation ---------------------------------------------------------

namespace {

struct StencilWeights {
    std::size_t i0, i1; // base cell per axis
    double f0, f1;      // fractional offsets
    bool ok;
};

StencilWeights locate(const Grid& g, std::array<double, 2> x) {
    StencilWeights w{0, 0, 0.0, 0.0, true};
    for (int a = 0; a < g.dims(); ++a) {
        const double u = (x[a] - g.origin(a)) / g.spacing(a);
        if (u < 0.0 || u >= static_cast<double>(g.npoints(a) - 1)) {
            w.ok = false;
            return w;
        }
        const auto base = static_cast<std::size_t>(u);
        if (a == 0) { w.i0 = base; w.f0 = u - static_cast<double>(base); }
        else        { w.i1 = base; w.f1 = u - static_cast<double>(base); }
    }
    return w;
}

template <typename Fetch>
std::optional<double> interp(const MadelungView& v, std::array<double, 2> x,
                             Fetch&& fetch) {
    const Grid& g = v.grid;
    const StencilWeights w = locate(g, x);
    if (!w.ok) return std::nullopt;

    if (g.dims() == 1) {
        if (!v.valid[w.i0] || !v.valid[w.i0 + 1]) return std::nullopt;
        return (1.0 - w.f0) * fetch(w.i0) + w.f0 * fetch(w.i0 + 1);
    }

    const std::size_t c00 = g.index(w.i0, w.i1);
    const std::size_t c01 = g.index(w.i0, w.i1 + 1);
    const std::size_t c10 = g.index(w.i0 + 1, w.i1);
    const std::size_t c11 = g.index(w.i0 + 1, w.i1 + 1);
    if (!v.valid[c00] || !v.valid[c01] || !v.valid[c10] || !v.valid[c11])
        return std::nullopt;
    return (1.0 - w.f0) * ((1.0 - w.f1) * fetch(c00) + w.f1 * fetch(c01)) +
           w.f0 * ((1.0 - w.f1) * fetch(c10) + w.f1 * fetch(c11));
}

} // namespace

std::optional<std::array<double, 2>> MadelungView::velocity_at(
    std::array<double, 2> x) const {
    std::array<double, 2> out{0.0, 0.0};
    for (int a = 0; a < grid.dims(); ++a) {
        auto va = grid.dims() == 1
                      ? interp(*this, x, [&](std::size_t i) { return velocity[a][i]; })
                      : interp(*this, x, [&](std::size_t i) { return velocity[a][i]; });
        if (!va) return std::nullopt;
        out[a] = *va;
    }
    return out;
}

std::optional<double> MadelungView::rho_at(std::array<double, 2> x) const {
    return interp(*this, x, [&](std::size_t i) { return rho[i]; });
}

std::optional<std::array<double, 3>> MadelungView::spin_at(
    std::array<double, 2> x) const {
    if (!has_spin()) return std::nullopt;
    std::array<double, 3> s{};
    for (int c = 0; c < 3; ++c) {
        auto sc = interp(*this, x, [&](std::size_t i) { return spin[c][i]; });
        if (!sc) return std::nullopt;
        s[c] = *sc;
    }
    return s;
}

double scalar_velocity(const ComplexField& field, std::array<double, 2> at,
                       const PhysicalParams& params, int axis) {
    MadelungOptions opts;
    opts.with_qpotential = false;
    const MadelungView view = madelung_decompose(field, params, opts);
    auto v = view.velocity_at(at);
    if (!v) throw LowDensityError("velocity query in masked low-density region");
    return (*v)[axis];
}

std::array<double, 2> spinor_velocity(const SpinorField& spinor,
                                      std::array<double, 2> at,
                                      const PhysicalParams& params) {
    MadelungOptions opts;
    opts.with_qpotential = false;
    opts.with_spin = false;
    const MadelungView view = madelung_decompose(spinor, params, opts);
    auto v = view.velocity_at(at);
    if (!v) throw LowDensityError("velocity query in masked low-density region");
    return *v;
}

std::array<double, 2> spin_angles_from_vector(const std::array<double, 3>& s) {
    const double mag = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    if (!(mag > 0.0)) return {0.0, 0.0};
    // theta from the z component only; avoids atan2 branch trouble at poles
    const double theta = std::acos(std::clamp(s[2] / mag, -1.0, 1.0));
    const double st = std::sqrt(s[0] * s[0] + s[1] * s[1]);
    if (st < 1e-12 * mag) return {theta, 0.0};
    return {theta, std::atan2(s[0], s[1])};
}

std::array<double, 2> spin_vector(const SpinorField& spinor, std::array<double, 2> at) {
    PhysicalParams unit; // spin direction does not depend on mass/hbar scale
    MadelungOptions opts;
    opts.with_qpotential = false;
    const MadelungView view = madelung_decompose(spinor, unit, opts);
    auto s = view.spin_at(at);
    if (!s) throw LowDensityError("spin query in masked low-density region");
    return spin_angles_from_vector(*s);
}

} // namespace pilotwave
