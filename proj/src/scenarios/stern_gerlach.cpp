#include <cmath>

#include "pilotwave/kernels.hpp"
#include "pilotwave/oracle.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/scenario.hpp"
#include "pilotwave/stats.hpp"

// Stern-Gerlach with full silver-atom parameters, z axis gridded, beam axis
// classical (y = v t). The post-magnet state carries a phase ramp
// exp(+-i m u z / hbar) whose wavelength (3.7 nm against a 1.7 mm domain)
// forces the propagation grid to ~1e6 points. The kinematic layer does not
// need that resolution: each spin component occupies a narrow spectral band
// around its momentum centroid, so views are built from demodulated
// envelopes - an exact band extraction, not an approximation - and the free
// flight advances the envelopes analytically in k space.
//
// Scaled units: L0 = sigma0, T0 = sigma0 / u_formula (so u_scaled ~= 1).

namespace pilotwave {

namespace detail {

ScenarioSchema stern_gerlach_schema() {
    ScenarioSchema s;
    s.id = "stern_gerlach";
    s.summary = "silver-atom spin measurement, Pauli evolution + pilot paths";
    s.params = {
        {"mass", 1.8e-25, 1e-30, 1e-20, "atom mass, kg"},
        {"hbar", si::hbar, 1e-40, 1e-30, "hbar, J s"},
        {"mu_bohr", si::mu_bohr, 1e-30, 1e-18, "magnetic moment, J/T"},
        {"b0", 5.0, 0.0, 100.0, "field offset B0, T"},
        {"bprime", 1e3, 1e-3, 1e6, "field gradient B'0, T/m"},
        {"v_beam", 500.0, 1.0, 1e5, "longitudinal speed, m/s"},
        {"field_length", 0.01, 1e-4, 1.0, "magnet length, m"},
        {"plate_distance", 0.2, 1e-3, 10.0, "free flight after the magnet, m"},
        {"sigma0", 1e-4, 1e-7, 1e-2, "transverse packet width, m"},
        {"theta0", M_PI / 3.0, 0.0, M_PI, "initial spin polar angle, rad"},
        {"phi0", 0.0, -M_PI, M_PI, "initial spin azimuth, rad"},
        {"n_grid", 1048576, 4096, 1 << 22, "fine grid points (power of two)"},
        {"half_extent_sigma", 9.0, 4.0, 64.0, "half extent in units of sigma0"},
        {"view_points", 2048, 256, 16384, "kinematic view grid points"},
        {"in_field_steps", 16, 2, 512, "Pauli steps inside the magnet"},
        {"flight_views", 256, 8, 8192, "kinematic views during free flight"},
        {"n_traj", 10000, 10, 1000000, "trajectory ensemble size"},
        {"n_display", 20, 0, 200, "trajectories recorded with full history"},
        {"substeps", 4, 1, 64, "RK4 substeps per view interval"},
    };
    return s;
}

} // namespace detail

namespace {

// Band extraction around a component's spectral centroid: psi(z) =
// env(z) exp(i k_c z) with env resolved on the coarse grid. Exact as long as
// the band holds the component's spectrum (capture is tracked).
struct Envelope {
    std::vector<cplx> spectrum_hat; // coarse-ordered FFT bins (band around k_c)
    double k_center = 0.0;
    double weight = 0.0;  // component norm^2
    double capture = 1.0; // band mass / component mass
};

struct SgViews {
    Grid fine;
    Grid coarse;
    std::size_t fine_n, coarse_n;
    double hbar, mass;

    Envelope extract(const ComplexField& comp) const {
        Envelope env;
        env.weight = norm2(comp);
        if (env.weight < 1e-14) {
            env.spectrum_hat.assign(coarse_n, cplx(0, 0));
            return env;
        }

        std::vector<cplx> hat = comp.values();
        auto plan = kernels::fft_plan(fine_n);
        kernels::fft_inplace(*plan, hat.data(), false);

        std::size_t peak = 0;
        double best = -1.0, total = 0.0;
        for (std::size_t j = 0; j < fine_n; ++j) {
            const double p = std::norm(hat[j]);
            total += p;
            if (p > best) {
                best = p;
                peak = j;
            }
        }

        env.k_center = fine.wavenumber(0, peak);
        env.spectrum_hat.assign(coarse_n, cplx(0, 0));
        double band = 0.0;
        const double scale =
            static_cast<double>(coarse_n) / static_cast<double>(fine_n);
        for (std::size_t q = 0; q < coarse_n; ++q) {
            // coarse bin q maps to offset [-coarse_n/2, coarse_n/2)
            const std::ptrdiff_t off =
                q < coarse_n / 2 ? static_cast<std::ptrdiff_t>(q)
                                 : static_cast<std::ptrdiff_t>(q) -
                                       static_cast<std::ptrdiff_t>(coarse_n);
            const std::size_t src =
                (peak + fine_n + static_cast<std::size_t>(
                                     (off + static_cast<std::ptrdiff_t>(fine_n)))) %
                fine_n;
            env.spectrum_hat[q] = hat[src] * scale;
            band += std::norm(hat[src]);
        }
        env.capture = total > 0.0 ? band / total : 1.0;
        return env;
    }

    // envelope advanced by t (free flight), returned in real space
    std::vector<cplx> realize(const Envelope& env, double t) const {
        std::vector<cplx> e = env.spectrum_hat;
        if (t != 0.0) {
            const double c = -0.5 * hbar * t / mass;
            for (std::size_t q = 0; q < coarse_n; ++q) {
                const double k = env.k_center + coarse.wavenumber(0, q);
                const double ph = c * k * k;
                e[q] *= cplx(std::cos(ph), std::sin(ph));
            }
        }
        auto plan = kernels::fft_plan(coarse_n);
        kernels::fft_inplace(*plan, e.data(), true);
        return e;
    }

    std::vector<cplx> realize_derivative(const Envelope& env, double t) const {
        std::vector<cplx> e = env.spectrum_hat;
        const double c = -0.5 * hbar * t / mass;
        for (std::size_t q = 0; q < coarse_n; ++q) {
            const double kq = coarse.wavenumber(0, q);
            const double k = env.k_center + kq;
            if (t != 0.0) {
                const double ph = c * k * k;
                e[q] *= cplx(std::cos(ph), std::sin(ph));
            }
            e[q] *= cplx(0.0, kq); // envelope-internal derivative only
        }
        auto plan = kernels::fft_plan(coarse_n);
        kernels::fft_inplace(*plan, e.data(), true);
        return e;
    }

    // Kinematic view at flight time t from the two component envelopes.
    MadelungView view(const Envelope& up, const Envelope& dn, double t) const {
        const auto eu = realize(up, t);
        const auto ed = realize(dn, t);
        const auto du = realize_derivative(up, t);
        const auto dd = realize_derivative(dn, t);

        MadelungView v;
        v.grid = coarse;
        v.rho.resize(coarse_n);
        v.velocity[0].assign(coarse_n, 0.0);
        for (auto& s : v.spin) s.assign(coarse_n, 0.0);

        const double dk = dn.k_center - up.k_center;
        double rho_max = 0.0;
        for (std::size_t i = 0; i < coarse_n; ++i) {
            const double ru = std::norm(eu[i]);
            const double rd = std::norm(ed[i]);
            v.rho[i] = ru + rd;
            rho_max = std::max(rho_max, v.rho[i]);
        }
        v.eps_rho = 1e-12 * rho_max;
        v.valid.resize(coarse_n);
        const double pref = hbar / mass;
        for (std::size_t i = 0; i < coarse_n; ++i) {
            v.valid[i] = v.rho[i] >= v.eps_rho ? 1 : 0;
            if (!v.valid[i]) continue;
            const double ru = std::norm(eu[i]);
            const double rd = std::norm(ed[i]);
            const double ju =
                ru * up.k_center + (eu[i].real() * du[i].imag() -
                                    eu[i].imag() * du[i].real());
            const double jd =
                rd * dn.k_center + (ed[i].real() * dd[i].imag() -
                                    ed[i].imag() * dd[i].real());
            v.velocity[0][i] = pref * (ju + jd) / v.rho[i];

            // spin vector; the transverse part rides the carrier exp(i dk z),
            // with z measured from the grid origin like the spectral basis
            const double z = coarse.coord(0, i) - coarse.origin(0);
            const cplx carrier(std::cos(dk * z), std::sin(dk * z));
            const cplx cross = std::conj(eu[i]) * ed[i] * carrier;
            v.spin[0][i] = hbar * cross.real() / v.rho[i];
            v.spin[1][i] = hbar * cross.imag() / v.rho[i];
            v.spin[2][i] = 0.5 * hbar * (ru - rd) / v.rho[i];
        }
        return v;
    }
};

double envelope_centroid(const std::vector<cplx>& e, const Grid& g) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.npoints(0); ++i) {
        const double r = std::norm(e[i]);
        num += r * g.coord(0, i);
        den += r;
    }
    return num / den;
}

} // namespace

RunRecord run_stern_gerlach(const ScenarioConfig& cfg) {
    const double sigma0 = cfg.get("sigma0");
    const double mass_si = cfg.get("mass");
    const double hbar_si = cfg.get("hbar");
    const double mu_si = cfg.get("mu_bohr");
    const double bprime_si = cfg.get("bprime");
    const double v_beam = cfg.get("v_beam");
    const double dt_field_si = cfg.get("field_length") / v_beam;
    const double t_plate_si = cfg.get("plate_distance") / v_beam;
    const double theta0 = cfg.get("theta0");
    const double phi0 = cfg.get("phi0");

    // Eq-(29)-style formula values drive the scaling.
    const double u_formula_si = mu_si * bprime_si * dt_field_si / mass_si;
    const double zd_formula_si =
        0.5 * mu_si * bprime_si * dt_field_si * dt_field_si / mass_si;

    const double L0 = sigma0;
    const double T0 = sigma0 / u_formula_si;
    const double E0 = mass_si * L0 * L0 / (T0 * T0);

    PhysicalParams params;
    params.mass = 1.0;
    params.hbar = hbar_si * T0 / (mass_si * L0 * L0);
    params.mu_bohr = mu_si / E0; // energy per tesla in scaled units

    MagneticField field;
    field.b0 = cfg.get("b0");
    field.bprime = bprime_si * L0;
    field.t_on = 0.0;
    field.t_off = dt_field_si / T0;

    const std::size_t n_fine = cfg.count("n_grid");
    const std::size_t n_view = cfg.count("view_points");
    const double half = cfg.get("half_extent_sigma");
    const Grid fine = Grid::line_centered(n_fine, half);
    const Grid coarse = Grid::line_centered(n_view, half);

    const double t_exit = field.t_off;
    const double t_end = t_exit + t_plate_si / T0;
    const std::size_t n_field_steps = cfg.count("in_field_steps");
    const std::size_t n_flight_views = cfg.count("flight_views");
    const int substeps = static_cast<int>(cfg.count("substeps"));

    RunRecord rec;
    rec.scenario = cfg.scenario;
    rec.seed = cfg.seed;
    rec.version = kVersion;
    rec.config_echo = cfg.values;

    // ---- initial state and ensemble starts -----------------------------------
    SpinorField state =
        spinor_packet(fine, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, theta0, phi0, params);

    const CounterRng rng = cfg.rng();
    const std::size_t n_traj = cfg.count("n_traj");
    const std::size_t n_display = std::min<std::size_t>(cfg.count("n_display"), n_traj);

    std::vector<std::array<double, 2>> starts;
    {
        // both components share the gaussian envelope; sample the heavier one
        // (theta0 = pi leaves the up component empty)
        const std::size_t comp = theta0 <= M_PI / 2.0 ? 0 : 1;
        starts = sample_initial_positions(state.component(comp), n_traj,
                                          rng.fork("ensemble"));
    }

    SgViews demod{fine, coarse, n_fine, n_view, params.hbar, params.mass};

    auto spinor_view = [&](const SpinorField& s, double t_free) {
        const Envelope up = demod.extract(s.component(0));
        const Envelope dn = demod.extract(s.component(1));
        return demod.view(up, dn, t_free);
    };

    TrajectoryBatch ensemble(starts, 0.0, true);
    TrajectoryBatch display(
        std::vector<std::array<double, 2>>(starts.begin(),
                                           starts.begin() + n_display),
        0.0, true);

    MadelungView prev_view = spinor_view(state, 0.0);
    display.record(0.0, &prev_view);
    double prev_t = 0.0;

    auto advance_to = [&](const MadelungView& next, double t) {
        ensemble.advance(prev_view, prev_t, next, t, substeps);
        display.advance(prev_view, prev_t, next, t, substeps);
        display.record(t, &next);
        prev_view = next;
        prev_t = t;
    };

    // ---- in-field Pauli evolution ---------------------------------------------
    StepConfig scfg;
    scfg.dt = t_exit / static_cast<double>(n_field_steps);
    PauliPropagator pauli(fine, params, Potential::none(), field, scfg);
    for (std::size_t s = 0; s < n_field_steps; ++s) {
        pauli.step_inplace(state, scfg.dt * static_cast<double>(s));
        advance_to(spinor_view(state, 0.0), scfg.dt * static_cast<double>(s + 1));
    }

    const double norm_after_field = norm2(state);

    // ---- demodulate at the field exit; flight is spectral-exact ---------------
    Envelope env_up = demod.extract(state.component(0));
    Envelope env_dn = demod.extract(state.component(1));

    auto centroid_at = [&](const Envelope& e, double t_free) {
        return envelope_centroid(demod.realize(e, t_free), coarse);
    };

    const double flight = t_end - t_exit;
    const double view_dt = flight / static_cast<double>(n_flight_views);
    for (std::size_t s = 1; s <= n_flight_views; ++s) {
        const double tf = view_dt * static_cast<double>(s);
        advance_to(demod.view(env_up, env_dn, tf), t_exit + tf);
    }

    // ---- measurements -----------------------------------------------------------
    const double a_scaled = params.mu_bohr * field.bprime / params.mass;
    const double zd_th = 0.5 * a_scaled * t_exit * t_exit;
    const double u_th = a_scaled * t_exit;

    double zd_meas = 0.0, u_meas = 0.0;
    if (env_up.weight > 1e-12) {
        const double c0 = centroid_at(env_up, 0.0);
        const double c1 = centroid_at(env_up, 0.5 * flight);
        const double c2 = centroid_at(env_up, flight);
        u_meas = (c2 - c1) / (0.5 * flight);
        zd_meas = c0;
    } else { // theta0 = pi: only the down packet exists
        const double c0 = centroid_at(env_dn, 0.0);
        const double c1 = centroid_at(env_dn, 0.5 * flight);
        const double c2 = centroid_at(env_dn, flight);
        u_meas = -(c2 - c1) / (0.5 * flight);
        zd_meas = -c0;
    }

    // ---- outcomes ----------------------------------------------------------------
    std::size_t ups = 0, aborts = 0, stragglers = 0;
    double min_abs_costheta = 1.0;
    const MadelungView& final_view = prev_view;
    std::vector<double> final_theta(n_traj, 0.0);
    for (std::size_t i = 0; i < n_traj; ++i) {
        if (ensemble.aborted(i)) {
            ++aborts;
            continue;
        }
        const auto pos = ensemble.position(i);
        if (pos[0] > 0.0) ++ups;
        const auto sv = final_view.spin_at(pos);
        if (sv) {
            const auto ang = spin_angles_from_vector(*sv);
            final_theta[i] = ang[0];
            min_abs_costheta = std::min(min_abs_costheta, std::abs(std::cos(ang[0])));
            if (std::abs(std::cos(ang[0])) <= 0.999) ++stragglers;
        }
    }
    const double n_ok = static_cast<double>(n_traj - aborts);
    const double up_frac = static_cast<double>(ups) / n_ok;

    // ---- closeness to the closed-form two-packet state (itself approximate) ----
    double postmagnet_form_l1 = 0.0;
    {
        oracle::PostMagnetParams pm;
        pm.theta0 = theta0;
        pm.phi0 = phi0;
        pm.sigma0 = 1.0;
        pm.z_delta = zd_th;
        pm.u = u_th;
        pm.mass = params.mass;
        pm.hbar = params.hbar;
        auto oracle_spinor = oracle::postmagnet_spinor(pm, flight, coarse);
        for (std::size_t i = 0; i < n_view; ++i) {
            const double r_oracle = std::norm(oracle_spinor.component(0).values()[i]) +
                                    std::norm(oracle_spinor.component(1).values()[i]);
            postmagnet_form_l1 += std::abs(final_view.rho[i] - r_oracle);
        }
        postmagnet_form_l1 *= coarse.cell_volume();
    }

    // ---- frames -------------------------------------------------------------------
    auto emit = [&](const char* name, double t_scaled, const MadelungView& v) {
        DensityFrame f;
        f.name = name;
        f.time = t_scaled * T0;
        f.beam_coordinate = t_scaled * T0 * v_beam;
        f.grid = Grid::line(n_view, coarse.origin(0) * L0, coarse.spacing(0) * L0);
        f.rho.resize(n_view);
        for (std::size_t i = 0; i < n_view; ++i) f.rho[i] = v.rho[i] / L0;
        rec.frames.push_back(std::move(f));
    };
    emit("density_exit", t_exit, demod.view(env_up, env_dn, 0.0));
    emit("density_midflight", t_exit + 0.5 * flight,
         demod.view(env_up, env_dn, 0.5 * flight));
    emit("density_plate", t_end, final_view);

    // ---- record ---------------------------------------------------------------------
    rec.trajectories = display.take();
    for (auto& t : rec.trajectories) {
        for (auto& tt : t.times) tt *= T0;
        for (auto& p : t.positions) p[0] *= L0;
    }

    rec.statistics["z_delta_measured_m"] = zd_meas * L0;
    rec.statistics["z_delta_formula_m"] = zd_formula_si;
    rec.statistics["z_delta_rel_err"] =
        std::abs(zd_meas * L0 - zd_formula_si) / zd_formula_si;
    rec.statistics["u_measured_m_per_s"] = u_meas * L0 / T0;
    rec.statistics["u_formula_m_per_s"] = u_formula_si;
    rec.statistics["u_rel_err"] =
        std::abs(u_meas * L0 / T0 - u_formula_si) / u_formula_si;
    rec.statistics["up_fraction"] = up_frac;
    rec.statistics["up_fraction_expected"] = std::cos(0.5 * theta0) * std::cos(0.5 * theta0);
    rec.statistics["up_fraction_sigma"] = stats::binomial_sigma(
        std::cos(0.5 * theta0) * std::cos(0.5 * theta0), n_traj - aborts);
    rec.statistics["min_abs_cos_theta_final"] = min_abs_costheta;
    // samples still between the packets at the plate: their straightening is
    // incomplete (the measurement duration is position dependent); their
    // expected number is n_traj times the interpacket strip mass
    rec.statistics["straggler_count"] = static_cast<double>(stragglers);
    rec.statistics["straggler_frac"] =
        static_cast<double>(stragglers) / static_cast<double>(n_traj);
    rec.statistics["aborts"] = static_cast<double>(aborts);
    rec.statistics["abort_frac"] = static_cast<double>(aborts) / static_cast<double>(n_traj);
    rec.statistics["norm_after_field"] = norm_after_field;
    rec.statistics["band_capture_up"] = env_up.weight > 1e-12 ? env_up.capture : 1.0;
    rec.statistics["band_capture_down"] = env_dn.weight > 1e-12 ? env_dn.capture : 1.0;
    rec.statistics["weight_up"] = env_up.weight;
    rec.statistics["weight_down"] = env_dn.weight;
    rec.statistics["postmagnet_form_l1"] = postmagnet_form_l1;
    rec.statistics["t_exit_s"] = t_exit * T0;
    rec.statistics["t_plate_s"] = t_end * T0;

    rec.notes.push_back(
        "free flight uses exact spectral advance of band-extracted envelopes; "
        "band capture fractions are recorded");
    rec.notes.push_back(
        "phi along paths is a point sample of a spatially fast quantity in the "
        "packet-overlap region; theta (from s_z) is the robust angle");
    return rec;
}

} // namespace pilotwave
