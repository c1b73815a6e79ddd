#include <cmath>

#include "pilotwave/propagator.hpp"
#include "pilotwave/scenario.hpp"
#include "pilotwave/stats.hpp"

// EPR-B: singlet pair with spatial extension on the (z_A, z_B) configuration
// grid, measured sequentially (A's analyzer at angle a, then B's at angle b).
// A measurement = rotation of that particle's spin basis into the analyzer
// frame followed by a z-gradient window; outcomes are the signs of the
// Bohmian coordinates at the plate.
//
// The protocol keeps every spin component an exact product of 1D factors:
// basis rotations happen while the other particle's spatial factors still
// coincide, and each gradient window acts on one axis of one particle. The
// evolution below advances those 1D factors (which is exact, not an
// approximation - a unit test checks it against the generic 2D propagator)
// and materializes (z_A, z_B) views only for the trajectory kinematics.
//
// The apparatus is dimensionless (hbar = m = sigma0 = 1): the correlation
// statistics are parameter-free, and the silver-atom phase ramp would demand
// ~1e6 points per axis on a 2D grid. B0 = 0 here: a constant B0 only
// precesses the azimuth, which the two-analyzer-angle convention absorbs.

namespace pilotwave {

namespace detail {

ScenarioSchema epr_b_schema() {
    ScenarioSchema s;
    s.id = "epr_b";
    s.summary = "singlet pair, sequential spin measurements, CHSH";
    s.params = {
        {"sigma0", 1.0, 0.1, 10.0, "packet width (dimensionless units)"},
        {"accel", 12.0, 0.1, 100.0, "gradient acceleration mu_B B' / m"},
        {"window", 0.5, 0.01, 10.0, "measurement field window duration"},
        {"flight_ab", 1.5, 0.0, 100.0, "A window end to B window start"},
        {"flight_plate", 2.5, 0.1, 100.0, "B window end to the plate"},
        {"angle_a1", 0.0, -M_PI, M_PI, "first A analyzer angle, rad"},
        {"angle_a2", M_PI / 2.0, -M_PI, M_PI, "second A analyzer angle, rad"},
        {"angle_b1", M_PI / 4.0, -M_PI, M_PI, "first B analyzer angle, rad"},
        {"angle_b2", 3.0 * M_PI / 4.0, -M_PI, M_PI, "second B analyzer angle, rad"},
        {"n_grid", 512, 64, 4096, "1D factor grid points (power of two)"},
        {"half_extent", 40.0, 5.0, 1e3, "domain is [-L, L) per axis"},
        {"view_points", 256, 32, 2048, "view grid points per axis"},
        {"window_steps", 8, 1, 256, "evolution steps inside a field window"},
        {"flight_step", 0.125, 1e-3, 10.0, "view cadence during free flights"},
        {"n_traj", 10000, 10, 1000000, "samples per angle pair"},
        {"n_marginal_frames", 3, 0, 32, "B marginals recorded during A's window"},
        {"substeps", 4, 1, 64, "RK4 substeps per view interval"},
    };
    return s;
}

} // namespace detail

namespace {

// One spin component: coefficient times uA(z_A) * wB(z_B); uA/wB are indices
// into the factor pools so components can share factors.
struct SpinComponent {
    cplx coef;
    std::size_t a_factor;
    std::size_t b_factor;
};

struct PairState {
    Grid grid1d = Grid::line(8, 0.0, 1.0);
    PhysicalParams params;
    std::vector<ComplexField> factors; // shared 1D factor pool
    std::array<SpinComponent, 4> comp; // ordered ++, +-, -+, --

    static constexpr std::size_t a_index(std::size_t c) { return c / 2; } // 0:+ 1:-
    static constexpr std::size_t b_index(std::size_t c) { return c % 2; }
};

// Rotate one particle's basis by the analyzer angle (x-z plane, phi = 0):
// |+n> = cos(a/2)|+> + sin(a/2)|->, applied to the A or B spin index. Valid
// as a pure coefficient mix only while the mixed components share their
// spatial factors, which the protocol guarantees at each rotation point.
void rotate_particle(PairState& st, int particle, double angle) {
    const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
    auto mix = [&](std::size_t plus, std::size_t minus) {
        if (st.comp[plus].a_factor != st.comp[minus].a_factor ||
            st.comp[plus].b_factor != st.comp[minus].b_factor)
            throw ValidationError("spin rotation outside the product-form window");
        const cplx cp = st.comp[plus].coef;
        const cplx cm = st.comp[minus].coef;
        st.comp[plus].coef = c * cp + s * cm;
        st.comp[minus].coef = -s * cp + c * cm;
    };
    if (particle == 0) {
        mix(0, 2); // A index within B = +
        mix(1, 3); // A index within B = -
    } else {
        mix(0, 1);
        mix(2, 3);
    }
}

// 2D kinematic view on a coarse (z_A, z_B) grid from the 1D factors.
MadelungView pair_view(const PairState& st, const Grid& view_grid) {
    const std::size_t nv = view_grid.npoints(0);
    const Grid& g1 = st.grid1d;

    // sample each needed factor (value + spectral derivative) on the view comb
    struct Sampled {
        std::vector<cplx> val, dv;
    };
    std::vector<Sampled> samp(st.factors.size());
    const std::size_t stride = g1.npoints(0) / nv;
    for (std::size_t f = 0; f < st.factors.size(); ++f) {
        ComplexField grad = st.factors[f];
        auto plan = kernels::fft_plan(g1.npoints(0));
        kernels::fft_inplace(*plan, grad.data(), false);
        for (std::size_t j = 0; j < g1.npoints(0); ++j)
            grad.values()[j] *= cplx(0.0, g1.wavenumber(0, j));
        kernels::fft_inplace(*plan, grad.data(), true);

        samp[f].val.resize(nv);
        samp[f].dv.resize(nv);
        for (std::size_t i = 0; i < nv; ++i) {
            samp[f].val[i] = st.factors[f].values()[i * stride];
            samp[f].dv[i] = grad.values()[i * stride];
        }
    }

    MadelungView v;
    v.grid = view_grid;
    v.rho.assign(nv * nv, 0.0);
    v.velocity[0].assign(nv * nv, 0.0);
    v.velocity[1].assign(nv * nv, 0.0);

    std::vector<double> ja(nv * nv, 0.0), jb(nv * nv, 0.0);
    for (const auto& c : st.comp) {
        const double w2 = std::norm(c.coef);
        if (w2 < 1e-30) continue;
        const auto& ua = samp[c.a_factor];
        const auto& wb = samp[c.b_factor];
        for (std::size_t i = 0; i < nv; ++i) {
            const double ra = std::norm(ua.val[i]);
            const double ia = ua.val[i].real() * ua.dv[i].imag() -
                              ua.val[i].imag() * ua.dv[i].real();
            for (std::size_t j = 0; j < nv; ++j) {
                const double rb = std::norm(wb.val[j]);
                const double ib = wb.val[j].real() * wb.dv[j].imag() -
                                  wb.val[j].imag() * wb.dv[j].real();
                const std::size_t idx = i * nv + j;
                v.rho[idx] += w2 * ra * rb;
                ja[idx] += w2 * ia * rb;
                jb[idx] += w2 * ra * ib;
            }
        }
    }

    double rho_max = 0.0;
    for (double r : v.rho) rho_max = std::max(rho_max, r);
    v.eps_rho = 1e-12 * rho_max;
    v.valid.resize(nv * nv);
    const double pref = st.params.hbar / st.params.mass;
    for (std::size_t idx = 0; idx < nv * nv; ++idx) {
        v.valid[idx] = v.rho[idx] >= v.eps_rho ? 1 : 0;
        if (!v.valid[idx]) continue;
        v.velocity[0][idx] = pref * ja[idx] / v.rho[idx];
        v.velocity[1][idx] = pref * jb[idx] / v.rho[idx];
    }
    return v;
}

struct PairRunResult {
    double e_value = 0.0;
    double e_sigma = 0.0;
    double up_frac_a = 0.0;
    std::size_t same_sign = 0;
    std::size_t aborts = 0;
    std::vector<DensityFrame> marginals;
    double marginal_l1_max = 0.0;
};

PairRunResult run_pair(const ScenarioConfig& cfg, double angle_a, double angle_b,
                       const CounterRng& rng, bool record_marginals) {
    const double sigma0 = cfg.get("sigma0");
    const double accel = cfg.get("accel");
    const double window = cfg.get("window");
    const double flight_ab = cfg.get("flight_ab");
    const double flight_plate = cfg.get("flight_plate");
    const std::size_t n = cfg.count("n_grid");
    const double L = cfg.get("half_extent");
    const std::size_t wsteps = cfg.count("window_steps");
    const double fstep = cfg.get("flight_step");
    const std::size_t nv = cfg.count("view_points");
    const int substeps = static_cast<int>(cfg.count("substeps"));
    const std::size_t n_traj = cfg.count("n_traj");

    PairState st;
    st.grid1d = Grid::line_centered(n, L);
    st.params.mass = 1.0;
    st.params.hbar = 1.0;
    const Grid view_grid = Grid::plane_centered(nv, nv, L, L);

    ComplexField f0 = gaussian_packet(st.grid1d, 0.0, sigma0, 0.0, st.params);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    st.factors = {f0, f0};
    st.comp[0] = {cplx(0.0, 0.0), 0, 1};
    st.comp[1] = {cplx(inv_sqrt2, 0.0), 0, 1};
    st.comp[2] = {cplx(-inv_sqrt2, 0.0), 0, 1};
    st.comp[3] = {cplx(0.0, 0.0), 0, 1};

    // sample configuration starts from rho0 = f^2(zA) f^2(zB)
    std::vector<std::array<double, 2>> starts;
    {
        auto za = sample_initial_positions(f0, n_traj, rng.fork("zA"));
        auto zb = sample_initial_positions(f0, n_traj, rng.fork("zB"));
        starts.resize(n_traj);
        for (std::size_t i = 0; i < n_traj; ++i) starts[i] = {za[i][0], zb[i][0]};
    }
    TrajectoryBatch batch(starts, 0.0);

    PairRunResult out;
    MadelungView prev = pair_view(st, view_grid);
    double t_now = 0.0;

    auto advance = [&](double dt_piece) {
        MadelungView next = pair_view(st, view_grid);
        batch.advance(prev, t_now, next, t_now + dt_piece, substeps);
        prev = std::move(next);
        t_now += dt_piece;
    };

    // ---- A window ----------------------------------------------------------
    rotate_particle(st, 0, angle_a);
    {
        ComplexField a_plus = st.factors[0];
        ComplexField a_minus = st.factors[0];
        st.factors.push_back(a_plus);  // 2
        st.factors.push_back(a_minus); // 3
        for (std::size_t c = 0; c < 4; ++c)
            st.comp[c].a_factor = PairState::a_index(c) == 0 ? 2 : 3;

        StepConfig scfg;
        scfg.dt = window / static_cast<double>(wsteps);
        SchrodingerPropagator up(st.grid1d, st.params,
                                 Potential::linear({-accel * st.params.mass, 0.0}),
                                 scfg);
        SchrodingerPropagator dn(st.grid1d, st.params,
                                 Potential::linear({+accel * st.params.mass, 0.0}),
                                 scfg);
        const std::size_t marg_every =
            record_marginals && cfg.count("n_marginal_frames") > 0
                ? std::max<std::size_t>(1, wsteps / cfg.count("n_marginal_frames"))
                : 0;
        for (std::size_t s = 0; s < wsteps; ++s) {
            up.step_inplace(st.factors[2]);
            dn.step_inplace(st.factors[3]);
            free_advance_inplace(st.factors[1], st.params, scfg.dt);
            advance(scfg.dt);

            if (marg_every != 0 && (s + 1) % marg_every == 0) {
                // B's marginal: weights * |f_B(z_B,t)|^2, exactly the
                // unentangled free packet by the product structure
                DensityFrame f;
                f.name = "b_marginal_during_a_" + std::to_string(s + 1);
                f.time = t_now;
                f.grid = st.grid1d;
                f.rho.resize(n);
                double l1 = 0.0;
                ComplexField free_ref = f0;
                free_advance_inplace(free_ref, st.params, t_now);
                for (std::size_t i = 0; i < n; ++i) {
                    f.rho[i] = std::norm(st.factors[1].values()[i]);
                    l1 += std::abs(f.rho[i] - std::norm(free_ref.values()[i]));
                }
                out.marginal_l1_max =
                    std::max(out.marginal_l1_max, l1 * st.grid1d.cell_volume());
                out.marginals.push_back(std::move(f));
            }
        }
    }

    // ---- flight to B -----------------------------------------------------------
    {
        const auto pieces = static_cast<std::size_t>(std::ceil(flight_ab / fstep));
        const double dt_piece = flight_ab / static_cast<double>(pieces);
        for (std::size_t s = 0; s < pieces; ++s) {
            for (auto idx : {1, 2, 3})
                free_advance_inplace(st.factors[idx], st.params, dt_piece);
            advance(dt_piece);
        }
    }

    // ---- B window ----------------------------------------------------------------
    rotate_particle(st, 1, angle_b);
    {
        ComplexField b_plus = st.factors[1];
        ComplexField b_minus = st.factors[1];
        st.factors.push_back(b_plus);  // 4
        st.factors.push_back(b_minus); // 5
        for (std::size_t c = 0; c < 4; ++c)
            st.comp[c].b_factor = PairState::b_index(c) == 0 ? 4 : 5;

        StepConfig scfg;
        scfg.dt = window / static_cast<double>(wsteps);
        SchrodingerPropagator up(st.grid1d, st.params,
                                 Potential::linear({-accel * st.params.mass, 0.0}),
                                 scfg);
        SchrodingerPropagator dn(st.grid1d, st.params,
                                 Potential::linear({+accel * st.params.mass, 0.0}),
                                 scfg);
        for (std::size_t s = 0; s < wsteps; ++s) {
            up.step_inplace(st.factors[4]);
            dn.step_inplace(st.factors[5]);
            for (auto idx : {2, 3})
                free_advance_inplace(st.factors[idx], st.params, scfg.dt);
            advance(scfg.dt);
        }
    }

    // ---- flight to the plate ------------------------------------------------------
    {
        const auto pieces = static_cast<std::size_t>(std::ceil(flight_plate / fstep));
        const double dt_piece = flight_plate / static_cast<double>(pieces);
        for (std::size_t s = 0; s < pieces; ++s) {
            for (auto idx : {2, 3, 4, 5})
                free_advance_inplace(st.factors[idx], st.params, dt_piece);
            advance(dt_piece);
        }
    }

    // ---- outcomes --------------------------------------------------------------------
    double sum = 0.0, sum2 = 0.0;
    std::size_t ups_a = 0, counted = 0;
    for (std::size_t i = 0; i < n_traj; ++i) {
        if (batch.aborted(i)) {
            ++out.aborts;
            continue;
        }
        const auto pos = batch.position(i);
        const double sa = pos[0] > 0.0 ? 1.0 : -1.0;
        const double sb = pos[1] > 0.0 ? 1.0 : -1.0;
        const double prod = sa * sb;
        sum += prod;
        sum2 += prod * prod;
        if (sa > 0.0) ++ups_a;
        if (prod > 0.0) ++out.same_sign;
        ++counted;
    }
    const double nc = static_cast<double>(counted);
    out.e_value = sum / nc;
    out.e_sigma = std::sqrt(std::max(sum2 / nc - out.e_value * out.e_value, 0.0) /
                            nc);
    out.up_frac_a = static_cast<double>(ups_a) / nc;
    return out;
}

} // namespace

RunRecord run_epr_b(const ScenarioConfig& cfg) {
    RunRecord rec;
    rec.scenario = cfg.scenario;
    rec.seed = cfg.seed;
    rec.version = kVersion;
    rec.config_echo = cfg.values;

    const CounterRng rng = cfg.rng();
    const double a1 = cfg.get("angle_a1");
    const double a2 = cfg.get("angle_a2");
    const double b1 = cfg.get("angle_b1");
    const double b2 = cfg.get("angle_b2");

    struct PairJob {
        const char* tag;
        double a, b;
        bool marginals;
    };
    const PairJob jobs[] = {
        {"11", a1, b1, true},  {"12", a1, b2, false}, {"21", a2, b1, false},
        {"22", a2, b2, false}, {"aa", a1, a1, false}, {"perp", a1, a2, false},
    };

    std::map<std::string, PairRunResult> results;
    for (const auto& job : jobs) {
        auto r = run_pair(cfg, job.a, job.b,
                          rng.fork(std::string("pair-") + job.tag), job.marginals);
        const std::string key = job.tag;
        rec.statistics["E_" + key] = r.e_value;
        rec.statistics["E_" + key + "_sigma"] = r.e_sigma;
        rec.statistics["E_" + key + "_expected"] = -std::cos(job.a - job.b);
        rec.statistics["up_fraction_A_" + key] = r.up_frac_a;
        rec.statistics["same_sign_count_" + key] = static_cast<double>(r.same_sign);
        rec.statistics["aborts_" + key] = static_cast<double>(r.aborts);
        if (job.marginals)
            for (auto& f : r.marginals) rec.frames.push_back(std::move(f));
        if (job.marginals)
            rec.statistics["b_marginal_l1_max_during_a"] = r.marginal_l1_max;
        results[key] = std::move(r);
    }

    const double S = std::abs(results["11"].e_value - results["12"].e_value +
                              results["21"].e_value + results["22"].e_value);
    double s_sigma = 0.0;
    for (const char* k : {"11", "12", "21", "22"}) {
        const double e = results[k].e_sigma;
        s_sigma += e * e;
    }
    rec.statistics["chsh_S"] = S;
    rec.statistics["chsh_S_sigma"] = std::sqrt(s_sigma);
    rec.statistics["chsh_S_expected"] = 2.0 * std::sqrt(2.0);

    rec.notes.push_back(
        "outcome = sign of the Bohmian coordinate at the plate; E over the "
        "sampled ensemble; pair 'aa' checks sample-wise anticorrelation");
    return rec;
}

} // namespace pilotwave
