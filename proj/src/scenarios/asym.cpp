#include <cmath>

#include "pilotwave/oracle.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/scenario.hpp"
#include "pilotwave/stats.hpp"

// Asymmetric interference: a wide slit A against a grid B of many narrow
// slits, with a particle internal-size parameter s_int between the two
// aperture scales. Under the `standard` hypothesis an aperture narrower than
// s_int transmits neither particle nor wave; under the `alternative` the
// external wave passes every aperture but particles whose start would take
// them through a sub-s_int aperture are vetoed at the aperture plane. The
// detected pattern is then the transported ensemble of the surviving starts.
//
// Scaled units: L0 = 1e-6 m, T0 = 1e-4 s. The unspecified beam/geometry
// numbers (species, speed, pitch, screen distance) are config defaults.

namespace pilotwave {

namespace detail {

ScenarioSchema asym_schema() {
    ScenarioSchema s;
    s.id = "asym_interference";
    s.summary = "slit A + sub-particle-size grid B discrimination experiment";
    s.params = {
        {"mass", 3.8e-26, 1e-30, 1e-20, "atom mass, kg"},
        {"hbar", si::hbar, 1e-40, 1e-30, "hbar, J s"},
        {"v_beam", 600.0, 1.0, 1e5, "longitudinal beam speed, m/s"},
        {"slit_a_width", 100e-6, 1e-7, 1e-2, "slit A width, m"},
        {"slit_a_center", -60e-6, -1e-2, 1e-2, "slit A center, m"},
        {"slit_b_width", 0.1e-6, 1e-9, 1e-4, "grid B slit width, m"},
        {"slit_b_pitch", 0.15e-6, 1e-9, 1e-3, "grid B pitch, m"},
        {"slit_b_count", 1000, 0, 100000, "grid B slit count"},
        {"slit_b_start", 10e-6, -1e-2, 1e-2, "left edge of grid B, m"},
        {"s_int", 0.2e-6, 1e-9, 1e-2, "internal wave size parameter, m"},
        {"smoothing_frac", 0.1, 0.01, 0.5, "aperture edge smoothing / width"},
        {"sigma_beam", 150e-6, 1e-6, 1e-1, "incoming transverse width, m"},
        {"screen_distance", 0.9, 1e-3, 100.0, "aperture plane to screen, m"},
        {"n_grid", 524288, 4096, 1 << 22, "fine grid points (power of two)"},
        {"half_extent", 1.6e-3, 1e-5, 1e-1, "transverse half extent, m"},
        {"view_decimate", 64, 1, 4096, "fine-to-view decimation factor"},
        {"near_dt", 1.25e-6, 1e-9, 1e-2, "view cadence near the apertures, s"},
        {"near_span", 1e-5, 0.0, 1.0, "span covered at the near cadence, s"},
        {"far_dt", 8e-6, 1e-9, 1e-1, "view cadence for the remaining flight, s"},
        {"n_traj", 10000, 100, 1000000, "ensemble size (alternative hypothesis)"},
        {"pattern_bins", 75, 20, 2000, "screen histogram bins"},
        {"substeps", 4, 1, 64, "RK4 substeps per view interval"},
    };
    s.enums = {
        {"hypothesis", "alternative", {"standard", "alternative"},
         "which hypothesis provides the primary exported pattern"},
    };
    return s;
}

} // namespace detail

namespace {

constexpr double kL0 = 1e-6; // m
constexpr double kT0 = 1e-4; // s

double erf_slit(double z, double center, double width, double smooth) {
    const double a = (z - center + 0.5 * width) / (M_SQRT2 * smooth);
    const double b = (z - center - 0.5 * width) / (M_SQRT2 * smooth);
    return 0.5 * (std::erf(a) - std::erf(b));
}

std::vector<double> decimate_profile(const Grid& g, const std::vector<double>& rho,
                                     std::size_t factor, Grid& out_grid) {
    const std::size_t n = g.npoints(0) / factor;
    out_grid = Grid::line(n, g.origin(0), g.spacing(0) * static_cast<double>(factor));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rho[i * factor];
    return out;
}

} // namespace

RunRecord run_asym_interference(const ScenarioConfig& cfg) {
    PhysicalParams params;
    params.mass = 1.0;
    params.hbar = cfg.get("hbar") * kT0 / (cfg.get("mass") * kL0 * kL0);

    const double aw = cfg.get("slit_a_width") / kL0;
    const double ac = cfg.get("slit_a_center") / kL0;
    const double bw = cfg.get("slit_b_width") / kL0;
    const double bp = cfg.get("slit_b_pitch") / kL0;
    const std::size_t bn = cfg.count("slit_b_count");
    const double b0 = cfg.get("slit_b_start") / kL0;
    const double s_int = cfg.get("s_int") / kL0;
    const double smooth_frac = cfg.get("smoothing_frac");
    const double sigma_in = cfg.get("sigma_beam") / kL0;
    const double v_beam = cfg.get("v_beam");
    const double t_total = cfg.get("screen_distance") / v_beam / kT0;
    const std::size_t n = cfg.count("n_grid");
    const double L = cfg.get("half_extent") / kL0;
    const std::size_t dec = cfg.count("view_decimate");
    const int substeps = static_cast<int>(cfg.count("substeps"));

    if (bw >= bp && bn > 1)
        throw ValidationError("grid B slit width must stay below the pitch");

    const Grid g = Grid::line_centered(n, L);

    // aperture transmission functions
    auto mask_a = [&](double z) { return erf_slit(z, ac, aw, smooth_frac * aw); };
    auto mask_b = [&](double z) {
        // only nearby slits contribute; pick the window around z
        if (bn == 0) return 0.0;
        double acc = 0.0;
        const double first_center = b0 + 0.5 * bw;
        const auto k0 =
            static_cast<std::ptrdiff_t>(std::floor((z - first_center) / bp));
        for (std::ptrdiff_t k = k0 - 3; k <= k0 + 3; ++k) {
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(bn)) continue;
            acc += erf_slit(z, first_center + bp * static_cast<double>(k), bw,
                            smooth_frac * bw);
        }
        return std::min(acc, 1.0);
    };

    const bool a_open_std = aw >= s_int;
    const bool b_open_std = bw >= s_int;

    // ---- post-aperture states -------------------------------------------------
    ComplexField beam = gaussian_packet(g, 0.0, sigma_in, 0.0, params);

    auto apply_mask = [&](const ComplexField& in, bool with_a, bool with_b) {
        ComplexField out = in;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = g.coord(0, i);
            const double m = (with_a ? mask_a(z) : 0.0) + (with_b ? mask_b(z) : 0.0);
            out.values()[i] *= m;
        }
        normalize(out);
        return out;
    };

    ComplexField psi_std = apply_mask(beam, a_open_std, b_open_std);
    ComplexField psi_alt = apply_mask(beam, true, true);

    // aperture weights of the alternative wave
    double weight_a = 0.0, weight_b = 0.0;
    {
        const double split = 0.5 * (ac + 0.5 * aw + b0); // between A and B
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::norm(psi_alt.values()[i]) * g.cell_volume();
            (g.coord(0, i) < split ? weight_a : weight_b) += r;
        }
    }

    RunRecord rec;
    rec.scenario = cfg.scenario;
    rec.seed = cfg.seed;
    rec.version = kVersion;
    rec.config_echo = cfg.values;
    rec.option_echo = cfg.options;

    auto emit_decimated = [&](const char* name, double t_scaled,
                              const std::vector<double>& rho_fine,
                              std::size_t factor) {
        Grid cg = g;
        DensityFrame f;
        f.name = name;
        f.time = t_scaled * kT0;
        f.beam_coordinate = t_scaled * kT0 * v_beam;
        f.rho = decimate_profile(g, rho_fine, factor, cg);
        f.grid = Grid::line(cg.npoints(0), cg.origin(0) * kL0, cg.spacing(0) * kL0);
        for (auto& r : f.rho) r /= kL0;
        rec.frames.push_back(std::move(f));
    };

    // ---- alternative-wave evolution with kinematic views -----------------------
    // k-space cache makes every view two FFTs from the aperture state
    MadelungOptions mo;
    mo.with_qpotential = false;

    std::vector<double> view_times; // scaled
    {
        const double near_dt = cfg.get("near_dt") / kT0;
        const double near_span = std::min(cfg.get("near_span") / kT0, t_total);
        const double far_dt = cfg.get("far_dt") / kT0;
        double t = 0.0;
        view_times.push_back(0.0);
        while (t + near_dt <= near_span + 1e-12) {
            t += near_dt;
            view_times.push_back(t);
        }
        while (t + far_dt < t_total - 1e-12) {
            t += far_dt;
            view_times.push_back(t);
        }
        view_times.push_back(t_total);
    }

    const CounterRng rng = cfg.rng();
    const std::size_t n_traj = cfg.count("n_traj");

    // starts from the full (alternative) aperture density; veto = started in
    // a sub-s_int aperture (the grid B side when b is the narrow one)
    auto starts_all = sample_initial_positions(psi_alt, n_traj, rng.fork("starts"));
    const double veto_split = 0.5 * (ac + 0.5 * aw + b0);
    std::vector<std::array<double, 2>> kept;
    std::size_t vetoed = 0;
    for (const auto& s : starts_all) {
        const bool in_narrow = bw < s_int ? s[0] > veto_split : false;
        const bool in_wide_blocked = aw < s_int ? s[0] <= veto_split : false;
        if (in_narrow || in_wide_blocked) {
            ++vetoed;
            continue;
        }
        kept.push_back(s);
    }

    TrajectoryBatch ensemble(kept, 0.0);
    std::vector<double> rho_alt_final;
    {
        ComplexField state = psi_alt;
        MadelungView prev = decimate(madelung_decompose(state, params, mo), dec);
        for (std::size_t v = 1; v < view_times.size(); ++v) {
            const double dt_piece = view_times[v] - view_times[v - 1];
            free_advance_inplace(state, params, dt_piece);
            MadelungView next = decimate(madelung_decompose(state, params, mo), dec);
            ensemble.advance(prev, view_times[v - 1], next, view_times[v], substeps);
            prev = std::move(next);
        }
        rho_alt_final.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            rho_alt_final[i] = std::norm(state.values()[i]);
    }

    // standard wave needs no trajectories (every transmitted start survives,
    // so equivariance makes the pattern |psi_std|^2)
    std::vector<double> rho_std_final(n, 0.0);
    {
        ComplexField state = psi_std;
        free_advance_inplace(state, params, t_total);
        for (std::size_t i = 0; i < n; ++i)
            rho_std_final[i] = std::norm(state.values()[i]);
    }

    // ---- patterns and discrimination --------------------------------------------
    std::vector<double> survivors_final;
    std::size_t aborts = 0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        if (ensemble.aborted(i)) {
            ++aborts;
            continue;
        }
        survivors_final.push_back(ensemble.position(i)[0]);
    }

    // histogram range from the union of both patterns (0.2% tails dropped)
    auto quantile_range = [&](const std::vector<double>& rho, double q_lo,
                              double q_hi) {
        std::vector<double> cum(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + rho[i];
        auto q = [&](double target) {
            const double goal = target * cum[n];
            std::size_t i = 0;
            while (i < n && cum[i + 1] < goal) ++i;
            return g.coord(0, i);
        };
        return std::array<double, 2>{q(q_lo), q(q_hi)};
    };
    const auto r_alt = quantile_range(rho_alt_final, 0.002, 0.998);
    const auto r_std = quantile_range(rho_std_final, 0.002, 0.998);
    const double lo = std::min(r_alt[0], r_std[0]);
    const double hi = std::max(r_alt[1], r_std[1]);

    const std::size_t nbins = cfg.count("pattern_bins");
    auto hist_alt = stats::histogram(survivors_final, lo, hi, nbins);
    const double l1 = stats::l1_distance(hist_alt, g, rho_std_final);

    // Cross fringes inside A's geometric shadow: the beat between A's direct
    // wave (local wavenumber ~0 there) and grid B's first diffraction order
    // (local wavenumber 2 pi / pitch), so the fringe period is the pitch.
    const double cross_period = bn > 0 ? bp : 0.0;
    double vis_alt = 0.0, vis_std = 0.0, cross_period_meas = 0.0;
    if (bn > 0) {
        vis_alt = stats::fringe_visibility(g, rho_alt_final, cross_period,
                                           ac - 0.5 * aw, ac + 0.5 * aw);
        vis_std = stats::fringe_visibility(g, rho_std_final, cross_period,
                                           ac - 0.5 * aw, ac + 0.5 * aw);
        if (vis_alt > 1e-3) {
            const double k_c = 2.0 * M_PI / cross_period;
            cross_period_meas = stats::dominant_fringe_period(
                g, rho_alt_final, 0.7 * k_c, 1.4 * k_c);
        }
    }

    // ---- frames --------------------------------------------------------------------
    {
        std::vector<double> rho0(n);
        for (std::size_t i = 0; i < n; ++i) rho0[i] = std::norm(psi_alt.values()[i]);
        emit_decimated("aperture_alternative", 0.0, rho0, dec);
    }
    emit_decimated("screen_standard", t_total, rho_std_final, dec);
    emit_decimated("screen_alternative", t_total, rho_alt_final, dec);
    {
        // zoom over A's shadow at full resolution: resolves the cross fringes
        const double zlo = ac - 0.6 * aw, zhi = ac + 0.6 * aw;
        const auto i0 = static_cast<std::size_t>((zlo - g.origin(0)) / g.spacing(0));
        const auto i1 = static_cast<std::size_t>((zhi - g.origin(0)) / g.spacing(0));
        DensityFrame f;
        f.name = "screen_alternative_zoom";
        f.time = t_total * kT0;
        f.beam_coordinate = t_total * kT0 * v_beam;
        f.grid = Grid::line(i1 - i0, g.coord(0, i0) * kL0, g.spacing(0) * kL0);
        f.rho.assign(rho_alt_final.begin() + i0, rho_alt_final.begin() + i1);
        for (auto& r : f.rho) r /= kL0;
        rec.frames.push_back(std::move(f));
    }

    rec.statistics["l1_standard_vs_alternative"] = l1;
    rec.statistics["visibility_cross_alternative"] = vis_alt;
    rec.statistics["visibility_cross_standard"] = vis_std;
    rec.statistics["cross_period_oracle_m"] = cross_period * kL0;
    rec.statistics["cross_period_measured_m"] = cross_period_meas * kL0;
    rec.statistics["weight_a"] = weight_a;
    rec.statistics["weight_b"] = weight_b;
    rec.statistics["vetoed"] = static_cast<double>(vetoed);
    rec.statistics["vetoed_frac"] =
        static_cast<double>(vetoed) / static_cast<double>(n_traj);
    rec.statistics["survivors"] = static_cast<double>(survivors_final.size());
    rec.statistics["aborts"] = static_cast<double>(aborts);
    rec.statistics["abort_frac"] =
        ensemble.size() ? static_cast<double>(aborts) / static_cast<double>(ensemble.size())
                        : 0.0;
    rec.statistics["a_open_standard"] = a_open_std ? 1.0 : 0.0;
    rec.statistics["b_open_standard"] = b_open_std ? 1.0 : 0.0;

    rec.notes.push_back("primary hypothesis for export: " + cfg.option("hypothesis"));
    rec.notes.push_back(
        "alternative pattern = transported surviving ensemble; standard "
        "pattern = |psi_A|^2 (every transmitted start survives)");
    return rec;
}

} // namespace pilotwave
