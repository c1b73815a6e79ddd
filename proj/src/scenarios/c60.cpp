#include <cmath>

#include "pilotwave/oracle.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/scenario.hpp"
#include "pilotwave/stats.hpp"

// Fullerene double slit in the Nairz geometry. The transverse axis is
// simulated; the beam axis is classical, y = v t. Slits act as an aperture
// mask applied at t = 0 to the incoming transverse packet (erf-smoothed
// top-hats, smoothing = 10% of the slit width), so the propagator itself
// stays potential-free.
//
// Internal scaled units: L0 = 1e-7 m, T0 = 1e-6 s.

namespace pilotwave {

namespace detail {

ScenarioSchema c60_schema() {
    ScenarioSchema s;
    s.id = "c60_double_slit";
    s.summary = "C60 two-slit interference with pilot trajectories";
    s.params = {
        {"mass", 1.197e-24, 1e-30, 1e-20, "molecule mass, kg"},
        {"hbar", si::hbar, 1e-40, 1e-30, "hbar, J s"},
        {"v_beam", 200.0, 1.0, 1e5, "longitudinal beam speed, m/s"},
        {"slit_separation", 100e-9, 1e-9, 1e-5, "center-to-center spacing, m"},
        {"slit_width", 55e-9, 1e-9, 1e-5, "single slit width, m"},
        {"smoothing_frac", 0.1, 0.01, 0.5, "aperture edge smoothing / width"},
        {"sigma_beam", 150e-9, 1e-8, 1e-4, "incoming transverse packet width, m"},
        {"screen_distance", 5e-3, 1e-4, 1.0, "slits to screen, m"},
        {"pre_slit_distance", 2e-3, 0.0, 1.0, "shown travel before the slits, m"},
        {"n_grid", 4096, 512, 65536, "transverse grid points (power of two)"},
        {"half_extent", 2e-6, 1e-7, 1e-4, "transverse half extent, m"},
        {"frame_every", 2.5e-6, 1e-8, 1e-3, "density frame cadence, s"},
        {"view_dt", 4e-8, 1e-10, 1e-4, "kinematic snapshot cadence, s"},
        {"n_traj_display", 24, 1, 1000, "pilot trajectories to record"},
        {"n_candidates", 512, 1, 100000, "pre-slit starts sampled for the display set"},
        {"n_equiv", 10000, 100, 1000000, "ensemble size for the equivariance test"},
        {"equiv_bins", 40, 5, 500, "chi-square bins"},
        {"substeps", 4, 1, 64, "RK4 substeps per snapshot interval"},
    };
    return s;
}

} // namespace detail

namespace {

constexpr double kL0 = 1e-7; // m
constexpr double kT0 = 1e-6; // s

double slit_mask(double z, double center, double width, double smooth) {
    const double a = (z - center + 0.5 * width) / (M_SQRT2 * smooth);
    const double b = (z - center - 0.5 * width) / (M_SQRT2 * smooth);
    return 0.5 * (std::erf(a) - std::erf(b));
}

} // namespace

RunRecord run_c60(const ScenarioConfig& cfg) {
    // scaled parameters
    PhysicalParams params;
    params.mass = 1.0;
    params.hbar = cfg.get("hbar") * kT0 / (cfg.get("mass") * kL0 * kL0);

    const double d = cfg.get("slit_separation") / kL0;
    const double w = cfg.get("slit_width") / kL0;
    const double smooth = cfg.get("smoothing_frac") * w;
    const double sigma_in = cfg.get("sigma_beam") / kL0;
    const double v_beam = cfg.get("v_beam");
    const double t_pre = cfg.get("pre_slit_distance") / v_beam / kT0;
    const double t_post = cfg.get("screen_distance") / v_beam / kT0;
    const double frame_dt = cfg.get("frame_every") / kT0;
    const double view_dt = cfg.get("view_dt") / kT0;
    const std::size_t n = cfg.count("n_grid");
    const double L = cfg.get("half_extent") / kL0;
    const int substeps = static_cast<int>(cfg.count("substeps"));

    const Grid g = Grid::line_centered(n, L);
    MadelungOptions mo;
    mo.with_qpotential = false;

    RunRecord rec;
    rec.scenario = cfg.scenario;
    rec.seed = cfg.seed;
    rec.version = kVersion;
    rec.config_echo = cfg.values;

    auto emit_frame = [&](const char* name, double t_scaled,
                          const ComplexField& psi) {
        DensityFrame f;
        f.name = name;
        f.time = t_scaled * kT0;
        f.beam_coordinate = t_scaled * kT0 * v_beam;
        f.grid = Grid::line(n, g.origin(0) * kL0, g.spacing(0) * kL0);
        f.rho.resize(n);
        // rho in 1/m so that the frame integrates to 1 in SI
        for (std::size_t i = 0; i < n; ++i)
            f.rho[i] = std::norm(psi.values()[i]) / kL0;
        rec.frames.push_back(std::move(f));
    };

    // ---- incoming packet, pre-slit segment ---------------------------------
    ComplexField psi = gaussian_packet(g, 0.0, sigma_in, 0.0, params);

    SnapshotSequence pre_store;
    const auto pre_views = static_cast<std::size_t>(std::round(t_pre / view_dt));
    {
        ComplexField state = psi;
        pre_store.push(-t_pre, madelung_decompose(state, params, mo));
        for (std::size_t s = 1; s <= pre_views; ++s) {
            free_advance_inplace(state, params, view_dt);
            pre_store.push(-t_pre + view_dt * static_cast<double>(s),
                           madelung_decompose(state, params, mo));
        }
        psi = state; // state at the slit plane, pre-mask
    }

    // frames before the slits
    int frame_idx = 0;
    for (double tf = -t_pre; tf < -1e-9; tf += frame_dt) {
        ComplexField shown = psi; // evolve backward from slit plane is exact too
        free_advance_inplace(shown, params, tf);
        emit_frame(("frame_" + std::to_string(frame_idx++)).c_str(), tf, shown);
    }

    // ---- aperture mask ------------------------------------------------------
    double w_upper = 0.0, w_lower = 0.0;
    {
        for (std::size_t i = 0; i < n; ++i) {
            const double z = g.coord(0, i);
            const double a =
                slit_mask(z, +0.5 * d, w, smooth) + slit_mask(z, -0.5 * d, w, smooth);
            psi.values()[i] *= a;
        }
        normalize(psi);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::norm(psi.values()[i]) * g.cell_volume();
            (g.coord(0, i) > 0.0 ? w_upper : w_lower) += r;
        }
    }

    // ---- post-slit evolution with kinematic views ---------------------------
    SnapshotSequence post_store;
    const auto post_views = static_cast<std::size_t>(std::round(t_post / view_dt));
    {
        ComplexField state = psi;
        post_store.push(0.0, madelung_decompose(state, params, mo));
        for (std::size_t s = 1; s <= post_views; ++s) {
            free_advance_inplace(state, params, view_dt);
            post_store.push(view_dt * static_cast<double>(s),
                            madelung_decompose(state, params, mo));
        }
    }

    // frames at and after the slits
    for (double tf = 0.0; tf <= t_post + 1e-9; tf += frame_dt) {
        ComplexField shown = psi;
        free_advance_inplace(shown, params, tf);
        emit_frame(("frame_" + std::to_string(frame_idx++)).c_str(), tf, shown);
    }

    // ---- display trajectories: sampled before the slits ---------------------
    const CounterRng rng = cfg.rng();
    const std::size_t n_display = cfg.count("n_traj_display");
    const std::size_t n_cand = cfg.count("n_candidates");
    std::vector<Trajectory> display;
    std::size_t used_candidates = 0;
    {
        auto starts =
            sample_initial_positions(pre_store.view(0), n_cand, rng.fork("display"));
        TrajectoryBatch batch(starts, -t_pre);
        for (std::size_t s = 0; s + 1 < pre_store.size(); ++s) {
            batch.advance(pre_store.view(s), pre_store.time(s), pre_store.view(s + 1),
                          pre_store.time(s + 1), substeps);
            batch.record(pre_store.time(s + 1));
        }
        // aperture veto: keep candidates sitting in transmitted density
        const MadelungView& at_slit = post_store.view(0);
        double rho_max = 0.0;
        for (double r : at_slit.rho) rho_max = std::max(rho_max, r);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch.aborted(i)) continue;
            const auto r = at_slit.rho_at(batch.position(i));
            if (r && *r > 1e-6 * rho_max) keep.push_back(i);
        }

        // continue the survivors through the screen flight
        TrajectoryBatch post_batch(
            [&] {
                std::vector<std::array<double, 2>> xs;
                for (std::size_t i : keep) xs.push_back(batch.position(i));
                return xs;
            }(),
            0.0);
        for (std::size_t s = 0; s + 1 < post_store.size(); ++s) {
            post_batch.advance(post_store.view(s), post_store.time(s),
                               post_store.view(s + 1), post_store.time(s + 1),
                               substeps);
            post_batch.record(post_store.time(s + 1));
        }

        auto post_trajs = post_batch.take();
        for (std::size_t k = 0; k < keep.size() && display.size() < n_display; ++k) {
            if (post_trajs[k].aborted) continue;
            // stitch the pre-slit segment in front
            Trajectory full = batch.trajectory(keep[k]);
            const Trajectory& tail = post_trajs[k];
            full.times.insert(full.times.end(), tail.times.begin() + 1,
                              tail.times.end());
            full.positions.insert(full.positions.end(), tail.positions.begin() + 1,
                                  tail.positions.end());
            full.label = static_cast<int>(display.size());
            display.push_back(std::move(full));
            used_candidates = keep[k] + 1;
        }
    }

    // crossing check on the display set (positions share time stamps)
    std::size_t crossings = 0;
    std::size_t axis_crossings = 0;
    for (std::size_t a = 0; a < display.size(); ++a) {
        bool crossed_axis = false;
        for (std::size_t s = 0; s < display[a].times.size(); ++s) {
            if (display[a].positions[s][0] * display[a].positions[0][0] < 0.0)
                crossed_axis = true;
        }
        if (crossed_axis) ++axis_crossings;
        for (std::size_t b = a + 1; b < display.size(); ++b) {
            bool was_less =
                display[a].positions[0][0] < display[b].positions[0][0];
            for (std::size_t s = 1; s < display[a].times.size(); ++s) {
                if ((display[a].positions[s][0] < display[b].positions[s][0]) !=
                    was_less) {
                    ++crossings;
                    break;
                }
            }
        }
    }

    // ---- equivariance ensemble ----------------------------------------------
    const std::size_t n_equiv = cfg.count("n_equiv");
    std::vector<double> finals;
    std::size_t equiv_aborts = 0;
    {
        auto starts = sample_initial_positions(post_store.view(0), n_equiv,
                                               rng.fork("equivariance"));
        TrajectoryBatch batch(starts, 0.0);
        for (std::size_t s = 0; s + 1 < post_store.size(); ++s)
            batch.advance(post_store.view(s), post_store.time(s),
                          post_store.view(s + 1), post_store.time(s + 1), substeps);
        batch.record(t_post);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch.aborted(i)) {
                ++equiv_aborts;
                continue;
            }
            finals.push_back(batch.position(i)[0]);
        }
    }

    const MadelungView& screen = post_store.view(post_store.size() - 1);
    // histogram range: central band holding ~99% of the pattern
    double lo = 0.0, hi = 0.0;
    {
        std::vector<double> cum(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + screen.rho[i];
        const double total = cum[n];
        auto quantile = [&](double q) {
            const double target = q * total;
            std::size_t i = 0;
            while (i < n && cum[i + 1] < target) ++i;
            return g.coord(0, i);
        };
        lo = quantile(0.005);
        hi = quantile(0.995);
    }
    const auto chi2 = stats::chi2_against_density(
        finals, g, screen.rho, lo, hi, cfg.count("equiv_bins"));

    // ---- fringe spacing -------------------------------------------------------
    const double lambda_db =
        2.0 * M_PI * params.hbar / (1.0 * v_beam * kT0 / kL0); // scaled
    bool regime_warn = false;
    const double spacing_oracle =
        oracle::fringe_spacing(lambda_db, d, t_post * (v_beam * kT0 / kL0),
                               &regime_warn); // scaled
    const double k_f = 2.0 * M_PI / spacing_oracle;
    const double spacing_meas =
        stats::dominant_fringe_period(g, screen.rho, 0.4 * k_f, 2.5 * k_f);

    // central bright fringe: density at z=0 is a local maximum
    const std::size_t mid = n / 2;
    const bool central_max = screen.rho[mid] >= screen.rho[mid - 4] &&
                             screen.rho[mid] >= screen.rho[mid + 4];

    // ---- record ----------------------------------------------------------------
    for (auto& t : display) {
        for (auto& tt : t.times) tt *= kT0;
        for (auto& p : t.positions) p[0] *= kL0;
    }
    rec.trajectories = std::move(display);

    rec.statistics["fringe_spacing_measured_m"] = spacing_meas * kL0;
    rec.statistics["fringe_spacing_oracle_m"] = spacing_oracle * kL0;
    rec.statistics["fringe_rel_err"] =
        std::abs(spacing_meas - spacing_oracle) / spacing_oracle;
    rec.statistics["fringe_regime_warning"] = regime_warn ? 1.0 : 0.0;
    rec.statistics["central_fringe_is_max"] = central_max ? 1.0 : 0.0;
    rec.statistics["equiv_chi2"] = chi2.chi2;
    rec.statistics["equiv_dof"] = static_cast<double>(chi2.dof);
    rec.statistics["equiv_p_value"] = chi2.p_value;
    rec.statistics["equiv_aborts"] = static_cast<double>(equiv_aborts);
    rec.statistics["equiv_abort_frac"] =
        static_cast<double>(equiv_aborts) / static_cast<double>(n_equiv);
    rec.statistics["slit_weight_upper"] = w_upper;
    rec.statistics["slit_weight_upper_sigma"] =
        stats::binomial_sigma(w_upper, n_equiv);
    rec.statistics["slit_weight_lower"] = w_lower;
    rec.statistics["display_trajectories"] = static_cast<double>(rec.trajectories.size());
    rec.statistics["display_candidates_used"] = static_cast<double>(used_candidates);
    rec.statistics["display_pair_crossings"] = static_cast<double>(crossings);
    rec.statistics["display_axis_crossings"] = static_cast<double>(axis_crossings);
    rec.statistics["frames"] = static_cast<double>(rec.frames.size());

    rec.notes.push_back("slits modeled as an erf-smoothed aperture mask at t=0");
    rec.notes.push_back("beam coordinate of each frame: y = v_beam * t");
    return rec;
}

} // namespace pilotwave
