#include "pilotwave/stats.hpp"

#include <algorithm>
#include <cmath>

namespace pilotwave::stats {

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ValidationError("gamma_q needs x>=0, a>0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double chi2, std::size_t dof) {
    return gamma_q(0.5 * static_cast<double>(dof), 0.5 * chi2);
}

Histogram histogram(const std::vector<double>& samples, double lo, double hi,
                    std::size_t nbins) {
    if (!(hi > lo) || nbins == 0) throw ValidationError("bad histogram range");
    Histogram h{lo, hi, std::vector<std::size_t>(nbins, 0)};
    const double w = (hi - lo) / static_cast<double>(nbins);
    for (double s : samples) {
        if (s < lo || s >= hi) continue;
        ++h.counts[static_cast<std::size_t>((s - lo) / w)];
    }
    return h;
}

std::size_t Histogram::total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

namespace {

// Integral of a piecewise-linear density profile over [a, b].
double integrate_profile(const Grid& grid, const std::vector<double>& rho, double a,
                         double b) {
    const double h = grid.spacing(0);
    const std::size_t n = grid.npoints(0);
    auto value_at = [&](double x) -> double {
        const double u = (x - grid.origin(0)) / h;
        if (u <= 0.0 || u >= static_cast<double>(n - 1)) return 0.0;
        const auto i = static_cast<std::size_t>(u);
        const double f = u - static_cast<double>(i);
        return (1.0 - f) * rho[i] + f * rho[i + 1];
    };
    // composite trapezoid with ~4 points per cell
    const int steps = std::max(8, static_cast<int>(std::ceil((b - a) / h * 4.0)));
    const double dx = (b - a) / steps;
    double sum = 0.5 * (value_at(a) + value_at(b));
    for (int i = 1; i < steps; ++i) sum += value_at(a + dx * i);
    return sum * dx;
}

} // namespace

Chi2Result chi2_against_density(const std::vector<double>& samples,
                                const Grid& grid, const std::vector<double>& rho,
                                double lo, double hi, std::size_t nbins) {
    const Histogram h = histogram(samples, lo, hi, nbins);
    const double n_in = static_cast<double>(h.total());
    if (n_in == 0.0) throw ValidationError("no samples in chi2 range");

    // Expected bin probabilities, renormalized over [lo, hi].
    std::vector<double> expected(nbins);
    double mass = 0.0;
    const double w = h.bin_width();
    for (std::size_t b = 0; b < nbins; ++b) {
        expected[b] = integrate_profile(grid, rho, lo + w * b, lo + w * (b + 1));
        mass += expected[b];
    }
    for (auto& e : expected) e *= n_in / mass;

    // Merge bins until every expected count is >= 5.
    std::vector<double> exp_m;
    std::vector<double> obs_m;
    double e_acc = 0.0, o_acc = 0.0;
    for (std::size_t b = 0; b < nbins; ++b) {
        e_acc += expected[b];
        o_acc += static_cast<double>(h.counts[b]);
        if (e_acc >= 5.0) {
            exp_m.push_back(e_acc);
            obs_m.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_acc > 0.0 && !exp_m.empty()) {
        exp_m.back() += e_acc;
        obs_m.back() += o_acc;
    }
    if (exp_m.size() < 2) throw ValidationError("too few populated chi2 bins");

    Chi2Result r;
    for (std::size_t b = 0; b < exp_m.size(); ++b) {
        const double d = obs_m[b] - exp_m[b];
        r.chi2 += d * d / exp_m[b];
    }
    r.dof = exp_m.size() - 1;
    r.p_value = chi2_sf(r.chi2, r.dof);
    return r;
}

std::vector<Peak> find_peaks(const Grid& grid, const std::vector<double>& profile,
                             double min_fraction) {
    const std::size_t n = grid.npoints(0);
    double top = 0.0;
    for (double v : profile) top = std::max(top, v);

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (profile[i] <= profile[i - 1] || profile[i] <= profile[i + 1]) continue;
        if (profile[i] < min_fraction * top) continue;
        const double fm = profile[i - 1], f0 = profile[i], fp = profile[i + 1];
        const double denom = fm - 2.0 * f0 + fp;
        double delta = 0.0;
        if (denom < 0.0) delta = 0.5 * (fm - fp) / denom;
        peaks.push_back({grid.coord(0, i) + delta * grid.spacing(0),
                         f0 - 0.25 * (fm - fp) * delta});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

double measure_fringe_spacing(const Grid& grid, const std::vector<double>& profile) {
    auto peaks = find_peaks(grid, profile, 0.02);
    if (peaks.size() < 3)
        throw ValidationError("fewer than three fringes in the profile");

    // Central peak = the one closest to the density-weighted center.
    double xc = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < grid.npoints(0); ++i) {
        xc += grid.coord(0, i) * profile[i];
        mass += profile[i];
    }
    xc /= mass;

    const Peak* central = &peaks[0];
    for (const auto& p : peaks)
        if (std::abs(p.x - xc) < std::abs(central->x - xc)) central = &p;

    // Nearest peaks on either side of the central one.
    const Peak* left = nullptr;
    const Peak* right = nullptr;
    for (const auto& p : peaks) {
        if (p.x < central->x && (!left || p.x > left->x)) left = &p;
        if (p.x > central->x && (!right || p.x < right->x)) right = &p;
    }
    if (!left || !right)
        throw ValidationError("no first-order fringe pair around the center");
    return 0.5 * (right->x - left->x);
}

double dominant_fringe_period(const Grid& grid, const std::vector<double>& profile,
                              double k_lo, double k_hi) {
    const std::size_t n = grid.npoints(0);
    if (!(k_hi > k_lo) || k_lo < 0.0)
        throw ValidationError("bad wavenumber bracket");

    // High-pass first: subtract a Gaussian-smoothed copy so the envelope's
    // spectral lobe cannot tilt the fringe peak, then Hann-window and project
    // onto exp(-i k x), refining parabolically around the strongest bin.
    std::vector<double> detrended(n);
    {
        const double k_mid = 0.5 * (k_lo + k_hi);
        const double sig = 0.65 * 2.0 * M_PI / k_mid; // ~0.65 fringe periods
        const double h = grid.spacing(0);
        const int reach = std::min<int>(static_cast<int>(std::ceil(4.0 * sig / h)),
                                        static_cast<int>(n) - 1);
        std::vector<double> kern(2 * reach + 1);
        double ksum = 0.0;
        for (int j = -reach; j <= reach; ++j) {
            kern[j + reach] = std::exp(-0.5 * (j * h) * (j * h) / (sig * sig));
            ksum += kern[j + reach];
        }
        for (auto& k : kern) k /= ksum;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = -reach; j <= reach; ++j) {
                const std::ptrdiff_t idx =
                    std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) + j, 0,
                                               static_cast<std::ptrdiff_t>(n) - 1);
                acc += kern[j + reach] * profile[idx];
            }
            detrended[i] = profile[i] - acc;
        }
    }

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                     static_cast<double>(n - 1))) *
               detrended[i];

    const std::size_t nk = 2048;
    auto power = [&](double k) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = grid.coord(0, i);
            re += w[i] * std::cos(k * x);
            im += w[i] * std::sin(k * x);
        }
        return re * re + im * im;
    };

    std::size_t best = 0;
    double best_p = -1.0;
    std::vector<double> ps(nk);
    for (std::size_t j = 0; j < nk; ++j) {
        const double k = k_lo + (k_hi - k_lo) * static_cast<double>(j) /
                                    static_cast<double>(nk - 1);
        ps[j] = power(k);
        if (ps[j] > best_p) {
            best_p = ps[j];
            best = j;
        }
    }
    if (best == 0 || best == nk - 1)
        throw ValidationError("fringe spectral peak at the bracket edge");

    const double dk = (k_hi - k_lo) / static_cast<double>(nk - 1);
    const double fm = ps[best - 1], f0 = ps[best], fp = ps[best + 1];
    const double denom = fm - 2.0 * f0 + fp;
    double delta = 0.0;
    if (denom < 0.0) delta = 0.5 * (fm - fp) / denom;
    const double k_star = k_lo + dk * (static_cast<double>(best) + delta);
    return 2.0 * M_PI / k_star;
}

double fringe_visibility(const Grid& grid, const std::vector<double>& profile,
                         double period, double lo, double hi) {
    // Hann-windowed single-bin Fourier probe; the window kills the leakage a
    // hard cut at [lo, hi] would produce for an off-period span.
    double re = 0.0, im = 0.0, mean = 0.0;
    std::size_t count = 0;
    const double k = 2.0 * M_PI / period;
    for (std::size_t i = 0; i < grid.npoints(0); ++i) {
        const double x = grid.coord(0, i);
        if (x < lo || x > hi) continue;
        const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * (x - lo) / (hi - lo)));
        re += w * profile[i] * std::cos(k * x);
        im += w * profile[i] * std::sin(k * x);
        mean += w * profile[i];
        ++count;
    }
    if (count == 0 || mean <= 0.0) return 0.0;
    return 2.0 * std::sqrt(re * re + im * im) / mean;
}

double l1_distance(const Histogram& a, const Histogram& b) {
    if (a.counts.size() != b.counts.size())
        throw ValidationError("histogram bin mismatch");
    const double na = static_cast<double>(a.total());
    const double nb = static_cast<double>(b.total());
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        l1 += std::abs(static_cast<double>(a.counts[i]) / na -
                       static_cast<double>(b.counts[i]) / nb);
    return l1;
}

double l1_distance(const Histogram& a, const Grid& grid,
                   const std::vector<double>& rho) {
    const double na = static_cast<double>(a.total());
    const double w = a.bin_width();
    std::vector<double> expected(a.counts.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i) {
        expected[i] = integrate_profile(grid, rho, a.lo + w * i, a.lo + w * (i + 1));
        mass += expected[i];
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        l1 += std::abs(static_cast<double>(a.counts[i]) / na - expected[i] / mass);
    return l1;
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    m.n = xs.size();
    if (m.n == 0) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(m.n - 1));
    }
    return m;
}

} // namespace pilotwave::stats
