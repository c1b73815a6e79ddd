#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pilotwave/madelung.hpp"

namespace pilotwave::stats {

// Regularized upper incomplete gamma Q(a, x); chi-square survival function
// is chi2_sf(x, k) = Q(k/2, x/2).
double gamma_q(double a, double x);
double chi2_sf(double chi2, std::size_t dof);

struct Histogram {
    double lo = 0.0, hi = 0.0;
    std::vector<std::size_t> counts;

    std::size_t total() const;
    double bin_width() const {
        return (hi - lo) / static_cast<double>(counts.size());
    }
};

Histogram histogram(const std::vector<double>& samples, double lo, double hi,
                    std::size_t nbins);

// Chi-square goodness of fit of samples against a density profile given on a
// grid. Bins with expected count < 5 are merged into their neighbour.
struct Chi2Result {
    double chi2 = 0.0;
    std::size_t dof = 0;
    double p_value = 0.0;
};

Chi2Result chi2_against_density(const std::vector<double>& samples,
                                const Grid& grid, const std::vector<double>& rho,
                                double lo, double hi, std::size_t nbins);

// Local maxima of a sampled profile with 3-point parabolic refinement,
// strongest first; `min_fraction` discards peaks below that fraction of the
// global maximum.
struct Peak {
    double x;
    double height;
};

std::vector<Peak> find_peaks(const Grid& grid, const std::vector<double>& profile,
                             double min_fraction = 0.05);

// Fringe spacing as half the distance between the first-order maxima around
// the central peak (robust against envelope tilt in the far field).
double measure_fringe_spacing(const Grid& grid, const std::vector<double>& profile);

// Fringe period from the dominant spectral component of the profile inside
// [k_lo, k_hi] (Hann-windowed, 3-point parabolic peak refinement). Unlike the
// peak-pair estimate this is unbiased under a symmetric envelope, which pulls
// real-space maxima inward when only a few orders fit under it.
double dominant_fringe_period(const Grid& grid, const std::vector<double>& profile,
                              double k_lo, double k_hi);

// Fringe visibility at spatial period `period` inside [lo, hi]: amplitude of
// the Fourier component at 1/period relative to the local mean.
double fringe_visibility(const Grid& grid, const std::vector<double>& profile,
                         double period, double lo, double hi);

// L1 distance between two normalized histograms over identical bins; in [0, 2].
double l1_distance(const Histogram& a, const Histogram& b);
// Same, with one side given as a density profile integrated over the bins.
double l1_distance(const Histogram& a, const Grid& grid,
                   const std::vector<double>& rho);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0; // standard error of the mean is stddev/sqrt(n)
    std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& xs);

inline double binomial_sigma(double p, std::size_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace pilotwave::stats
