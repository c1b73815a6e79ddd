#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pilotwave {

inline constexpr const char* kVersion = "1.0.0";

using cplx = std::complex<double>;

// CODATA 2018 values. hbar is deliberately a runtime parameter everywhere
// (classical-limit sweeps rescale it); these are just the SI defaults.
namespace si {
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double planck_h = 6.62607015e-34; // J s
inline constexpr double mu_bohr = 9.2740100783e-24; // J/T
} // namespace si

// Error taxonomy. Every throwing path in the library uses one of these so
// the CLI can map failures to distinct exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResolutionError : Error { using Error::Error; };   // grid too coarse
struct DomainError : Error { using Error::Error; };       // packet clipped / out of range
struct StepSizeError : Error { using Error::Error; };     // potential phase aliasing
struct BlowupError : Error { using Error::Error; };       // NaN/Inf detected
struct LowDensityError : Error { using Error::Error; };   // query in masked region
struct NormalizationError : Error { using Error::Error; };
struct CausticError : Error { using Error::Error; };      // multivalued classical flow
struct CoverageError : Error { using Error::Error; };     // minimizer on grid boundary
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace pilotwave
