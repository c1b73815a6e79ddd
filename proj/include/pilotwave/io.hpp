#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pilotwave/scenario.hpp"

namespace pilotwave::io {

// Raw key/value config text: `key = value` lines, '#' comments, blank lines.
// Special keys: format_version (must be 1), scenario, seed.
struct RawConfig {
    int format_version = 1;
    std::string scenario;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::map<std::string, std::string> entries;
};

RawConfig parse_config_text(const std::string& text, const std::string& origin);
RawConfig parse_config_file(const std::filesystem::path& path);

ScenarioConfig resolve(const RawConfig& raw);

// Rendered default config for a scenario (also used by --print-defaults).
std::string defaults_text(const std::string& scenario_id);

// Locale-independent float formatting, 17 significant digits.
std::string format_double(double v);

// FNV-1a 64-bit over raw bytes, lowercase hex.
std::uint64_t fnv1a64_bytes(const void* data, std::size_t size);
std::string file_checksum_hex(const std::filesystem::path& path);

// ---- exports ----------------------------------------------------------------

// CSV with coordinates + rho (x,rho or x,y,rho), and the matching binary P5
// portable graymap (row-major, value = round(255 * rho / rho_max)).
void export_density_csv(const DensityFrame& frame, const std::filesystem::path& path);
void export_density_pgm(const DensityFrame& frame, const std::filesystem::path& path);

// Re-import of the CSV (round-trip checked in tests).
DensityFrame import_density_csv(const std::filesystem::path& path);

void export_trajectories_csv(const std::vector<Trajectory>& trajectories,
                             int dims, const std::filesystem::path& path);

void export_stats_kv(const RunRecord& rec, const std::filesystem::path& path);
void export_stats_text(const RunRecord& rec, const std::filesystem::path& path);

// ---- run orchestration ---------------------------------------------------------

struct RunArgs {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed_override;
    bool force = false;
};

// Executes a scenario end to end; returns the process exit code. The manifest
// is written last: its presence marks a completed run. Failures leave a
// machine-readable error.json in the output directory when possible.
int run(const RunArgs& args);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitValidation = 4;
inline constexpr int kExitDomain = 5;
inline constexpr int kExitNumeric = 6;
inline constexpr int kExitIo = 7;

int exit_code_for_current_exception();

} // namespace pilotwave::io
