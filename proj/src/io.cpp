#include "pilotwave/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pilotwave::io {

namespace fs = std::filesystem;

// ---- parsing -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

RawConfig parse_config_text(const std::string& text, const std::string& origin) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ":" +
                             std::to_string(line.size()) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ":1: empty key");
        if (value.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ":" +
                             std::to_string(eq + 2) + ": empty value for '" + key + "'");

        if (key == "format_version") {
            raw.format_version = std::atoi(value.c_str());
            if (raw.format_version != 1)
                throw SchemaError(origin + ":" + std::to_string(lineno) +
                                  ": unsupported format_version " + value);
        } else if (key == "scenario") {
            raw.scenario = value;
        } else if (key == "seed") {
            char* end = nullptr;
            raw.seed = std::strtoull(value.c_str(), &end, 10);
            if (end == value.c_str() || *end != '\0')
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": seed must be a nonnegative integer");
            raw.seed_given = true;
        } else {
            if (raw.entries.count(key))
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": duplicate key '" + key + "'");
            raw.entries[key] = value;
        }
    }
    if (raw.scenario.empty())
        throw SchemaError(origin + ": missing required key 'scenario'");
    return raw;
}

RawConfig parse_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.filename().string());
}

ScenarioConfig resolve(const RawConfig& raw) {
    return resolve_config(raw.scenario, raw.entries, raw.seed);
}

std::string defaults_text(const std::string& scenario_id) {
    const ScenarioEntry* entry = find_scenario(scenario_id);
    if (!entry) throw SchemaError("unknown scenario '" + scenario_id + "'");

    std::ostringstream out;
    out << "# " << entry->schema.summary << "\n";
    out << "format_version = 1\n";
    out << "scenario = " << scenario_id << "\n";
    out << "seed = 0\n";
    for (const auto& p : entry->schema.params)
        out << p.key << " = " << format_double(p.def) << "  # " << p.doc << "\n";
    for (const auto& e : entry->schema.enums) {
        out << e.key << " = " << e.def << "  # " << e.doc << " (";
        for (std::size_t i = 0; i < e.allowed.size(); ++i)
            out << (i ? "|" : "") << e.allowed[i];
        out << ")\n";
    }
    return out.str();
}

// ---- formatting / hashing ------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_checksum_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file for checksum: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_bytes(bytes.data(), bytes.size())));
    return buf;
}

// ---- exports ----------------------------------------------------------------------

void export_density_csv(const DensityFrame& frame, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const Grid& g = frame.grid;
    if (g.dims() == 1) {
        out << "x,rho\n";
        for (std::size_t i = 0; i < g.npoints(0); ++i)
            out << format_double(g.coord(0, i)) << ","
                << format_double(frame.rho[i]) << "\n";
    } else {
        out << "x,y,rho\n";
        for (std::size_t i = 0; i < g.npoints(0); ++i)
            for (std::size_t j = 0; j < g.npoints(1); ++j)
                out << format_double(g.coord(0, i)) << ","
                    << format_double(g.coord(1, j)) << ","
                    << format_double(frame.rho[g.index(i, j)]) << "\n";
    }
    if (!out) throw IoError("write failure on " + path.string());
}

void export_density_pgm(const DensityFrame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const Grid& g = frame.grid;
    const std::size_t w = g.dims() == 1 ? g.npoints(0) : g.npoints(1);
    const std::size_t h = g.dims() == 1 ? 1 : g.npoints(0);

    double rho_max = 0.0;
    for (double r : frame.rho) rho_max = std::max(rho_max, r);

    out << "P5\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> row(w);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const double r = frame.rho[i * w + j];
            row[j] = rho_max > 0.0
                         ? static_cast<unsigned char>(
                               std::lround(255.0 * r / rho_max))
                         : 0;
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(w));
    }
    if (!out) throw IoError("write failure on " + path.string());
}

DensityFrame import_density_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string header;
    std::getline(in, header);
    const bool two_d = header.find("x,y,rho") == 0;

    std::vector<double> xs, ys, rho;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ','))
            vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.size() != (two_d ? 3u : 2u))
            throw ParseError(path.string() + ": malformed CSV row");
        xs.push_back(vals[0]);
        if (two_d) ys.push_back(vals[1]);
        rho.push_back(vals.back());
    }
    if (rho.size() < 8) throw ParseError(path.string() + ": too few rows");

    DensityFrame frame;
    frame.name = path.stem().string();
    if (!two_d) {
        frame.grid = Grid::line(xs.size(), xs.front(), xs[1] - xs[0]);
    } else {
        // rows grouped by x: count distinct x values
        std::size_t n1 = 1;
        while (n1 < xs.size() && xs[n1] == xs[0]) ++n1;
        const std::size_t n0 = xs.size() / n1;
        frame.grid = Grid::plane(n0, n1, xs.front(), ys.front(), xs[n1] - xs[0],
                                 ys[1] - ys[0]);
    }
    frame.rho = std::move(rho);
    return frame;
}

void export_trajectories_csv(const std::vector<Trajectory>& trajectories,
                             int dims, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const bool spin = !trajectories.empty() && !trajectories.front().theta.empty();
    out << "label,t," << (dims == 1 ? "x" : "x0,x1");
    if (spin) out << ",theta,phi";
    out << ",aborted,abort_time\n";
    for (const auto& traj : trajectories) {
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            out << traj.label << "," << format_double(traj.times[s]) << ","
                << format_double(traj.positions[s][0]);
            if (dims == 2) out << "," << format_double(traj.positions[s][1]);
            if (spin) {
                const double th = s < traj.theta.size() ? traj.theta[s] : 0.0;
                const double ph = s < traj.phi.size() ? traj.phi[s] : 0.0;
                out << "," << format_double(th) << "," << format_double(ph);
            }
            out << "," << (traj.aborted ? 1 : 0) << ","
                << format_double(traj.aborted ? traj.abort_time : 0.0) << "\n";
        }
    }
    if (!out) throw IoError("write failure on " + path.string());
}

void export_stats_kv(const RunRecord& rec, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "scenario = " << rec.scenario << "\n";
    out << "seed = " << rec.seed << "\n";
    out << "version = " << rec.version << "\n";
    for (const auto& [k, v] : rec.statistics)
        out << k << " = " << format_double(v) << "\n";
    if (!out) throw IoError("write failure on " + path.string());
}

void export_stats_text(const RunRecord& rec, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "scenario: " << rec.scenario << " (seed " << rec.seed << ", version "
        << rec.version << ")\n\n";
    out << "statistics:\n";
    for (const auto& [k, v] : rec.statistics)
        out << "  " << k << " = " << format_double(v) << "\n";
    if (!rec.notes.empty()) {
        out << "\nnotes:\n";
        for (const auto& n : rec.notes) out << "  - " << n << "\n";
    }
    if (!out) throw IoError("write failure on " + path.string());
}

// ---- run orchestration ---------------------------------------------------------------

namespace {

int trajectory_dims(const RunRecord& rec) {
    for (const auto& t : rec.trajectories)
        for (const auto& p : t.positions)
            if (p[1] != 0.0) return 2;
    return rec.scenario == "epr_b" ? 2 : 1;
}

} // namespace

int exit_code_for_current_exception() {
    try {
        throw;
    } catch (const ParseError&) {
        return kExitParse;
    } catch (const SchemaError&) {
        return kExitSchema;
    } catch (const ValidationError&) {
        return kExitValidation;
    } catch (const NormalizationError&) {
        return kExitValidation;
    } catch (const DomainError&) {
        return kExitDomain;
    } catch (const ResolutionError&) {
        return kExitDomain;
    } catch (const StepSizeError&) {
        return kExitNumeric;
    } catch (const BlowupError&) {
        return kExitNumeric;
    } catch (const LowDensityError&) {
        return kExitNumeric;
    } catch (const CausticError&) {
        return kExitNumeric;
    } catch (const CoverageError&) {
        return kExitNumeric;
    } catch (const IoError&) {
        return kExitIo;
    } catch (...) {
        return kExitFailure;
    }
}

int run(const RunArgs& args) {
    nlohmann::json error_record;
    fs::path out_dir = args.out_dir;

    try {
        RawConfig raw = parse_config_file(args.config_path);
        if (args.seed_override) {
            raw.seed = *args.seed_override;
            raw.seed_given = true;
        }
        ScenarioConfig cfg = resolve(raw);

        if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !args.force)
            throw IoError("output directory " + out_dir.string() +
                          " is not empty (use --force to overwrite)");
        fs::create_directories(out_dir);
        fs::create_directories(out_dir / "frames");

        const ScenarioEntry* entry = find_scenario(cfg.scenario);
        RunRecord rec = entry->run(cfg);

        // resolved config echo
        std::vector<fs::path> written;
        {
            const fs::path p = out_dir / "config_resolved.cfg";
            std::ofstream out(p);
            out << "format_version = 1\n";
            out << "scenario = " << cfg.scenario << "\n";
            out << "seed = " << cfg.seed << "\n";
            for (const auto& [k, v] : cfg.values)
                out << k << " = " << format_double(v) << "\n";
            for (const auto& [k, v] : cfg.options) out << k << " = " << v << "\n";
            written.push_back(p);
        }

        for (const auto& frame : rec.frames) {
            const fs::path csv = out_dir / "frames" / (frame.name + ".csv");
            const fs::path pgm = out_dir / "frames" / (frame.name + ".pgm");
            export_density_csv(frame, csv);
            export_density_pgm(frame, pgm);
            written.push_back(csv);
            written.push_back(pgm);
        }

        {
            const fs::path p = out_dir / "trajectories.csv";
            export_trajectories_csv(rec.trajectories, trajectory_dims(rec), p);
            written.push_back(p);
        }
        {
            const fs::path p1 = out_dir / "stats.kv";
            const fs::path p2 = out_dir / "stats.txt";
            export_stats_kv(rec, p1);
            export_stats_text(rec, p2);
            written.push_back(p1);
            written.push_back(p2);
        }

        // manifest last: its presence marks success
        nlohmann::json manifest;
        manifest["format_version"] = 1;
        manifest["scenario"] = rec.scenario;
        manifest["seed"] = rec.seed;
        manifest["version"] = rec.version;
        manifest["config_file"] = args.config_path.string();
        {
            const auto now = std::chrono::system_clock::now();
            manifest["timestamp_unix"] =
                std::chrono::duration_cast<std::chrono::seconds>(
                    now.time_since_epoch())
                    .count();
        }
        nlohmann::json files = nlohmann::json::array();
        for (const auto& p : written) {
            nlohmann::json f;
            f["path"] = fs::relative(p, out_dir).generic_string();
            f["fnv1a64"] = file_checksum_hex(p);
            f["bytes"] = static_cast<std::uint64_t>(fs::file_size(p));
            files.push_back(f);
        }
        manifest["files"] = files;
        {
            std::ofstream out(out_dir / "manifest.json");
            out << manifest.dump(2) << "\n";
            if (!out) throw IoError("cannot write manifest");
        }
        return kExitOk;
    } catch (const std::exception& e) {
        const int code = exit_code_for_current_exception();
        error_record["error"] = e.what();
        error_record["exit_code"] = code;
        std::fprintf(stderr, "error: %s\n", e.what());
        if (fs::exists(out_dir)) {
            std::ofstream out(out_dir / "error.json");
            out << error_record.dump(2) << "\n";
        }
        return code;
    }
}

} // namespace pilotwave::io
