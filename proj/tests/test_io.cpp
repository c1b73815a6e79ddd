#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "pilotwave/io.hpp"
#include "pilotwave/scenario.hpp"

using namespace pilotwave;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("pilotwave_test_" + tag);
    fs::remove_all(p);
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing: comments, errors with line numbers") {
    auto raw = io::parse_config_text(
        "# a comment\n"
        "format_version = 1\n"
        "scenario = two_body\n"
        "seed = 42\n"
        "gravity = 0.25  # inline comment\n",
        "t.cfg");
    CHECK(raw.scenario == "two_body");
    CHECK(raw.seed == 42);
    CHECK(raw.entries.at("gravity") == "0.25");

    CHECK_THROWS_AS(io::parse_config_text("scenario two_body\n", "t.cfg"), ParseError);
    CHECK_THROWS_AS(io::parse_config_text("x = 1\n", "t.cfg"), SchemaError); // no scenario
    CHECK_THROWS_AS(
        io::parse_config_text("scenario = two_body\ng = 1\ng = 2\n", "t.cfg"),
        ParseError); // duplicate
    CHECK_THROWS_AS(
        io::parse_config_text("format_version = 9\nscenario = two_body\n", "t.cfg"),
        SchemaError);

    try {
        io::parse_config_text("scenario = two_body\nbroken line\n", "t.cfg");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("t.cfg:2") != std::string::npos);
    }
}

TEST_CASE("empty stern_gerlach config resolves to the published defaults") {
    auto raw = io::parse_config_text("scenario = stern_gerlach\n", "t.cfg");
    auto cfg = io::resolve(raw);
    CHECK(cfg.get("theta0") == doctest::Approx(M_PI / 3).epsilon(1e-15));
    CHECK(cfg.get("phi0") == 0.0);
    CHECK(cfg.get("b0") == 5.0);
    CHECK(cfg.get("bprime") == 1e3);
    CHECK(cfg.get("sigma0") == 1e-4);
    CHECK(cfg.get("v_beam") == 500.0);
    CHECK(cfg.get("mass") == 1.8e-25);
    CHECK(cfg.get("field_length") == 0.01);
    CHECK(cfg.get("plate_distance") == 0.2);
}

TEST_CASE("schema violations are named") {
    auto raw = io::parse_config_text("scenario = stern_gerlach\nsigma0 = -1\n", "t.cfg");
    CHECK_THROWS_AS(io::resolve(raw), ValidationError);

    auto raw2 = io::parse_config_text("scenario = stern_gerlach\nbogus = 1\n", "t.cfg");
    CHECK_THROWS_AS(io::resolve(raw2), SchemaError);

    auto raw3 = io::parse_config_text(
        "scenario = asym_interference\nhypothesis = maybe\n", "t.cfg");
    CHECK_THROWS_AS(io::resolve(raw3), ValidationError);
}

TEST_CASE("defaults text parses back to the same resolved config") {
    for (const auto& id : scenario_ids()) {
        const std::string text = io::defaults_text(id);
        auto raw = io::parse_config_text(text, "defaults.cfg");
        auto cfg = io::resolve(raw);
        CHECK(cfg.scenario == id);
    }
}

TEST_CASE("density csv round-trips at full precision") {
    PhysicalParams params;
    Grid g = Grid::line_centered(256, 8.0);
    auto psi = gaussian_packet(g, 0.3, 1.0, 0.0, params);
    DensityFrame frame;
    frame.name = "roundtrip";
    frame.grid = g;
    frame.rho.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        frame.rho[i] = std::norm(psi.values()[i]);

    const auto dir = temp_dir("csv");
    fs::create_directories(dir);
    const auto path = dir / "density.csv";
    io::export_density_csv(frame, path);
    auto back = io::import_density_csv(path);

    REQUIRE(back.rho.size() == frame.rho.size());
    for (std::size_t i = 0; i < frame.rho.size(); ++i)
        CHECK(back.rho[i] == frame.rho[i]); // bitwise round trip
    fs::remove_all(dir);
}

TEST_CASE("pgm export: constant field is uniform 255, gaussian decays radially") {
    const auto dir = temp_dir("pgm");
    fs::create_directories(dir);

    DensityFrame flat;
    flat.name = "flat";
    flat.grid = Grid::line(16, 0.0, 1.0);
    flat.rho.assign(16, 0.7);
    io::export_density_pgm(flat, dir / "flat.pgm");
    const std::string bytes = read_file(dir / "flat.pgm");
    CHECK(bytes.substr(0, 2) == "P5");
    const auto pixels = bytes.substr(bytes.size() - 16);
    for (char c : pixels) CHECK(static_cast<unsigned char>(c) == 255);

    PhysicalParams params;
    Grid g = Grid::plane_centered(32, 32, 4.0, 4.0);
    auto psi = gaussian_packet(g, {0.0, 0.0}, {1.0, 1.0}, {0.0, 0.0}, params);
    DensityFrame gauss;
    gauss.name = "gauss";
    gauss.grid = g;
    gauss.rho.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        gauss.rho[i] = std::norm(psi.values()[i]);
    io::export_density_pgm(gauss, dir / "gauss.pgm");
    const std::string gb = read_file(dir / "gauss.pgm");
    // header "P5\n32 32\n255\n" then raw pixels; center row decays outward
    const std::size_t off = gb.size() - 32 * 32;
    auto pixel = [&](std::size_t r, std::size_t c) {
        return static_cast<unsigned char>(gb[off + r * 32 + c]);
    };
    for (std::size_t c = 16; c + 1 < 32; ++c)
        CHECK(pixel(16, c + 1) <= pixel(16, c));
    CHECK(pixel(16, 16) == 255);
    fs::remove_all(dir);
}

TEST_CASE("cli run: files, manifest, exit codes, determinism") {
    const auto dir = temp_dir("run");
    fs::create_directories(dir);
    const auto cfg_path = dir / "c60.cfg";
    {
        std::ofstream out(cfg_path);
        out << "format_version = 1\nscenario = c60_double_slit\nseed = 12\n"
               "n_grid = 2048\nn_equiv = 500\nn_candidates = 128\nview_dt = 8e-8\n"
               "equiv_bins = 20\n";
    }

    io::RunArgs args;
    args.config_path = cfg_path;
    args.out_dir = dir / "out";

    CHECK(io::run(args) == io::kExitOk);
    CHECK(fs::exists(args.out_dir / "manifest.json"));
    CHECK(fs::exists(args.out_dir / "stats.kv"));
    CHECK(fs::exists(args.out_dir / "stats.txt"));
    CHECK(fs::exists(args.out_dir / "trajectories.csv"));
    CHECK(fs::exists(args.out_dir / "config_resolved.cfg"));

    // 15 frames, csv + pgm each
    std::size_t csvs = 0, pgms = 0;
    for (const auto& e : fs::directory_iterator(args.out_dir / "frames")) {
        if (e.path().extension() == ".csv") ++csvs;
        if (e.path().extension() == ".pgm") ++pgms;
    }
    CHECK(csvs == 15);
    CHECK(pgms == 15);

    // 24 trajectories in the csv
    {
        std::ifstream in(args.out_dir / "trajectories.csv");
        std::string line;
        std::getline(in, line); // header
        int max_label = -1;
        while (std::getline(in, line))
            max_label = std::max(max_label, std::atoi(line.c_str()));
        CHECK(max_label == 23);
    }

    // manifest checksums verify byte for byte
    {
        std::ifstream in(args.out_dir / "manifest.json");
        nlohmann::json manifest;
        in >> manifest;
        CHECK(manifest["scenario"] == "c60_double_slit");
        for (const auto& f : manifest["files"]) {
            const auto p = args.out_dir / f["path"].get<std::string>();
            CHECK(io::file_checksum_hex(p) == f["fnv1a64"].get<std::string>());
        }
    }

    // rerun into the non-empty directory without --force is refused
    CHECK(io::run(args) == io::kExitIo);

    // rerun elsewhere with the same seed: statistics and trajectories match
    io::RunArgs args2 = args;
    args2.out_dir = dir / "out2";
    CHECK(io::run(args2) == io::kExitOk);
    CHECK(read_file(args.out_dir / "stats.kv") == read_file(args2.out_dir / "stats.kv"));
    CHECK(read_file(args.out_dir / "trajectories.csv") ==
          read_file(args2.out_dir / "trajectories.csv"));

    // seed override changes sampled statistics
    io::RunArgs args3 = args;
    args3.out_dir = dir / "out3";
    args3.seed_override = 13;
    CHECK(io::run(args3) == io::kExitOk);
    CHECK(read_file(args.out_dir / "stats.kv") != read_file(args3.out_dir / "stats.kv"));

    // broken config maps to the parse exit code and leaves an error record
    {
        const auto bad = dir / "bad.cfg";
        std::ofstream out(bad);
        out << "scenario = c60_double_slit\nnot a line\n";
        out.close();
        io::RunArgs argsb;
        argsb.config_path = bad;
        argsb.out_dir = dir / "out_bad";
        fs::create_directories(argsb.out_dir);
        CHECK(io::run(argsb) == io::kExitParse);
        CHECK(fs::exists(argsb.out_dir / "error.json"));
        CHECK_FALSE(fs::exists(argsb.out_dir / "manifest.json"));
    }

    fs::remove_all(dir);
}

TEST_CASE("five scenarios are registered") {
    auto ids = scenario_ids();
    REQUIRE(ids.size() == 5);
    CHECK(find_scenario("two_body"));
    CHECK(find_scenario("c60_double_slit"));
    CHECK(find_scenario("stern_gerlach"));
    CHECK(find_scenario("epr_b"));
    CHECK(find_scenario("asym_interference"));
    CHECK_FALSE(find_scenario("nope"));
}
