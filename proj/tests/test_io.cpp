#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bifrac/io.hpp"
#include "support/fixtures.hpp"
#include "support/testutil.hpp"

using namespace bifrac;
using testutil::rel_err;

namespace {

namespace fs = std::filesystem;

fs::path sandbox() {
    const fs::path dir = fs::temp_directory_path() / "bifrac_io_test";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const char* midline_config = R"([mesh]
file = midline.msh
interfaces = midline

[material.lower]
Kp = 3.1 GPa
mu = 1.0 GPa
GcI = 750 J/m^2
GcII = 1500 J/m^2
eps = 0.75 mm
degradation = quadratic

[material.upper]
Kp = 51.8 GPa
mu = 29.0 GPa
GcI = 750 J/m^2
GcII = 1500 J/m^2
eps = 0.75 mm
degradation = rational
beta = 3

[interface.midline]
kn = 1 PPa/m
ks = 0.5 PPa/m
kG = 10 PPa/m
GciI = 1 J/m^2
GciII = 1000 J/m^2
degradation = exponential
beta = 0.99
delta = 0.005

[time]
tau = 0.1 ms
T = 2 ms

[dirichlet.top]
uy = 1 mm/s from 0 s
[dirichlet.bottom]
ux = 0
uy = 0

[pin.mid]
x = 1 m
y = 2 m
components = ux

[solver]
qp_tol = 1e-8

[output]
directory = out
snapshot_every = 5
reaction = top uy
)";

SimulationConfig parsed_midline() {
    const fs::path dir = sandbox();
    write_file(dir / "midline.msh", fixtures::midline_msh);
    write_file(dir / "case.cfg", midline_config);
    return parse_config((dir / "case.cfg").string());
}

}  // namespace

TEST_CASE("config parsing with unit suffixes") {
    const SimulationConfig cfg = parsed_midline();
    CHECK(cfg.materials.at("lower").Kp == doctest::Approx(3.1e9));
    CHECK(cfg.materials.at("upper").mu == doctest::Approx(29.0e9));
    CHECK(cfg.materials.at("lower").GcI == doctest::Approx(750.0));
    CHECK(cfg.materials.at("lower").eps == doctest::Approx(0.75e-3));
    CHECK(cfg.laws.at("midline").kn == doctest::Approx(1e15));
    CHECK(cfg.laws.at("midline").ks == doctest::Approx(0.5e15));
    CHECK(cfg.tau == doctest::Approx(1e-4));
    CHECK(cfg.T == doctest::Approx(2e-3));
    REQUIRE(cfg.dirichlet.size() == 2);
    CHECK(cfg.dirichlet[0].components[0].segments[0].velocity == doctest::Approx(1e-3));
    CHECK(cfg.snapshot_every == 5);
    CHECK(cfg.reaction_group == "top");
}

TEST_CASE("config validation errors") {
    SUBCASE("unknown key") {
        CHECK_THROWS_WITH_AS(parse_config_text("[mesh]\nfile = a.msh\nbogus = 1\n", "<text>"),
                             doctest::Contains("unknown key"), ConfigError);
    }
    SUBCASE("unknown section") {
        CHECK_THROWS_WITH_AS(parse_config_text("[banana]\nx = 1\n", "<text>"),
                             doctest::Contains("unknown section"), ConfigError);
    }
    SUBCASE("unit does not fit the key") {
        const std::string bad = "[material.m]\nKp = 22 J/m^2\nmu = 1 GPa\nGcI = 1 J/m^2\n"
                                "GcII = 1 J/m^2\neps = 1 mm\ndegradation = quadratic\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "<text>"), doctest::Contains("unit"),
                             ConfigError);
    }
    SUBCASE("fracture energy ordering") {
        const std::string bad = "[material.m]\nKp = 22 GPa\nmu = 1 GPa\nGcI = 2 J/m^2\n"
                                "GcII = 1 J/m^2\neps = 1 mm\ndegradation = quadratic\n";
        CHECK_THROWS_WITH_AS(parse_config_text(bad, "<text>"), doctest::Contains("GcII >= GcI"),
                             ConfigError);
    }
}

TEST_CASE("problem build resolves groups and materials") {
    const SimulationConfig cfg = parsed_midline();
    const Problem p = build_problem(cfg);
    CHECK(p.mesh.interface_pairs.size() == 3);
    CHECK(p.materials.size() == 2);
    CHECK(p.laws.size() == 1);
    // subdomains are name-sorted: lower first
    CHECK(p.materials[0].Kp == doctest::Approx(3.1e9));
    CHECK(p.materials[1].Kp == doctest::Approx(51.8e9));
    // dirichlet entries: top uy, bottom ux, bottom uy, pin ux
    REQUIRE(p.dirichlet.size() == 4);
    CHECK(p.dirichlet[3].group == "pin:mid");
    CHECK(p.dirichlet[3].nodes.size() == 1);
    // the pin lands on node (1, 2)
    CHECK(p.mesh.nodes[p.dirichlet[3].nodes[0]].x == doctest::Approx(1.0));
    CHECK(p.mesh.nodes[p.dirichlet[3].nodes[0]].y == doctest::Approx(2.0));
}

TEST_CASE("cross-reference failures name the offending tag") {
    SimulationConfig cfg = parsed_midline();
    SUBCASE("missing subdomain material") {
        cfg.materials.erase("upper");
        CHECK_THROWS_WITH_AS(build_problem(cfg), doctest::Contains("upper"), ConfigError);
    }
    SUBCASE("material for an unknown subdomain") {
        cfg.materials["ghost"] = cfg.materials.at("lower");
        CHECK_THROWS_WITH_AS(build_problem(cfg), doctest::Contains("ghost"), ConfigError);
    }
    SUBCASE("missing interface law") {
        cfg.laws.clear();
        CHECK_THROWS_WITH_AS(build_problem(cfg), doctest::Contains("midline"), ConfigError);
    }
    SUBCASE("unknown dirichlet group") {
        cfg.dirichlet[0].group = "nowhere";
        CHECK_THROWS_WITH_AS(build_problem(cfg), doctest::Contains("nowhere"), ConfigError);
    }
    SUBCASE("reaction must reference a constrained component") {
        cfg.reaction_group = "bottom";
        cfg.reaction_component = 1;
        CHECK_NOTHROW(build_problem(cfg));
        cfg.reaction_group = "pinless";
        CHECK_THROWS_AS(build_problem(cfg), ConfigError);
    }
}

TEST_CASE("normalized config round-trips") {
    const SimulationConfig cfg = parsed_midline();
    const std::string normal = normalized_config(cfg);
    const SimulationConfig back = parse_config_text(normal, "<text>");
    CHECK(normalized_config(back) == normal);
}

TEST_CASE("VTK writer emits the state") {
    Mesh mesh;
    mesh.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    mesh.triangles = {Triangle{{0, 1, 2}, 0}};
    mesh.subdomain_names = {"block"};
    mesh.h = 1.0;

    State s;
    s.t = 0.25;
    s.u = Eigen::VectorXd::Zero(6);
    s.alpha = Eigen::VectorXd::Ones(3);
    s.zeta = Eigen::VectorXd(0);
    s.psi = Eigen::VectorXd::Zero(1);
    StressField f;
    f.trace = {0.0};
    f.dev_norm = {0.0};
    f.psi = {0.0};

    const fs::path path = sandbox() / "tri.vtk";
    write_vtk(mesh, s, f, path.string());
    const std::string text = read_file(path);
    CHECK(text.find("POINTS 3 double") != std::string::npos);
    CHECK(text.find("CELLS 1 4") != std::string::npos);
    CHECK(text.find("SCALARS alpha double 1") != std::string::npos);
    // all-intact point data
    CHECK(text.find("LOOKUP_TABLE default\n1\n1\n1\n") != std::string::npos);

    // identical states at different times differ only in the title line
    State s2 = s;
    s2.t = 0.5;
    const fs::path path2 = sandbox() / "tri2.vtk";
    write_vtk(mesh, s2, f, path2.string());
    std::istringstream a(text), b(read_file(path2));
    std::string la, lb;
    int lineno = 0, diff_count = 0;
    while (std::getline(a, la) && std::getline(b, lb)) {
        ++lineno;
        if (la != lb) {
            ++diff_count;
            CHECK(lineno == 2);  // the time comment
        }
    }
    CHECK(diff_count == 1);
}

TEST_CASE("interface CSV columns") {
    const SimulationConfig cfg = parsed_midline();
    Problem p = build_problem(cfg);
    Simulation sim(std::move(p));
    const State s0 = sim.initial_state();
    const fs::path path = sandbox() / "iface.csv";
    write_interface_csv(sim.assembler(), s0, path.string());
    const std::string text = read_file(path);
    CHECK(text.find("interface,arc_length,zeta,p_n,p_s\r\n") == 0);
    // intact zero-load rows: zeta 1, tractions 0
    CHECK(text.find("midline,0,1,0,0\r\n") != std::string::npos);
    CHECK(text.find("midline,1,1,0,0\r\n") != std::string::npos);
    CHECK(text.find("midline,2,1,0,0\r\n") != std::string::npos);
}

TEST_CASE("interface CSV reports nodal tractions under uniform opening") {
    const SimulationConfig cfg = parsed_midline();
    Problem p = build_problem(cfg);
    const double kn = cfg.laws.at("midline").kn;
    Simulation sim(std::move(p));
    State s = sim.initial_state();
    // open the interface: move every upper-side duplicate up by w_n
    const double wn = 1e-9;
    const Mesh& mesh = sim.assembler().mesh();
    const int upper = mesh.subdomain_index("upper");
    for (const auto& t : mesh.triangles)
        if (t.subdomain == upper)
            for (int k = 0; k < 3; ++k) s.u[2 * t.n[k] + 1] = wn;
    const fs::path path = sandbox() / "iface_open.csv";
    write_interface_csv(sim.assembler(), s, path.string());
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);  // header
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string iface, arc, zeta, pn, ps;
        std::getline(ls, iface, ',');
        std::getline(ls, arc, ',');
        std::getline(ls, zeta, ',');
        std::getline(ls, pn, ',');
        std::getline(ls, ps, ',');
        CHECK(rel_err(std::stod(pn), kn * wn) < 1e-12);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("history CSV round-trips and implies the audit split") {
    History h;
    for (int k = 0; k <= 3; ++k) {
        HistoryRow row;
        row.t = 0.1 * k;
        row.load = 0.001 * k;
        row.force = 10.0 * k;
        row.stored_energy = 0.5 * k;
        row.cum_dissipation = 0.25 * k;
        row.external_work = 0.8 * k;
        row.cum_dissipation_paper = 0.1 * k;
        row.balance_residual = row.stored_energy + row.cum_dissipation_paper -
                               h.rows.empty() * 0.0 - row.external_work;
        h.rows.push_back(row);
    }
    const fs::path path = sandbox() / "hist.csv";
    write_history_csv(h, path.string());
    const History back = read_history_csv(path.string());
    REQUIRE(back.rows.size() == h.rows.size());
    for (size_t k = 0; k < h.rows.size(); ++k) {
        CHECK(back.rows[k].t == h.rows[k].t);
        CHECK(back.rows[k].force == h.rows[k].force);
        CHECK(back.rows[k].balance_residual == h.rows[k].balance_residual);
        CHECK(back.rows[k].cum_dissipation_paper ==
              doctest::Approx(h.rows[k].cum_dissipation_paper).epsilon(1e-12));
    }
}

TEST_CASE("unwritable output path raises an io error") {
    History h;
    CHECK_THROWS_AS(write_history_csv(h, "/nonexistent_dir_xyz/h.csv"), IoError);
}
