#pragma once

#include <map>
#include <string>
#include <vector>

#include "bifrac/solver.hpp"

namespace bifrac {

/// Parsed configuration: flat sectioned key=value text with unit suffixes.
/// Section kinds: [mesh], [material.<subdomain>], [interface.<tag>], [time],
/// [dirichlet.<group>], [pin.<name>], [initial_crack], [solver], [output].
struct SimulationConfig {
    std::string origin;  // config path; mesh paths resolve relative to it

    std::string mesh_path;
    std::vector<std::string> interfaces;

    std::map<std::string, BulkMaterial> materials;  // keyed by subdomain tag
    std::map<std::string, InterfaceLaw> laws;       // keyed by interface tag

    struct BoundaryComponent {
        int component = 0;  // 0 = x, 1 = y
        std::vector<VelocityProgram::Segment> segments;  // empty = held at 0
    };
    struct BoundaryEntry {
        std::string group;
        std::vector<BoundaryComponent> components;
    };
    std::vector<BoundaryEntry> dirichlet;

    struct Pin {
        std::string name;
        double x = 0.0;
        double y = 0.0;
        bool constrain_x = false;
        bool constrain_y = false;
    };
    std::vector<Pin> pins;

    std::string initial_crack_group;  // optional 1D group with alpha = 0

    double tau = 0.0;
    double T = 0.0;
    SolverParams params;

    std::string out_dir = "out";
    int snapshot_every = 0;  // steps between snapshots, 0 = none
    std::string reaction_group;
    int reaction_component = 1;
};

SimulationConfig parse_config(const std::string& path);
SimulationConfig parse_config_text(const std::string& text, const std::string& origin);

/// Canonical re-emission: sections and keys in a fixed order, all values in
/// SI base units with 17 significant digits. Parsing the emitted text
/// reproduces the identical configuration.
std::string normalized_config(const SimulationConfig& config);

/// Loads the mesh, splits the configured interfaces, and cross-checks every
/// tag reference. Throws ConfigError with the offending tag named.
Problem build_problem(const SimulationConfig& config);

/// Legacy ASCII VTK unstructured grid: points, triangle cells, point data
/// (alpha, displacement), cell data (stress trace, deviatoric norm, psi).
/// Deterministic field order, 17 significant digits.
void write_vtk(const Mesh& mesh, const State& state, const StressField& stress,
               const std::string& path);

/// Per interface node: interface tag, arc-length, zeta, p_n, p_s (nodal
/// tractions from the nodal jump, the nodal zeta, and the node frame).
void write_interface_csv(const Assembler& assembler, const State& state, const std::string& path);

void write_history_csv(const History& history, const std::string& path);
History read_history_csv(const std::string& path);

}  // namespace bifrac
