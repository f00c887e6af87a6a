#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bifrac/assembly.hpp"

namespace bifrac {

/// Integral of a piecewise-constant velocity: g(t) is continuous piecewise
/// linear, starting from zero before the first segment.
struct VelocityProgram {
    struct Segment {
        double t_start;
        double velocity;
    };
    std::vector<Segment> segments;  // ordered by t_start

    bool empty() const { return segments.empty(); }
    double value(double t) const;
};

/// One Dirichlet constraint: a node set, a component, and its motion.
/// An empty program holds the component at zero.
struct DirichletEntry {
    std::string group;  // provenance label (boundary group or pin name)
    std::vector<int> nodes;
    int component = 0;  // 0 = x, 1 = y
    VelocityProgram program;
};

struct SolverParams {
    double qp_tol = 1e-8;
    int qp_max_iter_factor = 20;
    double sqp_tol = 1e-6;
    int sqp_max_iter = 200;
};

struct Problem {
    Mesh mesh;  // interfaces already split
    std::vector<BulkMaterial> materials;  // per subdomain index
    std::vector<InterfaceLaw> laws;       // per interface index
    std::vector<DirichletEntry> dirichlet;
    double tau = 0.0;  // time step [s]
    double T = 0.0;    // final time [s]
    SolverParams params;
    std::string reaction_group;  // Dirichlet entry label measured as reaction
    int reaction_component = 1;
    std::vector<int> initial_crack_nodes;  // alpha held at 0 from the start
};

struct State {
    double t = 0.0;
    Eigen::VectorXd u;      // full nodal displacements
    Eigen::VectorXd alpha;  // per node
    Eigen::VectorXd zeta;   // per interface pair
    Eigen::VectorXd psi;    // per triangle
    Eigen::VectorXd omega;  // per interface pair
    EnergyBreakdown energy;
    int sqp_iterations = 0;
};

struct HistoryRow {
    double t = 0.0;
    double load = 0.0;   // prescribed displacement of the reaction group
    double force = 0.0;  // reaction on the designated group
    double stored_energy = 0.0;
    double cum_dissipation = 0.0;  // reporting split: (3/(8eps))(GcI+D) and (GciI+Di)
    double external_work = 0.0;
    double balance_residual = 0.0;  // E(t) + cum R_paper - E(0) - W_ext
    double cum_dissipation_paper = 0.0;  // audit split: D terms only
    int sqp_iterations = 0;
};

struct History {
    std::vector<HistoryRow> rows;
};

struct AuditReport {
    double final_residual = 0.0;
    double max_abs_residual = 0.0;
    double peak_energy = 0.0;
    double normalized_residual = 0.0;  // max |residual| / peak stored energy
    bool dissipation_monotone = true;
    std::vector<double> residuals;
};

/// Per-step and cumulative balance check of a completed history.
AuditReport energy_audit(const History& history);

/// Staggered quasi-static evolution driver: per step one displacement QP at
/// frozen damage, then the damage SQP loop at frozen displacements, with
/// irreversibility carried by the QP upper bounds.
class Simulation {
  public:
    explicit Simulation(Problem problem);

    const Problem& problem() const { return problem_; }
    const Assembler& assembler() const { return assembler_; }

    DirichletState boundary_values(double t) const;
    double load_value(double t) const;

    /// Intact state with displacements from an elastic solve at t = 0.
    State initial_state() const;

    /// One staggered step to t_k = prev.t + tau. Throws SolveError on QP
    /// non-convergence, on an exhausted SQP cap, and on an increase of the
    /// exact damage objective across accepted SQP iterates.
    State step(const State& prev, double t_k) const;

    using SnapshotFn = std::function<void(const State&, int step_index)>;
    /// Runs ceil(T/tau) steps; the snapshot callback fires after every step
    /// (step_index 0 is the initial state). When a step throws, the rows
    /// completed so far remain in *partial for the caller to flush.
    History run(const SnapshotFn& snapshot = {}, History* partial = nullptr) const;

    /// Sum of internal-force components over the reaction group.
    double reaction(const State& state) const;

  private:
    Problem problem_;
    DirichletState pattern_;  // constrained mask (time-independent)
    Assembler assembler_;

    Eigen::VectorXd solve_displacement(const Eigen::VectorXd& alpha, const Eigen::VectorXd& zeta,
                                       const DirichletState& bc, const Eigen::VectorXd& u_start,
                                       Eigen::VectorXd* psi, Eigen::VectorXd* omega,
                                       double t_context) const;
};

}  // namespace bifrac
