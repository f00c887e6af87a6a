#include "bifrac/solver.hpp"

#include <algorithm>
#include <cmath>

namespace bifrac {

double VelocityProgram::value(double t) const {
    double g = 0.0;
    for (size_t i = 0; i < segments.size(); ++i) {
        const double t0 = segments[i].t_start;
        const double t1 = (i + 1 < segments.size()) ? segments[i + 1].t_start : t;
        if (t <= t0) break;
        g += segments[i].velocity * (std::min(t, t1) - t0);
    }
    return g;
}

namespace {

DirichletState make_pattern(const Problem& p) {
    DirichletState bc;
    const int n_u = 2 * static_cast<int>(p.mesh.nodes.size());
    bc.constrained.assign(n_u, 0);
    bc.value.assign(n_u, 0.0);
    for (const auto& entry : p.dirichlet) {
        if (entry.component != 0 && entry.component != 1)
            throw ConfigError("Dirichlet component must be 0 (x) or 1 (y)");
        for (const int n : entry.nodes) {
            if (n < 0 || 2 * n + 1 >= n_u)
                throw ConfigError("Dirichlet entry '" + entry.group + "' references missing node");
            const int dof = 2 * n + entry.component;
            if (bc.constrained[dof])
                throw ConfigError("displacement component constrained twice (group '" +
                                  entry.group + "')");
            bc.constrained[dof] = 1;
        }
    }
    return bc;
}

}  // namespace

Simulation::Simulation(Problem problem)
    : problem_(std::move(problem)),
      pattern_(make_pattern(problem_)),
      assembler_(problem_.mesh, problem_.materials, problem_.laws, pattern_) {
    if (!(problem_.tau > 0.0)) throw ConfigError("time step tau must be positive");
    if (!(problem_.T >= problem_.tau)) throw ConfigError("final time must be at least one step");
    for (const int n : problem_.initial_crack_nodes)
        if (n < 0 || n >= assembler_.dofs().n_nodes)
            throw ConfigError("initial crack references missing node");
}

DirichletState Simulation::boundary_values(double t) const {
    DirichletState bc = pattern_;
    for (const auto& entry : problem_.dirichlet) {
        const double g = entry.program.value(t);
        for (const int n : entry.nodes) bc.value[2 * n + entry.component] = g;
    }
    return bc;
}

double Simulation::load_value(double t) const {
    for (const auto& entry : problem_.dirichlet)
        if (entry.group == problem_.reaction_group && entry.component == problem_.reaction_component)
            return entry.program.value(t);
    return 0.0;
}

double Simulation::reaction(const State& state) const {
    const Eigen::VectorXd f = assembler_.internal_forces(state.u, state.alpha, state.zeta);
    double total = 0.0;
    for (const auto& entry : problem_.dirichlet) {
        if (entry.group != problem_.reaction_group) continue;
        if (entry.component != problem_.reaction_component) continue;
        for (const int n : entry.nodes) total += f[2 * n + entry.component];
    }
    return total;
}

Eigen::VectorXd Simulation::solve_displacement(const Eigen::VectorXd& alpha,
                                               const Eigen::VectorXd& zeta,
                                               const DirichletState& bc,
                                               const Eigen::VectorXd& u_start,
                                               Eigen::VectorXd* psi, Eigen::VectorXd* omega,
                                               double t_context) const {
    const BoxQP qp = assembler_.displacement_qp(alpha, zeta, bc);
    QPOptions opt;
    opt.tol_rel = problem_.params.qp_tol;
    opt.max_iter = problem_.params.qp_max_iter_factor * qp.size();
    const QPSolution sol = solve_box_qp(qp, assembler_.displacement_start(u_start, bc), opt);
    if (!sol.converged)
        throw SolveError("displacement QP did not converge at t = " + std::to_string(t_context));
    if (psi) *psi = assembler_.extract_psi(sol.x);
    if (omega) *omega = assembler_.extract_omega(sol.x);
    return assembler_.expand_displacement(sol.x, bc);
}

State Simulation::initial_state() const {
    const auto& dof = assembler_.dofs();
    State s;
    s.t = 0.0;
    s.alpha = Eigen::VectorXd::Ones(dof.n_nodes);
    for (const int n : problem_.initial_crack_nodes) s.alpha[n] = 0.0;
    s.zeta = Eigen::VectorXd::Ones(dof.n_pairs);
    const DirichletState bc = boundary_values(0.0);
    s.u = solve_displacement(s.alpha, s.zeta, bc, Eigen::VectorXd::Zero(dof.n_u), &s.psi,
                             &s.omega, 0.0);
    s.energy = assembler_.energies(s.u, s.alpha, s.zeta);
    s.sqp_iterations = 0;
    return s;
}

State Simulation::step(const State& prev, double t_k) const {
    const auto& dof = assembler_.dofs();
    const DirichletState bc = boundary_values(t_k);

    State next;
    next.t = t_k;
    next.u = solve_displacement(prev.alpha, prev.zeta, bc, prev.u, &next.psi, &next.omega, t_k);

    // damage SQP at frozen displacements
    Eigen::VectorXd a = prev.alpha;
    Eigen::VectorXd z = prev.zeta;
    double H = assembler_.damage_objective(next.u, a, z);
    const double h_scale = std::max({std::abs(H), 1.0});
    QPOptions opt;
    opt.tol_rel = problem_.params.qp_tol;

    int r = 1;
    for (;; ++r) {
        if (r > problem_.params.sqp_max_iter)
            throw SolveError("damage SQP exceeded its iteration cap at t = " + std::to_string(t_k));
        const BoxQP qp = assembler_.damage_qp(next.u, a, z, prev.alpha, prev.zeta);
        opt.max_iter = problem_.params.qp_max_iter_factor * qp.size();
        Eigen::VectorXd x0(dof.d_size());
        x0 << a, z;
        const QPSolution sol = solve_box_qp(qp, x0, opt);
        if (!sol.converged)
            throw SolveError("damage QP did not converge at t = " + std::to_string(t_k) +
                             ", SQP iteration " + std::to_string(r));
        Eigen::VectorXd a_new = sol.x.head(dof.n_nodes);
        Eigen::VectorXd z_new = sol.x.tail(dof.n_pairs);
        const double H_new = assembler_.damage_objective(next.u, a_new, z_new);
        if (H_new > H + 1e-12 * h_scale)
            throw SolveError("damage objective increased across an SQP iterate at t = " +
                             std::to_string(t_k));
        const double delta =
            std::max((a_new - a).lpNorm<Eigen::Infinity>(), dof.n_pairs
                                                                ? (z_new - z).lpNorm<Eigen::Infinity>()
                                                                : 0.0);
        a = std::move(a_new);
        z = std::move(z_new);
        H = H_new;
        if (delta < problem_.params.sqp_tol) break;
    }
    next.alpha = std::move(a);
    next.zeta = std::move(z);
    next.sqp_iterations = r;
    next.energy = assembler_.energies(next.u, next.alpha, next.zeta);
    return next;
}

History Simulation::run(const SnapshotFn& snapshot, History* partial) const {
    History history;
    if (partial) partial->rows.clear();
    auto push = [&](const HistoryRow& row) {
        history.rows.push_back(row);
        if (partial) partial->rows.push_back(row);
    };
    State state = initial_state();
    const double E0 = state.energy.total();

    DirichletState bc_prev = boundary_values(0.0);
    Eigen::VectorXd f_prev = assembler_.internal_forces(state.u, state.alpha, state.zeta);

    HistoryRow row0;
    row0.t = 0.0;
    row0.load = load_value(0.0);
    row0.force = reaction(state);
    row0.stored_energy = state.energy.total();
    push(row0);
    if (snapshot) snapshot(state, 0);

    const int n_steps = static_cast<int>(std::ceil(problem_.T / problem_.tau - 1e-9));
    double work = 0.0, cum_report = 0.0, cum_paper = 0.0;

    for (int k = 1; k <= n_steps; ++k) {
        const double t_k = k * problem_.tau;
        State next = step(state, t_k);

        cum_report += assembler_.dissipation_increment(next.u, state.alpha, next.alpha,
                                                       state.zeta, next.zeta, true);
        cum_paper += assembler_.dissipation_increment(next.u, state.alpha, next.alpha, state.zeta,
                                                      next.zeta, false);

        const DirichletState bc = boundary_values(t_k);
        const Eigen::VectorXd f = assembler_.internal_forces(next.u, next.alpha, next.zeta);
        for (size_t dof = 0; dof < bc.constrained.size(); ++dof)
            if (bc.constrained[dof])
                work += 0.5 * (f_prev[dof] + f[dof]) * (bc.value[dof] - bc_prev.value[dof]);
        f_prev = f;
        bc_prev = bc;

        HistoryRow row;
        row.t = t_k;
        row.load = load_value(t_k);
        row.force = reaction(next);
        row.stored_energy = next.energy.total();
        row.cum_dissipation = cum_report;
        row.cum_dissipation_paper = cum_paper;
        row.external_work = work;
        row.balance_residual = next.energy.total() + cum_paper - E0 - work;
        row.sqp_iterations = next.sqp_iterations;
        push(row);

        // irreversibility and bounds are guaranteed by the QP boxes; assert
        for (int i = 0; i < next.alpha.size(); ++i)
            if (next.alpha[i] > state.alpha[i] || next.alpha[i] < 0.0 || next.alpha[i] > 1.0)
                throw SolveError("irreversibility violated for the phase field");
        for (int i = 0; i < next.zeta.size(); ++i)
            if (next.zeta[i] > state.zeta[i] || next.zeta[i] < 0.0 || next.zeta[i] > 1.0)
                throw SolveError("irreversibility violated for the interface damage");

        state = std::move(next);
        if (snapshot) snapshot(state, k);
    }
    return history;
}

AuditReport energy_audit(const History& history) {
    AuditReport report;
    double prev_diss = 0.0;
    for (const auto& row : history.rows) {
        report.residuals.push_back(row.balance_residual);
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(row.balance_residual));
        report.peak_energy = std::max(report.peak_energy, row.stored_energy);
        if (row.cum_dissipation < prev_diss - 1e-12) report.dissipation_monotone = false;
        prev_diss = row.cum_dissipation;
    }
    if (!history.rows.empty()) report.final_residual = history.rows.back().balance_residual;
    report.normalized_residual =
        report.peak_energy > 0.0 ? report.max_abs_residual / report.peak_energy : 0.0;
    return report;
}

}  // namespace bifrac
