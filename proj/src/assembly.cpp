#include "bifrac/assembly.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace bifrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCurvatureFloor = 1e-12;  // clamp for Taylor second derivatives

using Trip = Eigen::Triplet<double>;

// 2x2 outer-product stiffness of the adhesive, W = kn n n' + ks s s'
struct JumpStiffness {
    double m[2][2];
    JumpStiffness(const Vec2& n, const Vec2& s, double kn, double ks) {
        m[0][0] = kn * n.x * n.x + ks * s.x * s.x;
        m[0][1] = kn * n.x * n.y + ks * s.x * s.y;
        m[1][0] = m[0][1];
        m[1][1] = kn * n.y * n.y + ks * s.y * s.y;
    }
};

}  // namespace

Assembler::Assembler(const Mesh& mesh, std::vector<BulkMaterial> materials,
                     std::vector<InterfaceLaw> laws, const DirichletState& pattern)
    : mesh_(mesh), materials_(std::move(materials)), laws_(std::move(laws)) {
    if (materials_.size() != mesh_.subdomain_names.size())
        throw ConfigError("assembler needs one bulk material per subdomain");
    if (laws_.size() != mesh_.interface_names.size())
        throw ConfigError("assembler needs one interface law per split interface");
    for (const auto& m : materials_) m.validate();
    for (const auto& l : laws_) l.validate();

    dof_.n_nodes = static_cast<int>(mesh_.nodes.size());
    dof_.n_tri = static_cast<int>(mesh_.triangles.size());
    dof_.n_pairs = static_cast<int>(mesh_.interface_pairs.size());
    dof_.n_u = 2 * dof_.n_nodes;
    if (static_cast<int>(pattern.constrained.size()) != dof_.n_u)
        throw ConfigError("Dirichlet pattern size does not match the mesh");
    dof_.u_reduced.assign(dof_.n_u, -1);
    for (int i = 0; i < dof_.n_u; ++i)
        if (!pattern.constrained[i]) dof_.u_reduced[i] = dof_.nu_free++;

    tri_.resize(dof_.n_tri);
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const Vec2 p0 = mesh_.nodes[tr.n[0]], p1 = mesh_.nodes[tr.n[1]], p2 = mesh_.nodes[tr.n[2]];
        const double twice_area = (p1 - p0).cross(p2 - p0);
        if (!(twice_area > 0.0)) throw MeshError("degenerate triangle " + std::to_string(t));
        tri_[t].area = 0.5 * twice_area;
        const double inv = 1.0 / twice_area;
        tri_[t].bg = {(p1.y - p2.y) * inv, (p2.y - p0.y) * inv, (p0.y - p1.y) * inv};
        tri_[t].cg = {(p2.x - p1.x) * inv, (p0.x - p2.x) * inv, (p1.x - p0.x) * inv};
    }
}

void Assembler::check_damage_fields(const Eigen::VectorXd& alpha,
                                    const Eigen::VectorXd& zeta) const {
    if (alpha.size() != dof_.n_nodes || zeta.size() != dof_.n_pairs)
        throw ConfigError("damage field sizes do not match the mesh");
    for (int i = 0; i < alpha.size(); ++i)
        if (!(alpha[i] >= 0.0 && alpha[i] <= 1.0))
            throw ConfigError("bulk damage out of bounds at node " + std::to_string(i));
    for (int i = 0; i < zeta.size(); ++i)
        if (!(zeta[i] >= 0.0 && zeta[i] <= 1.0))
            throw ConfigError("interface damage out of bounds at pair " + std::to_string(i));
}

Sym2 Assembler::element_strain(int t, const Eigen::VectorXd& u) const {
    const auto& tr = mesh_.triangles[t];
    const auto& g = tri_[t];
    Sym2 e;
    for (int k = 0; k < 3; ++k) {
        const double ux = u[2 * tr.n[k]], uy = u[2 * tr.n[k] + 1];
        e.xx += g.bg[k] * ux;
        e.yy += g.cg[k] * uy;
        e.xy += 0.5 * (g.cg[k] * ux + g.bg[k] * uy);
    }
    return e;
}

Vec2 Assembler::pair_jump(int p, const Eigen::VectorXd& u) const {
    const auto& pair = mesh_.interface_pairs[p];
    const Vec2 du(u[2 * pair.node_a] - u[2 * pair.node_b],
                  u[2 * pair.node_a + 1] - u[2 * pair.node_b + 1]);
    const Vec2 n = pair.normal;
    const Vec2 s(n.y, -n.x);
    return {du.dot(n), du.dot(s)};
}

BoxQP Assembler::displacement_qp(const Eigen::VectorXd& alpha, const Eigen::VectorXd& zeta,
                                 const DirichletState& bc) const {
    check_damage_fields(alpha, zeta);
    if (static_cast<int>(bc.constrained.size()) != dof_.n_u)
        throw ConfigError("Dirichlet state size mismatch");

    const int nx = dof_.x_size();
    std::vector<Trip> full;  // quadratic form over all displacement dofs
    full.reserve(36 * dof_.n_tri + 64 * mesh_.interface_segments.size());

    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        const auto& mat = materials_[tr.subdomain];
        const double abar = (alpha[tr.n[0]] + alpha[tr.n[1]] + alpha[tr.n[2]]) / 3.0;
        const double Phi = bulk_degradation_eval(mat.degradation, abar).value;

        double gv[6], dv[6], rv[6];
        int dofs[6];
        for (int k = 0; k < 3; ++k) {
            dofs[2 * k] = 2 * tr.n[k];
            dofs[2 * k + 1] = 2 * tr.n[k] + 1;
            gv[2 * k] = g.bg[k];
            gv[2 * k + 1] = g.cg[k];
            dv[2 * k] = g.bg[k];  // e_xx - e_yy
            dv[2 * k + 1] = -g.cg[k];
            rv[2 * k] = 0.5 * g.cg[k];  // e_xy
            rv[2 * k + 1] = 0.5 * g.bg[k];
        }
        // energy density u'Mu = Kp |sph e|^2 + mu |dev e|^2; quadratic form 2*A*Phi*M
        const double c = 2.0 * g.area * Phi;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                const double v = c * (0.5 * mat.Kp * gv[i] * gv[j] +
                                      mat.mu * (0.5 * dv[i] * dv[j] + 2.0 * rv[i] * rv[j]));
                if (v != 0.0) full.push_back({dofs[i], dofs[j], v});
            }
    }

    // adhesive term: exact integration of the linear jump interpolation with
    // the degradation evaluated at the segment-mean zeta
    for (const auto& seg : mesh_.interface_segments) {
        const auto& law = laws_[seg.interface];
        const double zbar = 0.5 * (zeta[seg.pair[0]] + zeta[seg.pair[1]]);
        const double phi = interface_degradation_eval(law.degradation, zbar).value;
        const JumpStiffness W(seg.frame.normal, seg.frame.tangent, law.kn, law.ks);
        const double L = seg.frame.length;

        int dofs[2][4];  // per end: [a_x, a_y, b_x, b_y]
        for (int end = 0; end < 2; ++end) {
            dofs[end][0] = 2 * seg.side_a[end];
            dofs[end][1] = 2 * seg.side_a[end] + 1;
            dofs[end][2] = 2 * seg.side_b[end];
            dofs[end][3] = 2 * seg.side_b[end] + 1;
        }
        auto add_block = [&](int ei, int ej, double coeff) {
            // coeff * (du_i)' W (du_j) with du = u_a - u_b
            const double sign[4] = {1.0, 1.0, -1.0, -1.0};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double v = coeff * sign[i] * sign[j] * W.m[i % 2][j % 2];
                    if (v != 0.0) full.push_back({dofs[ei][i], dofs[ej][j], v});
                }
        };
        add_block(0, 0, phi * L / 3.0);
        add_block(1, 1, phi * L / 3.0);
        add_block(0, 1, phi * L / 6.0);
        add_block(1, 0, phi * L / 6.0);
    }

    // reduce: drop constrained rows, move constrained columns to the linear term
    std::vector<Trip> trips;
    trips.reserve(full.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nx);
    for (const auto& t : full) {
        const int ri = dof_.u_reduced[t.row()];
        if (ri < 0) continue;
        const int rj = dof_.u_reduced[t.col()];
        if (rj >= 0)
            trips.push_back({ri, rj, t.value()});
        else
            b[ri] += t.value() * bc.value[t.col()];
    }

    // auxiliary diagonal blocks
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& mat = materials_[tr.subdomain];
        const double abar = (alpha[tr.n[0]] + alpha[tr.n[1]] + alpha[tr.n[2]]) / 3.0;
        const double Phi = bulk_degradation_eval(mat.degradation, abar).value;
        const double cpsi = std::max(1.0 - Phi, kCurvatureFloor);
        trips.push_back({dof_.psi_index(t), dof_.psi_index(t), tri_[t].area * cpsi * mat.Kp});
    }
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& law = laws_[mesh_.interface_pairs[p].interface];
        trips.push_back({dof_.omega_index(p), dof_.omega_index(p),
                         law.kG * mesh_.interface_pairs[p].lumped_length});
    }

    BoxQP qp;
    qp.A.resize(nx, nx);
    qp.A.setFromTriplets(trips.begin(), trips.end());
    qp.b = b;
    qp.lo = Eigen::VectorXd::Constant(nx, -kInf);
    qp.hi = Eigen::VectorXd::Constant(nx, kInf);
    for (int t = 0; t < dof_.n_tri; ++t) qp.lo[dof_.psi_index(t)] = 0.0;
    for (int p = 0; p < dof_.n_pairs; ++p) qp.lo[dof_.omega_index(p)] = 0.0;

    // Mosco rows: psi_e + tr e(u) >= 0 per element, omega_p + w_n >= 0 per pair
    std::vector<Trip> rows;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dof_.n_tri + dof_.n_pairs);
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        rows.push_back({t, dof_.psi_index(t), 1.0});
        for (int k = 0; k < 3; ++k) {
            const int dx = 2 * tr.n[k], dy = dx + 1;
            if (dof_.u_reduced[dx] >= 0)
                rows.push_back({t, dof_.u_reduced[dx], g.bg[k]});
            else
                d[t] -= g.bg[k] * bc.value[dx];
            if (dof_.u_reduced[dy] >= 0)
                rows.push_back({t, dof_.u_reduced[dy], g.cg[k]});
            else
                d[t] -= g.cg[k] * bc.value[dy];
        }
    }
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const int row = dof_.n_tri + p;
        rows.push_back({row, dof_.omega_index(p), 1.0});
        const double coeff[4] = {pair.normal.x, pair.normal.y, -pair.normal.x, -pair.normal.y};
        const int dofs4[4] = {2 * pair.node_a, 2 * pair.node_a + 1, 2 * pair.node_b,
                              2 * pair.node_b + 1};
        for (int k = 0; k < 4; ++k) {
            if (coeff[k] == 0.0) continue;
            if (dof_.u_reduced[dofs4[k]] >= 0)
                rows.push_back({row, dof_.u_reduced[dofs4[k]], coeff[k]});
            else
                d[row] -= coeff[k] * bc.value[dofs4[k]];
        }
    }
    qp.C.resize(dof_.n_tri + dof_.n_pairs, nx);
    qp.C.setFromTriplets(rows.begin(), rows.end());
    qp.d = d;
    return qp;
}

Eigen::VectorXd Assembler::displacement_start(const Eigen::VectorXd& u_full,
                                              const DirichletState& bc) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dof_.x_size());
    for (int i = 0; i < dof_.n_u; ++i)
        if (dof_.u_reduced[i] >= 0) x[dof_.u_reduced[i]] = u_full[i];
    // feasible auxiliaries for the given displacements
    Eigen::VectorXd u = u_full;
    for (int i = 0; i < dof_.n_u; ++i)
        if (bc.constrained[i]) u[i] = bc.value[i];
    for (int t = 0; t < dof_.n_tri; ++t)
        x[dof_.psi_index(t)] = std::max(0.0, -element_strain(t, u).trace());
    for (int p = 0; p < dof_.n_pairs; ++p)
        x[dof_.omega_index(p)] = std::max(0.0, -pair_jump(p, u).x);
    return x;
}

Eigen::VectorXd Assembler::expand_displacement(const Eigen::VectorXd& x,
                                               const DirichletState& bc) const {
    Eigen::VectorXd u(dof_.n_u);
    for (int i = 0; i < dof_.n_u; ++i)
        u[i] = (dof_.u_reduced[i] >= 0) ? x[dof_.u_reduced[i]] : bc.value[i];
    return u;
}

Eigen::VectorXd Assembler::extract_psi(const Eigen::VectorXd& x) const {
    return x.segment(dof_.nu_free, dof_.n_tri);
}

Eigen::VectorXd Assembler::extract_omega(const Eigen::VectorXd& x) const {
    return x.segment(dof_.nu_free + dof_.n_tri, dof_.n_pairs);
}

BoxQP Assembler::damage_qp(const Eigen::VectorXd& u_full, const Eigen::VectorXd& a_iter,
                           const Eigen::VectorXd& z_iter, const Eigen::VectorXd& a_prev,
                           const Eigen::VectorXd& z_prev) const {
    check_damage_fields(a_iter, z_iter);
    check_damage_fields(a_prev, z_prev);
    for (int i = 0; i < a_iter.size(); ++i)
        if (a_iter[i] > a_prev[i] + 1e-12)
            throw ConfigError("damage iterate above its previous-step bound");
    for (int i = 0; i < z_iter.size(); ++i)
        if (z_iter[i] > z_prev[i] + 1e-12)
            throw ConfigError("interface damage iterate above its previous-step bound");

    const int nd = dof_.d_size();
    std::vector<Trip> trips;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nd);

    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        const auto& mat = materials_[tr.subdomain];
        const Sym2 e = element_strain(t, u_full);
        const StrainSplit sp = strain_split(e);
        const double rho = mat.Kp * sp.sph_plus.norm2() + mat.mu * sp.dev.norm2();
        if (!std::isfinite(rho)) throw SolveError("non-finite strain energy in damage assembly");
        const double D = bulk_mode_dissipation(mat, e);
        const double drive = 3.0 / (8.0 * mat.eps) * (mat.GcI + D);
        const double m = g.area / 3.0;  // nodal lumping weight
        for (int k = 0; k < 3; ++k) {
            const int n = tr.n[k];
            const auto dv = bulk_degradation_eval(mat.degradation, a_iter[n]);
            const double d2 = std::max(dv.d2, kCurvatureFloor);
            trips.push_back({n, n, m * d2 * rho});
            b[n] += m * ((dv.d1 - a_iter[n] * d2) * rho - drive);
        }
        // gradient stiffness (3 eps/8) GcI grad a . grad a
        const double cg = 2.0 * (3.0 * mat.eps / 8.0) * mat.GcI * g.area;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.push_back({tr.n[i], tr.n[j], cg * (g.bg[i] * g.bg[j] + g.cg[i] * g.cg[j])});
    }

    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const auto& law = laws_[pair.interface];
        const Vec2 w = pair_jump(p, u_full);
        const double s = law.kn * w.x * w.x + law.ks * w.y * w.y;
        const double D = interface_mode_dissipation(law, w.x, w.y);
        const auto pv = interface_degradation_eval(law.degradation, z_iter[p]);
        const double d2 = std::max(pv.d2, kCurvatureFloor);
        const int zi = dof_.zeta_index(p);
        const double l = pair.lumped_length;
        trips.push_back({zi, zi, 0.5 * l * d2 * s});
        b[zi] += l * (0.5 * (pv.d1 - z_iter[p] * d2) * s - (law.GciI + D));
    }
    for (const auto& seg : mesh_.interface_segments) {
        const auto& law = laws_[seg.interface];
        if (law.eps_i == 0.0) continue;
        const double c = 2.0 * law.GciI * law.eps_i * law.eps_i / seg.frame.length;
        const int z0 = dof_.zeta_index(seg.pair[0]), z1 = dof_.zeta_index(seg.pair[1]);
        trips.push_back({z0, z0, c});
        trips.push_back({z1, z1, c});
        trips.push_back({z0, z1, -c});
        trips.push_back({z1, z0, -c});
    }

    BoxQP qp;
    qp.A.resize(nd, nd);
    qp.A.setFromTriplets(trips.begin(), trips.end());
    qp.b = b;
    qp.lo = Eigen::VectorXd::Zero(nd);
    qp.hi.resize(nd);
    for (int i = 0; i < dof_.n_nodes; ++i) qp.hi[i] = a_prev[i];
    for (int p = 0; p < dof_.n_pairs; ++p) qp.hi[dof_.zeta_index(p)] = z_prev[p];
    return qp;
}

double Assembler::damage_objective(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& zeta) const {
    check_damage_fields(alpha, zeta);
    double H = 0.0;
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        const auto& mat = materials_[tr.subdomain];
        const Sym2 e = element_strain(t, u_full);
        const StrainSplit sp = strain_split(e);
        const double rho = mat.Kp * sp.sph_plus.norm2() + mat.mu * sp.dev.norm2();
        const double D = bulk_mode_dissipation(mat, e);
        const double drive = 3.0 / (8.0 * mat.eps) * (mat.GcI + D);
        const double m = g.area / 3.0;
        for (int k = 0; k < 3; ++k) {
            const int n = tr.n[k];
            H += m * (bulk_degradation_eval(mat.degradation, alpha[n]).value * rho -
                      drive * alpha[n]);
        }
        double gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            gx += g.bg[k] * alpha[tr.n[k]];
            gy += g.cg[k] * alpha[tr.n[k]];
        }
        H += (3.0 * mat.eps / 8.0) * mat.GcI * (gx * gx + gy * gy) * g.area;
    }
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const auto& law = laws_[pair.interface];
        const Vec2 w = pair_jump(p, u_full);
        const double s = law.kn * w.x * w.x + law.ks * w.y * w.y;
        const double D = interface_mode_dissipation(law, w.x, w.y);
        H += pair.lumped_length *
             (0.5 * interface_degradation_eval(law.degradation, zeta[p]).value * s -
              (law.GciI + D) * zeta[p]);
    }
    for (const auto& seg : mesh_.interface_segments) {
        const auto& law = laws_[seg.interface];
        if (law.eps_i == 0.0) continue;
        const double dz = zeta[seg.pair[1]] - zeta[seg.pair[0]];
        H += law.GciI * law.eps_i * law.eps_i * dz * dz / seg.frame.length;
    }
    return H;
}

StressField Assembler::recover_stress(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                                      const Eigen::VectorXd& zeta) const {
    check_damage_fields(alpha, zeta);
    StressField f;
    f.sigma.resize(dof_.n_tri);
    f.trace.resize(dof_.n_tri);
    f.dev_norm.resize(dof_.n_tri);
    f.psi.resize(dof_.n_tri);
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& mat = materials_[tr.subdomain];
        const double abar = (alpha[tr.n[0]] + alpha[tr.n[1]] + alpha[tr.n[2]]) / 3.0;
        const double Phi = bulk_degradation_eval(mat.degradation, abar).value;
        const Sym2 e = element_strain(t, u_full);
        const StrainSplit sp = strain_split(e);
        const Sym2 sigma = Phi * (2.0 * mat.Kp * sp.sph_plus + 2.0 * mat.mu * sp.dev) +
                           2.0 * mat.Kp * sp.sph_minus;
        f.sigma[t] = sigma;
        f.trace[t] = sigma.trace();
        const Sym2 dev = sigma - Sym2(0.5 * sigma.trace(), 0.5 * sigma.trace(), 0.0);
        f.dev_norm[t] = std::sqrt(dev.norm2());
        f.psi[t] = std::max(0.0, -e.trace());
    }
    f.p_n.resize(mesh_.interface_segments.size());
    f.p_s.resize(mesh_.interface_segments.size());
    for (size_t s = 0; s < mesh_.interface_segments.size(); ++s) {
        const auto& seg = mesh_.interface_segments[s];
        const auto& law = laws_[seg.interface];
        const double zbar = 0.5 * (zeta[seg.pair[0]] + zeta[seg.pair[1]]);
        const double phi = interface_degradation_eval(law.degradation, zbar).value;
        // midpoint jump in the segment frame
        Vec2 du(0.0, 0.0);
        for (int end = 0; end < 2; ++end) {
            du.x += 0.5 * (u_full[2 * seg.side_a[end]] - u_full[2 * seg.side_b[end]]);
            du.y += 0.5 * (u_full[2 * seg.side_a[end] + 1] - u_full[2 * seg.side_b[end] + 1]);
        }
        const double wn = du.dot(seg.frame.normal);
        const double ws = du.dot(seg.frame.tangent);
        f.p_n[s] = law.kn * phi * wn + law.kG * std::min(wn, 0.0);
        f.p_s[s] = law.ks * phi * ws;
    }
    return f;
}

Eigen::VectorXd Assembler::internal_forces(const Eigen::VectorXd& u_full,
                                           const Eigen::VectorXd& alpha,
                                           const Eigen::VectorXd& zeta) const {
    const StressField f = recover_stress(u_full, alpha, zeta);
    Eigen::VectorXd force = Eigen::VectorXd::Zero(dof_.n_u);
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        const Sym2& s = f.sigma[t];
        for (int k = 0; k < 3; ++k) {
            force[2 * tr.n[k]] += g.area * (g.bg[k] * s.xx + g.cg[k] * s.xy);
            force[2 * tr.n[k] + 1] += g.area * (g.cg[k] * s.yy + g.bg[k] * s.xy);
        }
    }
    // adhesive: gradient of (1/2) phi(zbar) int w' kappa w over each segment
    for (const auto& seg : mesh_.interface_segments) {
        const auto& law = laws_[seg.interface];
        const double zbar = 0.5 * (zeta[seg.pair[0]] + zeta[seg.pair[1]]);
        const double phi = interface_degradation_eval(law.degradation, zbar).value;
        const JumpStiffness W(seg.frame.normal, seg.frame.tangent, law.kn, law.ks);
        const double L = seg.frame.length;
        Vec2 du[2];
        for (int end = 0; end < 2; ++end)
            du[end] = Vec2(u_full[2 * seg.side_a[end]] - u_full[2 * seg.side_b[end]],
                           u_full[2 * seg.side_a[end] + 1] - u_full[2 * seg.side_b[end] + 1]);
        for (int end = 0; end < 2; ++end) {
            const Vec2 combo = du[end] + 0.5 * du[1 - end];
            const Vec2 t(phi * L / 3.0 * (W.m[0][0] * combo.x + W.m[0][1] * combo.y),
                         phi * L / 3.0 * (W.m[1][0] * combo.x + W.m[1][1] * combo.y));
            force[2 * seg.side_a[end]] += t.x;
            force[2 * seg.side_a[end] + 1] += t.y;
            force[2 * seg.side_b[end]] -= t.x;
            force[2 * seg.side_b[end] + 1] -= t.y;
        }
    }
    // penetration penalty: nodally lumped
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const auto& law = laws_[pair.interface];
        const double wn = pair_jump(p, u_full).x;
        if (wn >= 0.0) continue;
        const double t = law.kG * pair.lumped_length * wn;
        force[2 * pair.node_a] += t * pair.normal.x;
        force[2 * pair.node_a + 1] += t * pair.normal.y;
        force[2 * pair.node_b] -= t * pair.normal.x;
        force[2 * pair.node_b + 1] -= t * pair.normal.y;
    }
    return force;
}

EnergyBreakdown Assembler::energies(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                                    const Eigen::VectorXd& zeta) const {
    check_damage_fields(alpha, zeta);
    EnergyBreakdown out;
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& g = tri_[t];
        const auto& mat = materials_[tr.subdomain];
        const double abar = (alpha[tr.n[0]] + alpha[tr.n[1]] + alpha[tr.n[2]]) / 3.0;
        const double Phi = bulk_degradation_eval(mat.degradation, abar).value;
        const Sym2 e = element_strain(t, u_full);
        const StrainSplit sp = strain_split(e);
        out.bulk_elastic +=
            g.area * (Phi * (mat.Kp * sp.sph_plus.norm2() + mat.mu * sp.dev.norm2()) +
                      mat.Kp * sp.sph_minus.norm2());
        double gx = 0.0, gy = 0.0;
        for (int k = 0; k < 3; ++k) {
            gx += g.bg[k] * alpha[tr.n[k]];
            gy += g.cg[k] * alpha[tr.n[k]];
        }
        out.bulk_fracture += g.area * (3.0 * mat.GcI / 8.0) *
                             ((1.0 - abar) / mat.eps + mat.eps * (gx * gx + gy * gy));
    }
    for (const auto& seg : mesh_.interface_segments) {
        const auto& law = laws_[seg.interface];
        const double zbar = 0.5 * (zeta[seg.pair[0]] + zeta[seg.pair[1]]);
        const double phi = interface_degradation_eval(law.degradation, zbar).value;
        const JumpStiffness W(seg.frame.normal, seg.frame.tangent, law.kn, law.ks);
        const double L = seg.frame.length;
        Vec2 du[2];
        for (int end = 0; end < 2; ++end)
            du[end] = Vec2(u_full[2 * seg.side_a[end]] - u_full[2 * seg.side_b[end]],
                           u_full[2 * seg.side_a[end] + 1] - u_full[2 * seg.side_b[end] + 1]);
        auto wdot = [&](const Vec2& a, const Vec2& b) {
            return a.x * (W.m[0][0] * b.x + W.m[0][1] * b.y) +
                   a.y * (W.m[1][0] * b.x + W.m[1][1] * b.y);
        };
        out.interface_adhesive +=
            0.5 * phi * L / 3.0 * (wdot(du[0], du[0]) + wdot(du[0], du[1]) + wdot(du[1], du[1]));
        if (law.eps_i > 0.0) {
            const double dz = zeta[seg.pair[1]] - zeta[seg.pair[0]];
            out.interface_fracture += law.GciI * law.eps_i * law.eps_i * dz * dz / L;
        }
    }
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const auto& law = laws_[pair.interface];
        const double wn = pair_jump(p, u_full).x;
        const double pen = std::min(wn, 0.0);
        out.interface_adhesive += 0.5 * law.kG * pair.lumped_length * pen * pen;
        out.interface_fracture += law.GciI * pair.lumped_length * (1.0 - zeta[p]);
    }
    return out;
}

double Assembler::dissipation_increment(const Eigen::VectorXd& u_full,
                                        const Eigen::VectorXd& a_old, const Eigen::VectorXd& a_new,
                                        const Eigen::VectorXd& z_old, const Eigen::VectorXd& z_new,
                                        bool include_gc) const {
    double R = 0.0;
    for (int t = 0; t < dof_.n_tri; ++t) {
        const auto& tr = mesh_.triangles[t];
        const auto& mat = materials_[tr.subdomain];
        const double D = bulk_mode_dissipation(mat, element_strain(t, u_full));
        const double coeff = 3.0 / (8.0 * mat.eps) * (D + (include_gc ? mat.GcI : 0.0));
        const double m = tri_[t].area / 3.0;
        for (int k = 0; k < 3; ++k) R += m * coeff * (a_old[tr.n[k]] - a_new[tr.n[k]]);
    }
    for (int p = 0; p < dof_.n_pairs; ++p) {
        const auto& pair = mesh_.interface_pairs[p];
        const auto& law = laws_[pair.interface];
        const Vec2 w = pair_jump(p, u_full);
        const double D = interface_mode_dissipation(law, w.x, w.y);
        R += pair.lumped_length * (D + (include_gc ? law.GciI : 0.0)) * (z_old[p] - z_new[p]);
    }
    return R;
}

}  // namespace bifrac
