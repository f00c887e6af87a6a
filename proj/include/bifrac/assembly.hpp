#pragma once

#include <vector>

#include "bifrac/materials.hpp"
#include "bifrac/mesh.hpp"
#include "bifrac/qp.hpp"

namespace bifrac {

/// Unknown layout. Displacement QP: [reduced u | psi per triangle | omega per
/// interface pair]. Damage QP: [alpha per node | zeta per interface pair].
struct DofMap {
    int n_nodes = 0;
    int n_tri = 0;
    int n_pairs = 0;
    int n_u = 0;       // 2 * n_nodes
    int nu_free = 0;   // unconstrained displacement components
    std::vector<int> u_reduced;  // u-dof -> reduced index, -1 if constrained

    int x_size() const { return nu_free + n_tri + n_pairs; }
    int psi_index(int t) const { return nu_free + t; }
    int omega_index(int p) const { return nu_free + n_tri + p; }
    int d_size() const { return n_nodes + n_pairs; }
    int zeta_index(int p) const { return n_nodes + p; }
};

/// Dirichlet data at one time instant. The constrained pattern must match the
/// DofMap that reduced the displacement unknowns.
struct DirichletState {
    std::vector<char> constrained;  // per u-dof (2 per node, x then y)
    std::vector<double> value;      // prescribed value, 0 where free
};

struct StressField {
    std::vector<Sym2> sigma;       // per triangle
    std::vector<double> trace;     // tr sigma per triangle
    std::vector<double> dev_norm;  // |dev sigma| per triangle
    std::vector<double> psi;       // element auxiliary (for output)
    std::vector<double> p_n;       // per segment, midpoint traction
    std::vector<double> p_s;
};

struct EnergyBreakdown {
    double bulk_elastic = 0.0;
    double bulk_fracture = 0.0;       // phase-field crack terms
    double interface_adhesive = 0.0;  // adhesive + penetration penalty
    double interface_fracture = 0.0;
    double total() const {
        return bulk_elastic + bulk_fracture + interface_adhesive + interface_fracture;
    }
};

/// Builds the per-step quadratic programs and the derived fields from a split
/// mesh, per-subdomain bulk materials, and per-interface laws. Holds only
/// immutable precomputed geometry; all methods are const and reentrant.
class Assembler {
  public:
    Assembler(const Mesh& mesh, std::vector<BulkMaterial> materials,
              std::vector<InterfaceLaw> laws, const DirichletState& pattern);

    const DofMap& dofs() const { return dof_; }
    const Mesh& mesh() const { return mesh_; }
    const BulkMaterial& material(int subdomain) const { return materials_[subdomain]; }
    const InterfaceLaw& law(int interface) const { return laws_[interface]; }

    /// Displacement QP at fixed damage: bulk term Phi(alpha)(Kp|sph e|^2 +
    /// mu|dev e|^2) with the compressive split carried by element-constant
    /// psi >= 0, psi + tr e >= 0; interface term (1/2)(kappa phi(zeta) w) . w
    /// plus (1/2) kG omega^2 with omega >= 0, omega + w_n >= 0 nodally.
    /// Dirichlet components are eliminated into the linear term.
    BoxQP displacement_qp(const Eigen::VectorXd& alpha, const Eigen::VectorXd& zeta,
                          const DirichletState& bc) const;

    /// Initial iterate for the displacement QP from a full nodal field.
    Eigen::VectorXd displacement_start(const Eigen::VectorXd& u_full,
                                       const DirichletState& bc) const;
    /// Full nodal displacements from a QP solution vector.
    Eigen::VectorXd expand_displacement(const Eigen::VectorXd& x, const DirichletState& bc) const;
    /// Element-constant psi recovered from a QP solution vector.
    Eigen::VectorXd extract_psi(const Eigen::VectorXd& x) const;
    Eigen::VectorXd extract_omega(const Eigen::VectorXd& x) const;

    /// Damage QP: quadratic Taylor expansion of the exact objective around
    /// the SQP iterate (a_iter, z_iter), boxed by 0 <= . <= previous step.
    /// Second derivatives are clamped below at 1e-12.
    BoxQP damage_qp(const Eigen::VectorXd& u_full, const Eigen::VectorXd& a_iter,
                    const Eigen::VectorXd& z_iter, const Eigen::VectorXd& a_prev,
                    const Eigen::VectorXd& z_prev) const;

    /// Exact (non-Taylor) damage objective at fixed displacements; the
    /// additive constant independent of (alpha, zeta) is dropped. The damage
    /// QP is the second-order Taylor polynomial of this function.
    double damage_objective(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                            const Eigen::VectorXd& zeta) const;

    StressField recover_stress(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& zeta) const;

    /// Gradient of the stored energy with respect to all displacement
    /// components; restricted to constrained components it is the reaction.
    Eigen::VectorXd internal_forces(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                                    const Eigen::VectorXd& zeta) const;

    EnergyBreakdown energies(const Eigen::VectorXd& u_full, const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& zeta) const;

    /// Dissipation of one damage increment at fixed displacements:
    ///   sum (3/(8 eps)) (D + [GcI]) (a_old - a_new) + sum (D_i + [GciI]) (z_old - z_new),
    /// with the Gc terms included only when include_gc is set (reporting
    /// convention; the energy audit uses the bare D split).
    double dissipation_increment(const Eigen::VectorXd& u_full, const Eigen::VectorXd& a_old,
                                 const Eigen::VectorXd& a_new, const Eigen::VectorXd& z_old,
                                 const Eigen::VectorXd& z_new, bool include_gc) const;

    Sym2 element_strain(int t, const Eigen::VectorXd& u_full) const;
    /// Nodal jump (w_n, w_s) at an interface pair in its node frame.
    Vec2 pair_jump(int p, const Eigen::VectorXd& u_full) const;

  private:
    struct TriGeom {
        std::array<double, 3> bg;  // shape gradients d/dx
        std::array<double, 3> cg;  // shape gradients d/dy
        double area;
    };

    const Mesh& mesh_;
    std::vector<BulkMaterial> materials_;
    std::vector<InterfaceLaw> laws_;
    DofMap dof_;
    std::vector<TriGeom> tri_;

    void check_damage_fields(const Eigen::VectorXd& alpha, const Eigen::VectorXd& zeta) const;
};

}  // namespace bifrac
