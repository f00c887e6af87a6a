#pragma once

#include "bifrac/common.hpp"

namespace bifrac {

/// Degradation multiplier on the bulk stiffness as a function of the
/// phase-field variable a in [0,1] (1 = intact).
///
/// Families:
///   quadratic:  Phi(a) = a^2 + delta_reg
///   rational:   Phi(a) = a^2 / (a^2 + beta (1 - a)) + delta_reg
struct BulkDegradation {
    enum class Family { quadratic, rational };
    Family family = Family::quadratic;
    double delta_reg = 1e-6;  // residual stiffness fraction
    double beta = 0.0;        // rational-family shape

    static BulkDegradation quadratic(double delta_reg = 1e-6);
    static BulkDegradation rational(double beta, double delta_reg = 1e-6);
};

struct DegradationValue {
    double value;
    double d1;
    double d2;
};

/// Phi(a), Phi'(a), Phi''(a). Second derivative reported raw; clamping is an
/// assembly concern. Throws ConfigError for a outside [0,1].
DegradationValue bulk_degradation_eval(const BulkDegradation& deg, double a);

/// Interface degradation, phi(0) = 0, phi(1) = 1, convex increasing.
///
/// Families:
///   rational:     phi(z) = beta z / (1 + beta - z)
///   exponential:  phi(z) = (exp(-ginv(beta z + delta)) - exp(-ginv(delta))) /
///                          (exp(-ginv(beta + delta)) - exp(-ginv(delta)))
///                 with gamma(z) = exp(-z)(1 + z + z^2/2) and ginv its inverse
///                 on z >= 0 (gamma decreases from 1 to 0).
struct InterfaceDegradation {
    enum class Family { exponential, rational };
    Family family = Family::rational;
    double beta = 0.0;
    double delta = 0.0;  // exponential family only

    static InterfaceDegradation rational(double beta);
    static InterfaceDegradation exponential(double beta, double delta);
};

/// phi(z), phi'(z), phi''(z). Throws ConfigError for z outside [0,1] or for a
/// gamma-inverse argument outside (0,1].
DegradationValue interface_degradation_eval(const InterfaceDegradation& deg, double z);

/// gamma(z) = exp(-z)(1 + z + z^2/2), strictly decreasing on [0, inf).
double exp_gamma(double z);
/// Inverse of exp_gamma on (0,1], solved to absolute tolerance 1e-12 by
/// bracketed bisection with Newton polish.
double exp_gamma_inverse(double y);

struct BulkMaterial {
    double Kp;    // plane-strain bulk modulus [Pa]
    double mu;    // shear modulus [Pa]
    double GcI;   // mode-I fracture energy [J/m^2]
    double GcII;  // mode-II fracture energy [J/m^2]
    double eps;   // phase-field length scale [m]
    BulkDegradation degradation;

    void validate() const;  // throws ConfigError on invariant violation
};

struct InterfaceLaw {
    double kn;     // adhesive normal stiffness [Pa/m]
    double ks;     // adhesive tangential stiffness [Pa/m]
    double kG;     // normal-compliance penalty stiffness [Pa/m]
    double GciI;   // mode-I interface fracture energy [J/m^2]
    double GciII;  // mode-II interface fracture energy [J/m^2]
    double eps_i;  // interface damage length scale [m]
    InterfaceDegradation degradation;

    void validate() const;
};

/// Orthogonal split e = sph_plus + sph_minus + dev with the 2D convention
/// sph e = (tr e / 2) I; at most one spherical part is nonzero.
struct StrainSplit {
    Sym2 sph_plus;
    Sym2 sph_minus;
    Sym2 dev;
    double trace;
};

StrainSplit strain_split(const Sym2& e);

/// Mode-mixity dissipation density for bulk damage,
///   D(e) = (Kp|sph+ e|^2 + mu|dev e|^2) /
///          (Kp|sph+ e|^2/GcI + mu|dev e|^2/GcII) - GcI,
/// 0 in pure mode I (dev e = 0), GcII - GcI in pure mode II (sph+ e = 0).
/// Returns 0 when both split norms vanish (below 1e-30).
double bulk_mode_dissipation(const BulkMaterial& mat, const Sym2& e);

/// Mode-mixity dissipation per area for the interface,
///   D(w) = GciI tan^2( (2/pi) atan sqrt(GciII/GciI - 1) * atan(w_s / w_n+) ),
/// with atan(w_s/w_n+) = sign(w_s) pi/2 when w_n <= 0; exactly 0 when w_s = 0.
/// The jump w = (w_n, w_s) is given in the segment (n, s) frame.
double interface_mode_dissipation(const InterfaceLaw& law, double w_n, double w_s);

}  // namespace bifrac
