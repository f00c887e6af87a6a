#pragma once

#include <array>
#include <vector>

#include "bifrac/materials.hpp"

namespace bifrac {

/// Which bulk onset display to evaluate. The modified form rewrites the
/// criterion in terms of the positive stress trace and carries an extra
/// (1 + (mu/Kp)(1 - GcI/GcII)) factor on the trace term; it is the form the
/// reference values are quoted in and the default. Both share the
/// deviatoric coefficient (2 Kp / mu)(GcI / GcII) and the right-hand side
/// 3 Kp GcI / (eps Phi'(1)).
enum class BulkOnsetForm { original, modified };

/// Sampled damage-onset locus plus scalar landmarks. For the bulk the
/// samples are (tr sigma, |dev sigma|); for the interface (p_n, p_s).
struct OnsetCurve {
    std::vector<std::array<double, 2>> samples;
    double pure_opening = 0.0;       // closed-form landmark (see module docs)
    double pure_shear = 0.0;         // locus value on the shear axis
    double axis_intersection = 0.0;  // exact locus root on the opening axis
    std::vector<double> no_root_rays;  // ray angles with no finite root
};

/// Bulk onset locus, sampled along polar rays by bracketed bisection.
/// pure_opening carries the large-ratio landmark
/// sqrt(3 GcI / (eps Phi'(1)) * Kp^2 / (Kp + mu)) for the modified form and
/// the exact axis value for the original form. Throws for Phi'(1) <= 0.
OnsetCurve bulk_onset(const BulkMaterial& mat, BulkOnsetForm form = BulkOnsetForm::modified,
                      int n_samples = 256);

/// Interface onset locus. pure_opening carries the family landmark:
/// sqrt(2 kn GciI beta / (beta + 1)) for the rational family (exact axis
/// intersection) and sqrt(exp(ginv(beta + delta) - 2) kn GciI / beta) for
/// the exponential family (stress maximum over the damage evolution, which
/// occurs below full adhesion).
OnsetCurve interface_onset(const InterfaceLaw& law, int n_samples = 256);

/// One normalized row of the modified bulk criterion,
///   (tr+ sigma)^2 + dev_coeff |dev sigma|^2 = rhs.
struct RatioTableRow {
    double ratio;      // GcII / GcI
    double tr_coeff;   // 1 by normalization
    double dev_coeff;
    double rhs;        // Pa^2
};

/// Locus coefficients for a family of mode-II/mode-I energy ratios; the
/// base material's GcII is ignored.
std::vector<RatioTableRow> onset_ratio_table(const BulkMaterial& base,
                                             const std::vector<double>& ratios);

}  // namespace bifrac
