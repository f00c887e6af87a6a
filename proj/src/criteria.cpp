#include "bifrac/criteria.hpp"

#include <cmath>
#include <functional>

namespace bifrac {

namespace {

constexpr double kPi = 3.14159265358979323846;

// root of a monotone-increasing f along [0, inf) by bracket doubling and
// bisection; returns a negative value when no bracket is found below the cap
double ray_root(const std::function<double(double)>& f, double scale, double cap_factor) {
    double hi = scale;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > cap_factor * scale) return -1.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

OnsetCurve bulk_onset(const BulkMaterial& mat, BulkOnsetForm form, int n_samples) {
    mat.validate();
    const double dPhi1 = bulk_degradation_eval(mat.degradation, 1.0).d1;
    if (!(dPhi1 > 0.0)) throw ConfigError("bulk onset needs Phi'(1) > 0");

    const double rhs = 3.0 * mat.Kp * mat.GcI / (mat.eps * dPhi1);
    const double dev_coeff = 2.0 * mat.Kp / mat.mu * (mat.GcI / mat.GcII);
    const double tr_coeff = (form == BulkOnsetForm::modified)
                                ? 1.0 + mat.mu / mat.Kp * (1.0 - mat.GcI / mat.GcII)
                                : 1.0;

    OnsetCurve curve;
    curve.axis_intersection = std::sqrt(rhs / tr_coeff);
    curve.pure_shear = std::sqrt(rhs / dev_coeff);
    curve.pure_opening = (form == BulkOnsetForm::modified)
                             ? std::sqrt(3.0 * mat.GcI / (mat.eps * dPhi1) * mat.Kp * mat.Kp /
                                         (mat.Kp + mat.mu))
                             : curve.axis_intersection;

    const double scale = std::max(curve.axis_intersection, curve.pure_shear);
    curve.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        // trace may go negative; sample the upper half plane
        const double theta = kPi * static_cast<double>(i) / (n_samples - 1);
        const double ct = std::cos(theta), st = std::sin(theta);
        auto f = [&](double r) {
            const double trp = std::max(0.0, r * ct);
            const double dv = r * st;
            return tr_coeff * trp * trp + dev_coeff * dv * dv - rhs;
        };
        const double r = ray_root(f, scale, 1e6);
        if (r < 0.0) {
            curve.no_root_rays.push_back(theta);
            continue;
        }
        curve.samples.push_back({r * ct, r * st});
    }
    return curve;
}

OnsetCurve interface_onset(const InterfaceLaw& law, int n_samples) {
    law.validate();
    const double dphi1 = interface_degradation_eval(law.degradation, 1.0).d1;
    if (!(dphi1 > 0.0)) throw ConfigError("interface onset needs phi'(1) > 0");

    const double mix = std::atan(std::sqrt(law.GciII / law.GciI - 1.0));
    const double base = law.GciI / dphi1;

    OnsetCurve curve;
    curve.axis_intersection = std::sqrt(2.0 * law.kn * base);
    curve.pure_shear = std::sqrt(2.0 * law.ks * base * (law.GciII / law.GciI));
    switch (law.degradation.family) {
        case InterfaceDegradation::Family::rational:
            curve.pure_opening =
                std::sqrt(2.0 * law.kn * law.GciI * law.degradation.beta /
                          (law.degradation.beta + 1.0));
            break;
        case InterfaceDegradation::Family::exponential: {
            // stress maximum over the damage evolution (reached below full
            // adhesion), in the small-delta closed form
            const double z1 = exp_gamma_inverse(law.degradation.beta + law.degradation.delta);
            curve.pure_opening =
                std::sqrt(std::exp(z1 - 2.0) * law.kn * law.GciI / law.degradation.beta);
            break;
        }
    }

    const double scale = std::max(curve.axis_intersection, 1e-300);
    curve.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double theta = -0.5 * kPi + kPi * static_cast<double>(i) / (n_samples - 1);
        const double ct = std::cos(theta), st = std::sin(theta);
        // the mode angle is constant along the ray
        double angle;
        if (std::abs(ct) < 1e-300)
            angle = (st > 0.0 ? 0.5 : -0.5) * kPi;
        else
            angle = std::atan(st * law.kn / (ct * law.ks));
        const double tt = std::tan(2.0 / kPi * mix * angle);
        const double rhs = base * (1.0 + tt * tt);
        auto f = [&](double r) {
            const double pn = r * ct, ps = r * st;
            return pn * pn / (2.0 * law.kn) + ps * ps / (2.0 * law.ks) - rhs;
        };
        const double r = ray_root(f, scale, 1e6);
        if (r < 0.0) {
            curve.no_root_rays.push_back(theta);
            continue;
        }
        curve.samples.push_back({r * ct, r * st});
    }
    return curve;
}

std::vector<RatioTableRow> onset_ratio_table(const BulkMaterial& base,
                                             const std::vector<double>& ratios) {
    std::vector<RatioTableRow> table;
    table.reserve(ratios.size());
    for (const double ratio : ratios) {
        if (!(ratio >= 1.0)) throw ConfigError("onset ratio table needs GcII/GcI >= 1");
        BulkMaterial mat = base;
        mat.GcII = ratio * mat.GcI;
        mat.validate();
        const double dPhi1 = bulk_degradation_eval(mat.degradation, 1.0).d1;
        const double rhs = 3.0 * mat.Kp * mat.GcI / (mat.eps * dPhi1);
        const double tr_coeff = 1.0 + mat.mu / mat.Kp * (1.0 - 1.0 / ratio);
        const double dev_coeff = 2.0 * mat.Kp / mat.mu / ratio;
        table.push_back({ratio, 1.0, dev_coeff / tr_coeff, rhs / tr_coeff});
    }
    return table;
}

}  // namespace bifrac
