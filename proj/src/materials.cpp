#include "bifrac/materials.hpp"

#include <algorithm>
#include <limits>

namespace bifrac {

BulkDegradation BulkDegradation::quadratic(double delta_reg) {
    BulkDegradation d;
    d.family = Family::quadratic;
    d.delta_reg = delta_reg;
    return d;
}

BulkDegradation BulkDegradation::rational(double beta, double delta_reg) {
    if (beta <= 0.0)
        throw ConfigError("rational bulk degradation requires beta > 0");
    BulkDegradation d;
    d.family = Family::rational;
    d.beta = beta;
    d.delta_reg = delta_reg;
    return d;
}

DegradationValue bulk_degradation_eval(const BulkDegradation& deg, double a) {
    if (a < 0.0 || a > 1.0)
        throw ConfigError("bulk damage value outside [0,1]: " + std::to_string(a));
    switch (deg.family) {
        case BulkDegradation::Family::quadratic:
            return {a * a + deg.delta_reg, 2.0 * a, 2.0};
        case BulkDegradation::Family::rational: {
            const double b = deg.beta;
            const double den = a * a + b * (1.0 - a);
            const double dden = 2.0 * a - b;
            const double value = a * a / den + deg.delta_reg;
            // d/da [a^2/den] = beta a (2 - a) / den^2
            const double d1 = b * a * (2.0 - a) / (den * den);
            const double d2 = b * ((2.0 - 2.0 * a) * den - 2.0 * a * (2.0 - a) * dden) / (den * den * den);
            return {value, d1, d2};
        }
    }
    throw Error("unreachable degradation family");
}

InterfaceDegradation InterfaceDegradation::rational(double beta) {
    if (beta <= 0.0)
        throw ConfigError("rational interface degradation requires beta > 0");
    InterfaceDegradation d;
    d.family = Family::rational;
    d.beta = beta;
    return d;
}

InterfaceDegradation InterfaceDegradation::exponential(double beta, double delta) {
    if (beta <= 0.0 || delta <= 0.0 || beta + delta >= 1.0)
        throw ConfigError("exponential interface degradation requires beta > 0, delta > 0, beta + delta < 1");
    InterfaceDegradation d;
    d.family = Family::exponential;
    d.beta = beta;
    d.delta = delta;
    return d;
}

double exp_gamma(double z) {
    return std::exp(-z) * (1.0 + z + 0.5 * z * z);
}

double exp_gamma_inverse(double y) {
    if (!(y > 0.0) || y > 1.0)
        throw ConfigError("gamma-inverse argument outside (0,1]: " + std::to_string(y));
    if (y == 1.0) return 0.0;
    // bracket [lo, hi] with gamma(lo) >= y >= gamma(hi)
    double lo = 0.0, hi = 1.0;
    while (exp_gamma(hi) > y) hi *= 2.0;
    // gamma'(z) = -z^2 exp(-z) / 2
    auto deriv = [](double z) { return -0.5 * z * z * std::exp(-z); };
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = exp_gamma(z) - y;
        if (f > 0.0)
            lo = z;
        else
            hi = z;
        const double d = deriv(z);
        double znext = (d != 0.0) ? z - f / d : 0.5 * (lo + hi);
        if (!(znext > lo) || !(znext < hi)) znext = 0.5 * (lo + hi);
        if (std::abs(znext - z) < 1e-15 * (1.0 + z)) return znext;
        z = znext;
    }
    return z;
}

DegradationValue interface_degradation_eval(const InterfaceDegradation& deg, double z) {
    if (z < 0.0 || z > 1.0)
        throw ConfigError("interface damage value outside [0,1]: " + std::to_string(z));
    switch (deg.family) {
        case InterfaceDegradation::Family::rational: {
            const double b = deg.beta;
            const double den = 1.0 + b - z;
            return {b * z / den, b * (1.0 + b) / (den * den), 2.0 * b * (1.0 + b) / (den * den * den)};
        }
        case InterfaceDegradation::Family::exponential: {
            const double b = deg.beta, d = deg.delta;
            const double e0 = std::exp(-exp_gamma_inverse(d));
            const double e1 = std::exp(-exp_gamma_inverse(b + d));
            const double C = e1 - e0;  // > 0: gamma-inverse decreasing in its argument
            const double g = exp_gamma_inverse(b * z + d);
            const double ez = std::exp(-g);
            // d/dz exp(-ginv(bz+d)) = 2b/g^2, second derivative 8 b^2 e^g / g^5
            const double value = (ez - e0) / C;
            const double d1 = 2.0 * b / (g * g) / C;
            const double d2 = 8.0 * b * b * std::exp(g) / (g * g * g * g * g) / C;
            return {value, d1, d2};
        }
    }
    throw Error("unreachable degradation family");
}

void BulkMaterial::validate() const {
    if (!(Kp > 0.0)) throw ConfigError("bulk material requires Kp > 0");
    if (!(mu > 0.0)) throw ConfigError("bulk material requires mu > 0");
    if (!(GcI > 0.0)) throw ConfigError("bulk material requires GcI > 0");
    if (!(GcII >= GcI)) throw ConfigError("bulk material requires GcII >= GcI");
    if (!(eps > 0.0)) throw ConfigError("bulk material requires eps > 0");
    if (degradation.family == BulkDegradation::Family::rational && !(degradation.beta > 0.0))
        throw ConfigError("rational bulk degradation requires beta > 0");
}

void InterfaceLaw::validate() const {
    if (!(kn > 0.0) || !(ks > 0.0) || !(kG > 0.0))
        throw ConfigError("interface law requires kn, ks, kG > 0");
    if (!(GciI > 0.0)) throw ConfigError("interface law requires GciI > 0");
    if (!(GciII >= GciI)) throw ConfigError("interface law requires GciII >= GciI");
    if (!(eps_i >= 0.0)) throw ConfigError("interface law requires eps_i >= 0");
    if (degradation.family == InterfaceDegradation::Family::exponential) {
        if (!(degradation.beta > 0.0) || !(degradation.delta > 0.0) ||
            !(degradation.beta + degradation.delta < 1.0))
            throw ConfigError("exponential interface degradation requires beta, delta > 0, beta + delta < 1");
    } else if (!(degradation.beta > 0.0)) {
        throw ConfigError("rational interface degradation requires beta > 0");
    }
}

StrainSplit strain_split(const Sym2& e) {
    StrainSplit s;
    s.trace = e.trace();
    const double half_tr = 0.5 * s.trace;
    const Sym2 sph(half_tr, half_tr, 0.0);
    if (s.trace > 0.0) {
        s.sph_plus = sph;
    } else {
        s.sph_minus = sph;
    }
    s.dev = e - sph;
    return s;
}

double bulk_mode_dissipation(const BulkMaterial& mat, const Sym2& e) {
    const StrainSplit s = strain_split(e);
    const double sp = std::sqrt(s.sph_plus.norm2());
    const double dv = std::sqrt(s.dev.norm2());
    if (sp < 1e-30 && dv < 1e-30) return 0.0;
    const double p = mat.Kp * sp * sp;
    const double q = mat.mu * dv * dv;
    return (p + q) / (p / mat.GcI + q / mat.GcII) - mat.GcI;
}

double interface_mode_dissipation(const InterfaceLaw& law, double w_n, double w_s) {
    if (w_s == 0.0) return 0.0;
    const double ratio = law.GciII / law.GciI;
    const double mix = std::atan(std::sqrt(ratio - 1.0));
    const double pi = 3.14159265358979323846;
    const double angle = (w_n > 0.0) ? std::atan(w_s / w_n) : ((w_s > 0.0) ? 0.5 * pi : -0.5 * pi);
    const double t = std::tan((2.0 / pi) * mix * angle);
    return law.GciI * t * t;
}

}  // namespace bifrac
