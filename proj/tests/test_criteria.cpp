#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bifrac/criteria.hpp"
#include "support/testutil.hpp"

using namespace bifrac;
using testutil::rel_err;
using testutil::sym_rel_diff;

namespace {

// reference parameter sets from the four experiment families
BulkMaterial matrix_41(double gcii_factor = 1e6) {
    BulkMaterial m;
    m.Kp = 3.1e9;
    m.mu = 1.0e9;
    m.GcI = 750.0;
    m.GcII = gcii_factor * m.GcI;
    m.eps = 0.75e-3;
    m.degradation = BulkDegradation::quadratic();
    return m;
}

BulkMaterial matrix_42() {
    BulkMaterial m;
    m.Kp = 22.0e9;
    m.mu = 12.3e9;
    m.GcI = 0.25;
    m.GcII = 100.0 * m.GcI;
    m.eps = 0.5e-3;
    m.degradation = BulkDegradation::rational(3.0);
    return m;
}

BulkMaterial matrix_44() {
    BulkMaterial m;
    m.Kp = 3.1e9;
    m.mu = 1.0e9;
    m.GcI = 10.0;
    m.GcII = 10.0 * m.GcI;
    m.eps = 1.0e-3;
    m.degradation = BulkDegradation::rational(10.0);
    return m;
}

InterfaceLaw law_41() {
    InterfaceLaw l;
    l.kn = 1e15;
    l.ks = 0.5e15;
    l.kG = 10e15;
    l.GciI = 1.0;
    l.GciII = 1e6;
    l.eps_i = 0.0;
    l.degradation = InterfaceDegradation::exponential(0.99, 0.005);
    return l;
}

InterfaceLaw law_42(double GciI) {
    InterfaceLaw l;
    l.kn = 6.88e12;
    l.ks = 6.88e12;
    l.kG = 1e15;
    l.GciI = GciI;
    l.GciII = 1e6 * GciI;
    l.eps_i = 0.0;
    l.degradation = InterfaceDegradation::rational(0.1);
    return l;
}

}  // namespace

TEST_CASE("bulk opening landmark reproduces the reference values") {
    CHECK(rel_err(bulk_onset(matrix_41()).pure_opening, 59.1e6) < 0.01);
    CHECK(rel_err(bulk_onset(matrix_42()).pure_opening, 2.7e6) < 0.02);
    CHECK(rel_err(bulk_onset(matrix_44()).pure_opening, 2.66e6) < 0.02);
}

TEST_CASE("interface opening landmark reproduces the reference values") {
    CHECK(rel_err(interface_onset(law_41()).pure_opening, 13.85e6) < 0.01);
    CHECK(rel_err(interface_onset(law_42(0.032)).pure_opening, 0.2e6) < 0.01);
    CHECK(rel_err(interface_onset(law_42(0.8)).pure_opening, 1.0e6) < 0.01);
    CHECK(rel_err(interface_onset(law_42(20.0)).pure_opening, 5.0e6) < 0.01);
}

TEST_CASE("onset ratio table against the quoted triplets, residual documented") {
    BulkMaterial base;
    base.Kp = 22.0e9;
    base.mu = 12.3e9;
    base.GcI = 0.1;
    base.GcII = base.GcI;
    base.eps = 1.0e-3;
    base.degradation = BulkDegradation::rational(10.0);
    const auto table = onset_ratio_table(base, {1.0, 25.0, 100.0});

    // quoted values; the stated elastic constants do not reproduce them
    // exactly (the residual is documented), hence the 10% band on the
    // symmetric relative difference
    const double quoted_dev[3] = {3.33, 0.084, 0.021};
    const double quoted_rhs[3] = {0.624e12, 0.396e12, 0.391e12};
    for (int i = 0; i < 3; ++i) {
        CAPTURE(i);
        CHECK(table[i].tr_coeff == 1.0);
        CHECK(sym_rel_diff(table[i].dev_coeff, quoted_dev[i]) < 0.10);
        CHECK(sym_rel_diff(table[i].rhs, quoted_rhs[i]) < 0.10);
    }
    // shear-mode landmarks for the same sets: |dev sigma| at vanishing trace
    const double quoted_dev_crit[3] = {0.433e6, 2.17e6, 4.32e6};
    for (int i = 0; i < 3; ++i) {
        BulkMaterial m = base;
        m.GcII = table[i].ratio * m.GcI;
        CHECK(sym_rel_diff(bulk_onset(m).pure_shear, quoted_dev_crit[i]) < 0.05);
    }
}

TEST_CASE("large ratio kills the deviatoric coefficient") {
    BulkMaterial base = matrix_44();
    const auto table = onset_ratio_table(base, {1.0, 1e4, 1e8});
    CHECK(table[2].dev_coeff < 1e-7 * table[0].dev_coeff);
}

TEST_CASE("landmark equals the locus axis intersection") {
    // bulk: the landmark formula is the large-ratio limit
    BulkMaterial m = matrix_41(1e12);
    const auto curve = bulk_onset(m);
    CHECK(rel_err(curve.pure_opening, curve.axis_intersection) < 1e-10);
    // rational interface landmark is exact at every ratio
    const auto iface = interface_onset(law_42(0.8));
    CHECK(rel_err(iface.pure_opening, iface.axis_intersection) < 1e-12);
}

TEST_CASE("sampled points satisfy the implicit equations") {
    const auto curve = bulk_onset(matrix_42());
    const BulkMaterial m = matrix_42();
    const double dPhi1 = bulk_degradation_eval(m.degradation, 1.0).d1;
    const double rhs = 3.0 * m.Kp * m.GcI / (m.eps * dPhi1);
    for (const auto& s : curve.samples) {
        const double trp = std::max(0.0, s[0]);
        const double lhs = (1.0 + m.mu / m.Kp * (1.0 - m.GcI / m.GcII)) * trp * trp +
                           2.0 * m.Kp / m.mu * (m.GcI / m.GcII) * s[1] * s[1];
        REQUIRE(rel_err(lhs, rhs) < 1e-10);
    }

    const InterfaceLaw law = law_42(0.8);
    const auto iface = interface_onset(law);
    const double dphi1 = interface_degradation_eval(law.degradation, 1.0).d1;
    const double pi = 3.14159265358979323846;
    const double mixroot = std::atan(std::sqrt(law.GciII / law.GciI - 1.0));
    for (const auto& s : iface.samples) {
        const double pn = s[0], ps = s[1];
        const double angle =
            (pn == 0.0) ? ((ps > 0.0 ? 0.5 : -0.5) * pi) : std::atan(ps * law.kn / (pn * law.ks));
        const double t = std::tan(2.0 / pi * mixroot * angle);
        const double rhs_ray = law.GciI / dphi1 * (1.0 + t * t);
        const double lhs = pn * pn / (2.0 * law.kn) + ps * ps / (2.0 * law.ks);
        REQUIRE(rel_err(lhs, rhs_ray) < 1e-10);
    }
}

TEST_CASE("landmarks scale as sqrt(GcI) and 1/sqrt(eps)") {
    BulkMaterial m = matrix_42();
    const double base = bulk_onset(m).pure_opening;
    BulkMaterial m2 = m;
    m2.GcI *= 2.0;
    m2.GcII *= 2.0;
    CHECK(rel_err(bulk_onset(m2).pure_opening, std::sqrt(2.0) * base) < 1e-12);
    BulkMaterial m3 = m;
    m3.eps *= 2.0;
    CHECK(rel_err(bulk_onset(m3).pure_opening, base / std::sqrt(2.0)) < 1e-12);

    InterfaceLaw l = law_42(0.8);
    const double ibase = interface_onset(l).pure_opening;
    l.GciI *= 2.0;
    l.GciII *= 2.0;
    CHECK(rel_err(interface_onset(l).pure_opening, std::sqrt(2.0) * ibase) < 1e-12);
}

TEST_CASE("interface locus is symmetric in the shear traction") {
    const auto curve = interface_onset(law_42(0.8), 201);  // odd count pairs the rays
    const size_t n = curve.samples.size();
    REQUIRE(n == 201);
    for (size_t i = 0; i < n / 2; ++i) {
        const auto& a = curve.samples[i];
        const auto& b = curve.samples[n - 1 - i];
        CHECK(rel_err(a[0], b[0]) < 1e-12);
        CHECK(rel_err(-a[1], b[1]) < 1e-12);
    }
}

TEST_CASE("diverging mixity reports rays without roots") {
    InterfaceLaw law = law_42(0.8);
    law.GciII = 1e14 * law.GciI;
    const auto curve = interface_onset(law);
    CHECK(!curve.no_root_rays.empty());  // near-shear rays exceed the cap
    // the compressive bulk ray has no onset either
    const auto bulk = bulk_onset(matrix_41(2.0));
    CHECK(!bulk.no_root_rays.empty());
}

TEST_CASE("invalid ratio table input is rejected") {
    CHECK_THROWS_AS(onset_ratio_table(matrix_44(), {0.5}), ConfigError);
}
