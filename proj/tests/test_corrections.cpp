#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "qchain/corrections.hpp"
#include "qchain/measurement.hpp"
#include "qchain/qutrit.hpp"

using namespace qchain;

namespace {

ChannelCoeffs primed_channel() {
    // a0*a2 = 0.3122 < a1^2 = 0.36
    return make_channel(0.5, 0.6, std::sqrt(0.39));
}

ChannelCoeffs unprimed_channel() {
    // a0*a2 = 0.1895 > a1^2 = 0.0625
    return make_channel(0.2, 0.25, std::sqrt(1 - 0.04 - 0.0625));
}

// Channel with a0*a2 = a1^2 exactly at the branch boundary (up to rounding):
// fix a1 = t and solve a0^2 + (t^2/a0)^2 = 1 - t^2 for the smaller root.
ChannelCoeffs tie_channel(double t) {
    const double q = 1.0 - t * t;
    const double x = std::sqrt((q - std::sqrt(q * q - 4 * t * t * t * t)) / 2.0);
    const double a2 = t * t / x;
    const double norm = std::sqrt(x * x + t * t + a2 * a2);
    return make_channel(x / norm, t / norm, a2 / norm);
}

double diag_dev(const QutritOperator& op, double d0, double d1, double d2) {
    return op.max_abs_diff(QutritOperator::diagonal(d0, d1, d2));
}

}  // namespace

TEST_CASE("correction_unitary reproduces the table entries") {
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            const QutritOperator u = correction_unitary(m, n);
            CHECK(u.unitarity_error() < algebra_tol);
            for (int c = 0; c < 3; ++c) {
                const double t = -2.0 * std::numbers::pi * n * c / 3.0;
                const Amplitude want{std::cos(t), std::sin(t)};
                CHECK(std::abs(u((c + m) % 3, c) - want) < algebra_tol);
            }
        }
    }
    CHECK(correction_unitary(0, 0).max_abs_diff(QutritOperator::identity()) == 0.0);

    // (1, 0) is the plain cyclic shift |c> -> |c+1>.
    const QutritOperator shift = correction_unitary(1, 0);
    CHECK(std::abs(shift(1, 0) - 1.0) < algebra_tol);
    CHECK(std::abs(shift(2, 1) - 1.0) < algebra_tol);
    CHECK(std::abs(shift(0, 2) - 1.0) < algebra_tol);
    CHECK(std::abs(shift(0, 0)) < algebra_tol);
}

TEST_CASE("resolve_correction is the adjoint of the like-labeled table entry") {
    // The table subscripts index the error pattern, so the canonicalizing
    // operator for outcome (m, n) is the adjoint. Frozen here after deriving
    // it numerically; the next test re-derives it end to end.
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            const QutritOperator& got = resolve_correction(GbmOutcome{m, n});
            CHECK(got.max_abs_diff(correction_unitary(m, n).adjoint()) < algebra_tol);
        }
    }
}

TEST_CASE("resolve_correction cancels the measurement phases exactly") {
    const PureState psi = make_state({0.52, 0.21}, {-0.31, 0.56}, {0.37, -0.14});
    const ChannelCoeffs ch = make_channel(0.35, 0.55, std::sqrt(1 - 0.1225 - 0.3025));
    const std::array<double, 3> a = {ch.a0(), ch.a1(), ch.a2()};
    const PureState reg = tensor(psi, channel_state(ch));

    for (int m = 0; m < 3; ++m) {
        // Target pattern for family m: c_j * a_{(j+m) mod 3} |j>, no phases.
        std::vector<Amplitude> t(3);
        for (int j = 0; j < 3; ++j) t[j] = psi.amp(j) * a[(j + m) % 3];
        const PureState target = PureState(1, std::move(t)).normalized();

        for (int n = 0; n < 3; ++n) {
            const MeasurementRecord rec = gbm_collapse(reg, {0, 1}, GbmOutcome{m, n});
            const PureState corrected = apply_operator(
                resolve_correction(GbmOutcome{m, n}), rec.post_state, 0);
            // Not just fidelity 1: amplitudes agree termwise, so every
            // residual phase is gone and the n dependence collapses.
            double dev = 0.0;
            for (int j = 0; j < 3; ++j) {
                dev = std::max(dev, std::abs(corrected.amp(j) - target.amp(j)));
            }
            CHECK(dev < algebra_tol);
        }
    }
}

TEST_CASE("single_step_recovery equalizes the damped pattern") {
    const ChannelCoeffs ch = primed_channel();
    const double a0 = ch.a0(), a1 = ch.a1(), a2 = ch.a2();

    const KrausPair f0 = single_step_recovery(ch, 0);
    CHECK(diag_dev(f0.e_success, 1.0, a0 / a1, a0 / a2) < algebra_tol);
    const KrausPair f1 = single_step_recovery(ch, 1);
    CHECK(diag_dev(f1.e_success, a0 / a1, a0 / a2, 1.0) < algebra_tol);
    const KrausPair f2 = single_step_recovery(ch, 2);
    CHECK(diag_dev(f2.e_success, a0 / a2, 1.0, a0 / a1) < algebra_tol);

    for (const KrausPair& kp : {f0, f1, f2}) {
        CHECK(kp.completeness_error() < algebra_tol);
    }

    const ChannelCoeffs degenerate = make_channel(0.0, std::numbers::sqrt2 / 2,
                                                  std::numbers::sqrt2 / 2);
    CHECK_THROWS_AS(single_step_recovery(degenerate, 0), DegenerateChannel);
}

TEST_CASE("classify_collapse depends only on the family multiset") {
    const std::map<std::array<int, 3>, int> expected{
        {{0, 0, 0}, 1}, {{1, 1, 1}, 2}, {{2, 2, 2}, 3}, {{0, 0, 1}, 4},
        {{1, 1, 2}, 5}, {{0, 2, 2}, 6}, {{0, 0, 2}, 7}, {{0, 1, 1}, 8},
        {{1, 2, 2}, 9}, {{0, 1, 2}, 10},
    };
    for (int m1 = 0; m1 < 3; ++m1) {
        for (int m2 = 0; m2 < 3; ++m2) {
            for (int m3 = 0; m3 < 3; ++m3) {
                std::array<int, 3> key{m1, m2, m3};
                std::sort(key.begin(), key.end());
                CHECK(classify_collapse(m1, m2, m3).index() == expected.at(key));
            }
        }
    }
    CHECK_THROWS_AS(CollapseClass(0), IndexOutOfRange);
    CHECK_THROWS_AS(CollapseClass(11), IndexOutOfRange);
}

TEST_CASE("collapse_factors multiply the per-hop coefficients") {
    const ChannelCoeffs ch = unprimed_channel();
    const double a[3] = {ch.a0(), ch.a1(), ch.a2()};

    // Class 4 is {0, 0, 1}: component j collects a_j * a_j * a_{j+1}.
    const auto f4 = collapse_factors(ch, CollapseClass(4));
    for (int j = 0; j < 3; ++j) {
        CHECK(f4[j] == doctest::Approx(a[j] * a[j] * a[(j + 1) % 3]).epsilon(1e-14));
    }

    // Class 10 is {0, 1, 2}: every component collects a0*a1*a2.
    const auto f10 = collapse_factors(ch, CollapseClass(10));
    for (int j = 0; j < 3; ++j) {
        CHECK(f10[j] == doctest::Approx(a[0] * a[1] * a[2]).epsilon(1e-14));
    }
}

TEST_CASE("gctp_recovery matches the expected diagonals") {
    const ChannelCoeffs up = unprimed_channel();
    const ChannelCoeffs pr = primed_channel();
    CHECK_FALSE(recovery_branch(up).primed);
    CHECK(recovery_branch(pr).primed);

    {
        // Class 1 ({0,0,0}) has no branch dependence.
        const double a0 = up.a0(), a1 = up.a1(), a2 = up.a2();
        const KrausPair kp = *gctp_recovery(up, CollapseClass(1));
        CHECK(diag_dev(kp.e_success, 1.0, std::pow(a0 / a1, 3), std::pow(a0 / a2, 3)) <
              algebra_tol);
    }
    {
        // Class 7 ({0,0,2}), unprimed: scale onto component 1.
        const double a0 = up.a0(), a1 = up.a1(), a2 = up.a2();
        const KrausPair kp = *gctp_recovery(up, CollapseClass(7));
        CHECK(diag_dev(kp.e_success, a1 * a1 / (a0 * a2), 1.0, a0 * a1 / (a2 * a2)) <
              algebra_tol);
    }
    {
        // Class 7, primed: scale onto component 0.
        const double a0 = pr.a0(), a1 = pr.a1(), a2 = pr.a2();
        const KrausPair kp = *gctp_recovery(pr, CollapseClass(7));
        CHECK(diag_dev(kp.e_success, 1.0, a0 * a2 / (a1 * a1), a0 * a0 / (a1 * a2)) <
              algebra_tol);
    }

    for (int cls = 1; cls <= 9; ++cls) {
        CHECK(gctp_recovery(up, CollapseClass(cls))->completeness_error() < algebra_tol);
        CHECK(gctp_recovery(pr, CollapseClass(cls))->completeness_error() < algebra_tol);
    }
    CHECK_FALSE(gctp_recovery(up, CollapseClass(10)).has_value());

    const ChannelCoeffs degenerate = make_channel(0.0, std::numbers::sqrt2 / 2,
                                                  std::numbers::sqrt2 / 2);
    CHECK_THROWS_AS(gctp_recovery(degenerate, CollapseClass(1)), DegenerateChannel);
    CHECK_FALSE(gctp_recovery(degenerate, CollapseClass(10)).has_value());
}

TEST_CASE("the recovery branches coincide at the boundary") {
    const ChannelCoeffs ch = tie_channel(0.55);
    const double a0 = ch.a0(), a1 = ch.a1(), a2 = ch.a2();
    CHECK(a0 * a2 == doctest::Approx(a1 * a1).epsilon(1e-12));
    CHECK(recovery_branch(ch).primed);

    // The two candidate scale targets for classes 7..9 agree when
    // a0*a2 = a1^2, so the selected branch is continuous across the tie.
    const double primed_term = std::pow(a0, 4) * a2 * a2;
    const double unprimed_term = std::pow(a1, 4) * a0 * a0;
    CHECK(primed_term == doctest::Approx(unprimed_term).epsilon(1e-12));

    for (int cls = 7; cls <= 9; ++cls) {
        CHECK(gctp_recovery(ch, CollapseClass(cls))->completeness_error() < algebra_tol);
    }
}
