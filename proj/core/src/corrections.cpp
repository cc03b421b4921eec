#include "qchain/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qchain {

namespace {

Amplitude phase(double turns_of_2pi_over_3) {
    const double t = -2.0 * std::numbers::pi * turns_of_2pi_over_3 / 3.0;
    return {std::cos(t), std::sin(t)};
}

// Representative outcome-family triple for each collapse class.
constexpr std::array<std::array<int, 3>, 10> class_triples = {{
    {0, 0, 0},
    {1, 1, 1},
    {2, 2, 2},
    {0, 0, 1},
    {1, 1, 2},
    {2, 2, 0},
    {0, 0, 2},
    {1, 1, 0},
    {2, 2, 1},
    {0, 1, 2},
}};

KrausPair kraus_from_ratios(const std::array<double, 3>& d) {
    // Floating-point ratios can overshoot 1 by an ulp; clamp the failure
    // entries so the square roots stay real.
    const QutritOperator e_s = QutritOperator::diagonal(d[0], d[1], d[2]);
    const QutritOperator e_f = QutritOperator::diagonal(
        std::sqrt(std::max(0.0, 1.0 - d[0] * d[0])),
        std::sqrt(std::max(0.0, 1.0 - d[1] * d[1])),
        std::sqrt(std::max(0.0, 1.0 - d[2] * d[2])));
    return {e_s, e_f};
}

std::array<QutritOperator, 9> derive_pairing_table() {
    // A probe with distinct complex amplitudes and distinct channel
    // coefficients makes the matching unitary unique.
    const PureState probe =
        make_state({0.52, 0.21}, {-0.31, 0.56}, {0.37, -0.14});
    const double a0 = 0.35, a1 = 0.55;
    const ChannelCoeffs ch(a0, a1, std::sqrt(1.0 - a0 * a0 - a1 * a1));
    const std::array<double, 3> a = {ch.a0(), ch.a1(), ch.a2()};
    const PureState reg = tensor(probe, channel_state(ch));

    std::array<QutritOperator, 9> table;
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            const GbmOutcome outcome{m, n};
            const MeasurementRecord rec = gbm_collapse(reg, {0, 1}, outcome);

            std::vector<Amplitude> want(3);
            for (int j = 0; j < 3; ++j) want[j] = probe.amp(j) * a[(j + m) % 3];
            const PureState target = PureState(1, std::move(want)).normalized();

            bool found = false;
            for (int cand = 0; cand < 18 && !found; ++cand) {
                QutritOperator u = correction_unitary((cand / 3) % 3, cand % 3);
                if (cand >= 9) u = u.adjoint();
                const PureState fixed = apply_operator(u, rec.post_state, 0);
                double dev = 0.0;
                for (int j = 0; j < 3; ++j)
                    dev = std::max(dev, std::abs(fixed.amp(j) - target.amp(j)));
                if (dev <= algebra_tol) {
                    table[outcome.index()] = u;
                    found = true;
                }
            }
            if (!found) {
                throw NoValidPairing("resolve_correction: no table unitary or adjoint "
                                     "canonicalizes outcome (" +
                                     std::to_string(m) + "," + std::to_string(n) + ")");
            }
        }
    }
    return table;
}

}  // namespace

CollapseClass::CollapseClass(int index) : index_(index) {
    if (index < 1 || index > 10) {
        throw IndexOutOfRange("CollapseClass: index must lie in 1..10");
    }
}

QutritOperator correction_unitary(int m, int n) {
    if (m < 0 || m > 2 || n < 0 || n > 2) {
        throw IndexOutOfRange("correction_unitary: subscripts must lie in 0..2");
    }
    QutritOperator u;
    for (int c = 0; c < 3; ++c) u.at((c + m) % 3, c) = phase(static_cast<double>(n * c));
    return u;
}

const QutritOperator& resolve_correction(GbmOutcome outcome) {
    static const std::array<QutritOperator, 9> table = derive_pairing_table();
    if (outcome.m < 0 || outcome.m > 2 || outcome.n < 0 || outcome.n > 2) {
        throw IndexOutOfRange("resolve_correction: outcome indices must lie in 0..2");
    }
    return table[outcome.index()];
}

KrausPair single_step_recovery(const ChannelCoeffs& channel, int family) {
    if (family < 0 || family > 2) {
        throw IndexOutOfRange("single_step_recovery: family must lie in 0..2");
    }
    if (channel.a0() == 0.0) {
        throw DegenerateChannel("single_step_recovery: a0 = 0 admits no recovery");
    }
    const std::array<double, 3> a = {channel.a0(), channel.a1(), channel.a2()};
    std::array<double, 3> d;
    for (int j = 0; j < 3; ++j) d[j] = a[0] / a[(j + family) % 3];
    return kraus_from_ratios(d);
}

BranchSelector recovery_branch(const ChannelCoeffs& channel) {
    return {channel.a0() * channel.a2() <= channel.a1() * channel.a1() + algebra_tol};
}

std::optional<KrausPair> gctp_recovery(const ChannelCoeffs& channel, CollapseClass cls) {
    if (cls.index() == 10) return std::nullopt;
    if (channel.a0() == 0.0) {
        throw DegenerateChannel("gctp_recovery: a0 = 0 admits no recovery");
    }
    const std::array<double, 3> f = collapse_factors(channel, cls);

    // Component holding the smallest coefficient product; its ratio is
    // exactly 1. Classes 7..9 switch position with the recovery branch.
    int t;
    switch (cls.index()) {
        case 1: case 4: t = 0; break;
        case 2: case 5: t = 2; break;
        case 3: case 6: t = 1; break;
        case 7: t = recovery_branch(channel).primed ? 0 : 1; break;
        case 8: t = recovery_branch(channel).primed ? 2 : 0; break;
        default: t = recovery_branch(channel).primed ? 1 : 2; break;  // class 9
    }

    std::array<double, 3> d;
    for (int j = 0; j < 3; ++j) d[j] = f[t] / f[j];
    return kraus_from_ratios(d);
}

CollapseClass classify_collapse(int m1, int m2, int m3) {
    std::array<int, 3> ms = {m1, m2, m3};
    for (int m : ms) {
        if (m < 0 || m > 2) {
            throw IndexOutOfRange("classify_collapse: family indices must lie in 0..2");
        }
    }
    std::sort(ms.begin(), ms.end());
    switch (ms[0] * 9 + ms[1] * 3 + ms[2]) {
        case 0: return CollapseClass(1);    // {0,0,0}
        case 13: return CollapseClass(2);   // {1,1,1}
        case 26: return CollapseClass(3);   // {2,2,2}
        case 1: return CollapseClass(4);    // {0,0,1}
        case 14: return CollapseClass(5);   // {1,1,2}
        case 8: return CollapseClass(6);    // {0,2,2}
        case 2: return CollapseClass(7);    // {0,0,2}
        case 4: return CollapseClass(8);    // {0,1,1}
        case 17: return CollapseClass(9);   // {1,2,2}
        default: return CollapseClass(10);  // {0,1,2}
    }
}

std::array<double, 3> collapse_factors(const ChannelCoeffs& channel, CollapseClass cls) {
    const std::array<double, 3> a = {channel.a0(), channel.a1(), channel.a2()};
    const auto& triple = class_triples[cls.index() - 1];
    std::array<double, 3> f = {1.0, 1.0, 1.0};
    for (int j = 0; j < 3; ++j)
        for (int m : triple) f[j] *= a[(j + m) % 3];
    return f;
}

}  // namespace qchain
