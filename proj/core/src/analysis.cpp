#include "qchain/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qchain {

namespace {

constexpr double inv_sqrt3 = 0.57735026918962576;

void check_a0_domain(double a0, const char* where) {
    if (!(a0 > 0.0) || a0 > inv_sqrt3 * (1.0 + 1e-12)) {
        throw GridOutOfRange(std::string(where) + ": a0 = " + std::to_string(a0) +
                             " outside (0, 1/sqrt(3)]");
    }
}

}  // namespace

double p_single(const ChannelCoeffs& channel) { return 3.0 * channel.a0() * channel.a0(); }

double p_sctp(const ChannelCoeffs& channel, int steps) {
    if (steps < 1) throw ValidationError("p_sctp: steps must be >= 1");
    return std::pow(p_single(channel), steps);
}

double p_gctp4(const ChannelCoeffs& channel) {
    const double a0 = channel.a0(), a1 = channel.a1(), a2 = channel.a2();
    const double a0sq = a0 * a0, a1sq = a1 * a1, a2sq = a2 * a2;
    return 3.0 * a0sq * a0sq * a0sq + 9.0 * a0sq * a0sq * a1sq +
           9.0 * std::min(a0sq * a0sq * a2sq, a1sq * a1sq * a0sq) +
           6.0 * a0sq * a1sq * a2sq;
}

double p_gctp4_min(double a0) {
    check_a0_domain(a0, "p_gctp4_min");
    const double a0sq = a0 * a0;
    return 6.0 * a0sq * a0sq + 9.0 * a0sq * a0sq * a0sq;
}

double p_gctp4_max(double a0) {
    check_a0_domain(a0, "p_gctp4_max");
    const double a0sq = a0 * a0;
    return 1.5 * a0sq + 6.0 * a0sq * a0sq - 4.5 * a0sq * a0sq * a0sq;
}

double p_pgctp(const ChannelCoeffs& channel, int segments) {
    if (segments < 1) throw ValidationError("p_pgctp: segments must be >= 1");
    return std::pow(p_gctp4(channel), segments);
}

ChannelCoeffs min_envelope_channel(double a0) {
    check_a0_domain(a0, "min_envelope_channel");
    double a2 = std::sqrt(std::max(0.0, 1.0 - 2.0 * a0 * a0));
    // At the boundary a2 can land an ulp below a0.
    a2 = std::max(a2, a0);
    return ChannelCoeffs(a0, a0, a2);
}

ChannelCoeffs max_envelope_channel(double a0) {
    check_a0_domain(a0, "max_envelope_channel");
    double a1 = std::sqrt(std::max(0.0, (1.0 - a0 * a0) / 2.0));
    a1 = std::max(a1, a0);
    return ChannelCoeffs(a0, a1, a1);
}

std::vector<SweepPoint> sweep(int n_segments, std::span<const double> a0_grid) {
    if (n_segments < 1) throw ValidationError("sweep: n_segments must be >= 1");
    std::vector<SweepPoint> points;
    points.reserve(a0_grid.size() * 2);
    for (double a0 : a0_grid) {
        check_a0_domain(a0, "sweep");
        const ChannelCoeffs ch_min = min_envelope_channel(a0);
        const double p_s = p_sctp(ch_min, 3 * n_segments);  // depends only on a0
        for (Envelope env : {Envelope::min, Envelope::max}) {
            const double base = env == Envelope::min ? p_gctp4_min(a0) : p_gctp4_max(a0);
            const double p_pg = std::pow(base, n_segments);
            std::optional<double> ratio;
            if (p_s > 0.0) ratio = p_pg / p_s;
            points.push_back({a0, env, n_segments, p_s, p_pg, ratio});
        }
    }
    return points;
}

}  // namespace qchain
