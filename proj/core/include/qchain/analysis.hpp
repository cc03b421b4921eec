#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qchain/qutrit.hpp"

namespace qchain {

enum class Envelope { min, max };

struct SweepPoint {
    double a0;
    Envelope envelope;
    int n_segments;
    double p_s;
    double p_pg;
    // p_pg / p_s; absent when p_s = 0.
    std::optional<double> ratio;
};

// Success probability of one hop followed by its recovery: 3*a0^2.
double p_single(const ChannelCoeffs& channel);

// Hop-by-hop chain over `steps` hops: (3*a0^2)^steps.
double p_sctp(const ChannelCoeffs& channel, int steps);

// Four-party chain (three hops, one classified recovery):
// 3*a0^6 + 9*a0^4*a1^2 + 9*min(a0^4*a2^2, a1^4*a0^2) + 6*a0^2*a1^2*a2^2.
double p_gctp4(const ChannelCoeffs& channel);

// Envelope values of p_gctp4 over all channels with the given a0,
// defined for 0 < a0 <= 1/sqrt(3).
double p_gctp4_min(double a0);  // attained at a1 = a0
double p_gctp4_max(double a0);  // attained at a1 = a2

// Chain of GCTP segments: p_gctp4^segments.
double p_pgctp(const ChannelCoeffs& channel, int segments);

// Channels realizing the envelopes. Coefficients at the a0 = 1/sqrt(3)
// boundary are nudged by at most a few ulps so they pass validation.
ChannelCoeffs min_envelope_channel(double a0);
ChannelCoeffs max_envelope_channel(double a0);

// Both envelope rows for every grid value; the grid must lie in
// (0, 1/sqrt(3)].
std::vector<SweepPoint> sweep(int n_segments, std::span<const double> a0_grid);

}  // namespace qchain
