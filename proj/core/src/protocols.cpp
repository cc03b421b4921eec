#include "qchain/protocols.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace qchain {

namespace {

std::array<Amplitude, 3> to_array(const PureState& s) {
    return {s.amp(0), s.amp(1), s.amp(2)};
}

PureState single_qutrit_input(const PureState& state, const char* where) {
    if (state.n_qutrits() != 1) {
        throw DimensionMismatch(std::string(where) + ": input must be a single qutrit");
    }
    return state.normalized();
}

}  // namespace

ProtocolSpec ProtocolSpec::sctp(int steps) {
    if (steps < 1) throw ValidationError("ProtocolSpec: steps must be >= 1");
    return {ProtocolKind::sctp, steps, 1};
}

ProtocolSpec ProtocolSpec::gctp4() { return {ProtocolKind::gctp4, 3, 1}; }

ProtocolSpec ProtocolSpec::pgctp(int segments) {
    if (segments < 1) throw ValidationError("ProtocolSpec: segments must be >= 1");
    return {ProtocolKind::pgctp, 3, segments};
}

int ProtocolSpec::total_hops() const {
    switch (kind) {
        case ProtocolKind::sctp: return steps;
        case ProtocolKind::gctp4: return 3;
        default: return 3 * segments;
    }
}

void OutcomeHistory::push_token(std::uint8_t token) {
    if (len_ >= 32) throw TooManyHops("OutcomeHistory: event capacity exceeded");
    words_[len_ >> 4] |= static_cast<std::uint64_t>(token) << ((len_ & 15) * 4);
    ++len_;
}

void OutcomeHistory::push_family(int m) {
    if (m < 0 || m > 2) throw IndexOutOfRange("OutcomeHistory: family must lie in 0..2");
    push_token(static_cast<std::uint8_t>(1 + m));
}

void OutcomeHistory::push_outcome(GbmOutcome outcome) {
    push_token(static_cast<std::uint8_t>(4 + outcome.index()));
}

void OutcomeHistory::push_recovery(bool success) {
    push_token(success ? 13 : 14);
}

void OutcomeHistory::push_identity_pass() { push_token(15); }

std::vector<HistoryEvent> OutcomeHistory::events() const {
    std::vector<HistoryEvent> out;
    out.reserve(len_);
    for (int i = 0; i < len_; ++i) {
        const auto token =
            static_cast<std::uint8_t>((words_[i >> 4] >> ((i & 15) * 4)) & 0xF);
        if (token >= 1 && token <= 3) {
            out.push_back({EventKind::family, token - 1, -1});
        } else if (token >= 4 && token <= 12) {
            out.push_back({EventKind::outcome, (token - 4) / 3, (token - 4) % 3});
        } else if (token == 13) {
            out.push_back({EventKind::recovery_success});
        } else if (token == 14) {
            out.push_back({EventKind::recovery_failure});
        } else {
            out.push_back({EventKind::identity_pass});
        }
    }
    return out;
}

std::string OutcomeHistory::to_string() const {
    std::string s;
    for (const HistoryEvent& e : events()) {
        if (!s.empty()) s += '.';
        switch (e.kind) {
            case EventKind::family: s += static_cast<char>('0' + e.m); break;
            case EventKind::outcome:
                s += static_cast<char>('0' + e.m);
                s += static_cast<char>('0' + e.n);
                break;
            case EventKind::recovery_success: s += 'S'; break;
            case EventKind::recovery_failure: s += 'F'; break;
            case EventKind::identity_pass: s += 'P'; break;
        }
    }
    return s;
}

PureState OutcomeEntry::post_state() const {
    return PureState(1, {post_amps[0], post_amps[1], post_amps[2]});
}

OutcomeDistribution::OutcomeDistribution(ProtocolSpec spec, std::vector<OutcomeEntry> entries)
    : spec_(spec), entries_(std::move(entries)), total_probability_(0.0),
      total_success_probability_(0.0) {
    for (const OutcomeEntry& e : entries_) {
        total_probability_ += e.probability;
        if (e.success) total_success_probability_ += e.probability;
    }
}

std::pair<PureState, ClassicalMessage> teleport_hop(const PureState& state,
                                                    const ChannelCoeffs& channel, Rng& rng,
                                                    int hop_index) {
    if (state.n_qutrits() != 1) {
        throw DimensionMismatch("teleport_hop: input must be a single qutrit");
    }
    const PureState reg = tensor(state, channel_state(channel));
    const auto probs = gbm_probabilities(reg, {0, 1});
    const GbmOutcome outcome = sample_gbm_outcome(probs, rng);
    const MeasurementRecord rec = gbm_collapse(reg, {0, 1}, outcome);
    PureState corrected = apply_operator(resolve_correction(outcome), rec.post_state, 0);
    return {std::move(corrected), ClassicalMessage{hop_index, outcome}};
}

TrialResult run_sctp(const PureState& state, const ChannelCoeffs& channel, int steps,
                     Rng& rng) {
    if (steps < 1) throw ValidationError("run_sctp: steps must be >= 1");
    TrialResult res;
    PureState cur = single_qutrit_input(state, "run_sctp");
    for (int k = 0; k < steps; ++k) {
        auto hop = teleport_hop(cur, channel, rng, k);
        res.message_log.push_back(hop.second);
        cur = std::move(hop.first);
        if (channel.a0() == 0.0) return res;  // recovery impossible
        const KrausPair kp = single_step_recovery(channel, hop.second.outcome.m);
        MeasurementRecord rec = apply_generalized_measurement(cur, 0, kp, rng);
        if (!std::get<bool>(rec.outcome)) return res;
        cur = std::move(rec.post_state);
    }
    res.success = true;
    res.final_state = std::move(cur);
    return res;
}

namespace {

// One GCTP segment: three unitary-corrected hops, then the classified
// recovery. Returns false when the trial is lost.
bool gctp_segment(PureState& cur, const ChannelCoeffs& channel, Rng& rng, int hop_base,
                  TrialResult& res) {
    std::array<int, 3> ms{};
    for (int k = 0; k < 3; ++k) {
        auto hop = teleport_hop(cur, channel, rng, hop_base + k);
        res.message_log.push_back(hop.second);
        ms[k] = hop.second.outcome.m;
        cur = std::move(hop.first);
    }
    const CollapseClass cls = classify_collapse(ms[0], ms[1], ms[2]);
    res.segment_classes.push_back(cls);
    res.recovery_class = cls;
    if (cls.index() == 10) return true;
    if (channel.a0() == 0.0) return false;  // recovery impossible
    const std::optional<KrausPair> kp = gctp_recovery(channel, cls);
    MeasurementRecord rec = apply_generalized_measurement(cur, 0, *kp, rng);
    if (!std::get<bool>(rec.outcome)) return false;
    cur = std::move(rec.post_state);
    return true;
}

}  // namespace

TrialResult run_gctp4(const PureState& state, const ChannelCoeffs& channel, Rng& rng) {
    TrialResult res;
    PureState cur = single_qutrit_input(state, "run_gctp4");
    if (gctp_segment(cur, channel, rng, 0, res)) {
        res.success = true;
        res.final_state = std::move(cur);
    }
    return res;
}

TrialResult run_pgctp(const PureState& state, const ChannelCoeffs& channel, int segments,
                      Rng& rng) {
    if (segments < 1) throw ValidationError("run_pgctp: segments must be >= 1");
    TrialResult res;
    PureState cur = single_qutrit_input(state, "run_pgctp");
    for (int seg = 0; seg < segments; ++seg) {
        if (!gctp_segment(cur, channel, rng, 3 * seg, res)) return res;
    }
    res.success = true;
    res.final_state = std::move(cur);
    return res;
}

namespace {

using Amps = std::array<Amplitude, 3>;
using ContFn = std::function<void(const OutcomeHistory&, double, const Amps&)>;

/*
 * Exact expansion. In aggregated mode the three n-outcomes of a family are
 * one branch: the matched correction cancels the outcome phases, so all
 * three yield the same corrected state and each carries a third of the
 * family probability. Full mode keeps all nine outcomes per hop and exists
 * to verify exactly that.
 */
struct Expansion {
    const ChannelCoeffs& channel;
    bool full;
    std::vector<OutcomeEntry>& out;
    std::array<double, 3> a;
    PureState chan;

    Expansion(const ChannelCoeffs& ch, bool full_mode, std::vector<OutcomeEntry>& entries)
        : channel(ch), full(full_mode), out(entries),
          a{ch.a0(), ch.a1(), ch.a2()}, chan(channel_state(ch)) {}

    void leaf(const OutcomeHistory& h, double p, const Amps& amps, bool success) {
        out.push_back({h, p, amps, success});
    }

    template <class Cont>
    void hop(const OutcomeHistory& h, double w, const Amps& s, Cont&& cont) {
        if (full) {
            const PureState reg = tensor(PureState(1, {s[0], s[1], s[2]}), chan);
            const auto probs = gbm_probabilities(reg, {0, 1});
            for (int idx = 0; idx < 9; ++idx) {
                if (probs[idx] <= 1e-15) continue;
                const GbmOutcome outcome = gbm_outcome_from_index(idx);
                const MeasurementRecord rec = gbm_collapse(reg, {0, 1}, outcome);
                const PureState fixed =
                    apply_operator(resolve_correction(outcome), rec.post_state, 0);
                OutcomeHistory h2 = h;
                h2.push_outcome(outcome);
                cont(h2, w * probs[idx], to_array(fixed), outcome.m);
            }
            return;
        }
        for (int m = 0; m < 3; ++m) {
            double pm = 0.0;
            for (int j = 0; j < 3; ++j) pm += std::norm(s[j]) * a[(j + m) % 3] * a[(j + m) % 3];
            if (pm <= 0.0) continue;
            const double inv = 1.0 / std::sqrt(pm);
            Amps post;
            for (int j = 0; j < 3; ++j) post[j] = s[j] * a[(j + m) % 3] * inv;
            OutcomeHistory h2 = h;
            h2.push_family(m);
            cont(h2, w * pm, post, m);
        }
    }

    template <class Cont>
    void recovery(const OutcomeHistory& h, double w, const Amps& s, const KrausPair& kp,
                  Cont&& on_success) {
        const PureState st(1, {s[0], s[1], s[2]});
        const PureState sb = apply_operator(kp.e_success, st, 0);
        const PureState fb = apply_operator(kp.e_failure, st, 0);
        const double ps = sb.norm_sq();
        const double pf = fb.norm_sq();
        if (pf > 0.0) {
            OutcomeHistory h2 = h;
            h2.push_recovery(false);
            leaf(h2, w * pf, to_array(fb.normalized()), false);
        }
        if (ps > 0.0) {
            OutcomeHistory h2 = h;
            h2.push_recovery(true);
            on_success(h2, w * ps, to_array(sb.normalized()));
        }
    }
};

}  // namespace

OutcomeDistribution enumerate(const ProtocolSpec& spec, const PureState& state,
                              const ChannelCoeffs& channel,
                              const EnumerateOptions& options) {
    const PureState input = single_qutrit_input(state, "enumerate");
    const int hops = spec.total_hops();
    if (hops > options.max_hops) {
        throw TooManyHops("enumerate: " + std::to_string(hops) + " hops exceed the bound of " +
                          std::to_string(options.max_hops));
    }

    std::vector<OutcomeEntry> entries;
    Expansion exp(channel, options.full_outcomes, entries);
    const Amps start = {input.amp(0), input.amp(1), input.amp(2)};

    if (spec.kind == ProtocolKind::sctp) {
        std::function<void(const OutcomeHistory&, double, const Amps&, int)> step =
            [&](const OutcomeHistory& h, double w, const Amps& s, int k) {
                if (k == spec.steps) {
                    exp.leaf(h, w, s, true);
                    return;
                }
                exp.hop(h, w, s,
                        [&](const OutcomeHistory& h2, double w2, const Amps& s2, int family) {
                            if (channel.a0() == 0.0) {
                                OutcomeHistory h3 = h2;
                                h3.push_recovery(false);
                                exp.leaf(h3, w2, s2, false);
                                return;
                            }
                            const KrausPair kp = single_step_recovery(channel, family);
                            exp.recovery(h2, w2, s2, kp,
                                         [&](const OutcomeHistory& h3, double w3,
                                             const Amps& s3) { step(h3, w3, s3, k + 1); });
                        });
            };
        step({}, 1.0, start, 0);
        return OutcomeDistribution(spec, std::move(entries));
    }

    // Shared GCTP segment expansion; `cont` receives surviving branches.
    std::function<void(const OutcomeHistory&, double, const Amps&, std::array<int, 3>, int,
                       const ContFn&)>
        block = [&](const OutcomeHistory& h, double w, const Amps& s, std::array<int, 3> ms,
                    int hop_i, const ContFn& cont) {
            if (hop_i == 3) {
                const CollapseClass cls = classify_collapse(ms[0], ms[1], ms[2]);
                if (cls.index() == 10) {
                    OutcomeHistory h2 = h;
                    h2.push_identity_pass();
                    cont(h2, w, s);
                    return;
                }
                if (channel.a0() == 0.0) {
                    OutcomeHistory h2 = h;
                    h2.push_recovery(false);
                    exp.leaf(h2, w, s, false);
                    return;
                }
                const std::optional<KrausPair> kp = gctp_recovery(channel, cls);
                exp.recovery(h, w, s, *kp, cont);
                return;
            }
            exp.hop(h, w, s,
                    [&](const OutcomeHistory& h2, double w2, const Amps& s2, int family) {
                        std::array<int, 3> ms2 = ms;
                        ms2[hop_i] = family;
                        block(h2, w2, s2, ms2, hop_i + 1, cont);
                    });
        };

    const ContFn success_leaf = [&](const OutcomeHistory& h, double w, const Amps& s) {
        exp.leaf(h, w, s, true);
    };

    if (spec.kind == ProtocolKind::gctp4) {
        block({}, 1.0, start, {}, 0, success_leaf);
        return OutcomeDistribution(spec, std::move(entries));
    }

    std::function<void(const OutcomeHistory&, double, const Amps&, int)> segment =
        [&](const OutcomeHistory& h, double w, const Amps& s, int seg) {
            if (seg == spec.segments) {
                exp.leaf(h, w, s, true);
                return;
            }
            block(h, w, s, {}, 0,
                  [&](const OutcomeHistory& h2, double w2, const Amps& s2) {
                      segment(h2, w2, s2, seg + 1);
                  });
        };
    segment({}, 1.0, start, 0);
    return OutcomeDistribution(spec, std::move(entries));
}

std::array<double, 10> class_probabilities(const OutcomeDistribution& dist) {
    const ProtocolSpec& spec = dist.spec();
    const bool single_segment =
        spec.kind == ProtocolKind::gctp4 ||
        (spec.kind == ProtocolKind::pgctp && spec.segments == 1);
    if (!single_segment) {
        throw ValidationError("class_probabilities: distribution is not a single GCTP segment");
    }
    std::array<double, 10> acc{};
    for (const OutcomeEntry& e : dist.entries()) {
        std::array<int, 3> ms{};
        int found = 0;
        for (const HistoryEvent& ev : e.history.events()) {
            if (ev.kind == EventKind::family || ev.kind == EventKind::outcome) {
                ms[found++] = ev.m;
                if (found == 3) break;
            }
        }
        acc[classify_collapse(ms[0], ms[1], ms[2]).index() - 1] += e.probability;
    }
    return acc;
}

}  // namespace qchain
