#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qchain/corrections.hpp"
#include "qchain/measurement.hpp"
#include "qchain/qutrit.hpp"
#include "qchain/rng.hpp"

namespace qchain {

enum class ProtocolKind { sctp, gctp4, pgctp };

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::sctp;
    int steps = 1;     // hops, SCTP only
    int segments = 1;  // four-party segments, PGCTP only

    static ProtocolSpec sctp(int steps);
    static ProtocolSpec gctp4();
    static ProtocolSpec pgctp(int segments);

    int total_hops() const;
};

// One hop's worth of classical side information: which Bell-basis outcome
// the sender observed.
struct ClassicalMessage {
    int hop_index;
    GbmOutcome outcome;
};

struct TrialResult {
    bool success = false;
    std::optional<PureState> final_state;
    std::vector<ClassicalMessage> message_log;
    // Class of the last classified segment (GCTP/PGCTP only).
    std::optional<CollapseClass> recovery_class;
    // Class of every segment reached, in order (GCTP/PGCTP only).
    std::vector<CollapseClass> segment_classes;
    // Filled by the exact backend only.
    std::optional<double> probability_weight;
};

enum class EventKind : std::uint8_t {
    family,            // aggregated hop outcome: family index m
    outcome,           // full hop outcome: (m, n)
    recovery_success,
    recovery_failure,
    identity_pass,     // class 10: coefficients cancel, no recovery needed
};

struct HistoryEvent {
    EventKind kind;
    int m = -1;
    int n = -1;
};

// Compact classical history of one enumeration branch (4 bits per event,
// at most 32 events).
class OutcomeHistory {
  public:
    void push_family(int m);
    void push_outcome(GbmOutcome outcome);
    void push_recovery(bool success);
    void push_identity_pass();

    int size() const { return len_; }
    std::vector<HistoryEvent> events() const;
    std::string to_string() const;

    bool operator==(const OutcomeHistory&) const = default;

  private:
    void push_token(std::uint8_t token);

    std::array<std::uint64_t, 2> words_{};
    std::uint8_t len_ = 0;
};

struct OutcomeEntry {
    OutcomeHistory history;
    double probability;
    std::array<Amplitude, 3> post_amps;
    bool success;

    PureState post_state() const;
};

struct EnumerateOptions {
    // Expand all nine (m, n) outcomes per hop instead of the three family
    // branches. Exact aggregation over n is valid because the matched
    // correction cancels the outcome phases; the full mode exists to verify
    // that cancellation.
    bool full_outcomes = false;
    int max_hops = 15;
};

// Exact outcome-tree expansion of a protocol: every classical history with
// its probability and post state.
class OutcomeDistribution {
  public:
    OutcomeDistribution(ProtocolSpec spec, std::vector<OutcomeEntry> entries);

    const ProtocolSpec& spec() const { return spec_; }
    const std::vector<OutcomeEntry>& entries() const { return entries_; }
    double total_probability() const { return total_probability_; }
    double total_success_probability() const { return total_success_probability_; }

  private:
    ProtocolSpec spec_;
    std::vector<OutcomeEntry> entries_;
    double total_probability_;
    double total_success_probability_;
};

// One teleportation hop: forms state (x) channel, measures the first two
// qutrits in the Bell basis, applies the matched correction to the residual.
// Returns the corrected single-qutrit state and the classical message.
std::pair<PureState, ClassicalMessage> teleport_hop(const PureState& state,
                                                    const ChannelCoeffs& channel, Rng& rng,
                                                    int hop_index = 0);

// Hop-by-hop chain: each hop is followed by a recovery attempt; any failure
// aborts the trial.
TrialResult run_sctp(const PureState& state, const ChannelCoeffs& channel, int steps,
                     Rng& rng);

// Three unitary-corrected hops, one classified recovery at the end.
TrialResult run_gctp4(const PureState& state, const ChannelCoeffs& channel, Rng& rng);

// Chain of GCTP segments (3 hops each); all segments must succeed.
TrialResult run_pgctp(const PureState& state, const ChannelCoeffs& channel, int segments,
                      Rng& rng);

OutcomeDistribution enumerate(const ProtocolSpec& spec, const PureState& state,
                              const ChannelCoeffs& channel,
                              const EnumerateOptions& options = {});

// Collapse-class probabilities (pre-recovery) aggregated from a GCTP4
// distribution; index i holds class i+1.
std::array<double, 10> class_probabilities(const OutcomeDistribution& dist);

}  // namespace qchain
