#pragma once

#include <array>
#include <compare>
#include <utility>
#include <variant>
#include <vector>

#include "qchain/qutrit.hpp"
#include "qchain/rng.hpp"

namespace qchain {

// One of the nine generalized Bell-basis outcomes on a qutrit pair.
struct GbmOutcome {
    int m = 0;
    int n = 0;

    int index() const { return m * 3 + n; }
    auto operator<=>(const GbmOutcome&) const = default;
};

GbmOutcome gbm_outcome_from_index(int index);

// Two-outcome generalized measurement {E_S, E_F} on a single qutrit.
// A usable pair satisfies E_S^dagger E_S + E_F^dagger E_F = I.
struct KrausPair {
    QutritOperator e_success;
    QutritOperator e_failure;

    // Largest entrywise deviation of the completeness sum from the identity.
    double completeness_error() const;
};

// Either a Bell-basis outcome or the success flag of a Kraus measurement.
using MeasurementOutcome = std::variant<GbmOutcome, bool>;

struct MeasurementRecord {
    MeasurementOutcome outcome;
    double probability;
    PureState post_state;
};

// The nine basis states |Phi_mn> = 3^{-1/2} sum_j exp(2*pi*i*j*n/3) |j>|j+m mod 3>,
// returned in lexicographic (m, n) order.
std::vector<std::pair<GbmOutcome, PureState>> gbm_basis();

// Probability of each Bell-basis outcome when measuring the ordered qutrit
// pair (first, second) of a register. Indexed by GbmOutcome::index().
std::array<double, 9> gbm_probabilities(const PureState& reg, std::pair<int, int> pair);

// Projects the pair onto one outcome; the post state is the normalized
// residual register with the measured pair removed. Outcomes with
// probability <= 1e-15 cannot be collapsed onto.
MeasurementRecord gbm_collapse(const PureState& reg, std::pair<int, int> pair,
                               GbmOutcome outcome);

// Applies {E_S, E_F} to one qutrit of a register and samples the branch.
// Throws IncompleteKraus if the completeness sum deviates from the identity
// by more than 1e-9.
MeasurementRecord apply_generalized_measurement(const PureState& state, int target,
                                                const KrausPair& kraus, Rng& rng);

// Inverse-CDF draw over the nine outcomes in lexicographic order.
// Zero-probability outcomes are never selected.
GbmOutcome sample_gbm_outcome(const std::array<double, 9>& probs, Rng& rng);

}  // namespace qchain
