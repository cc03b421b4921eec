#pragma once

#include <array>
#include <compare>
#include <optional>

#include "qchain/measurement.hpp"
#include "qchain/qutrit.hpp"

namespace qchain {

// One of the ten equivalence classes a three-hop outcome triple (m1, m2, m3)
// collapses into. The class depends only on the multiset of family indices.
class CollapseClass {
  public:
    explicit CollapseClass(int index);
    int index() const { return index_; }
    auto operator<=>(const CollapseClass&) const = default;

  private:
    int index_;
};

// Selects between the two recovery-operator families for classes 7..9.
// The primed family applies when a0*a2 <= a1^2 (ties go primed; both
// families coincide there).
struct BranchSelector {
    bool primed;
};

// The correction-table unitary with subscripts (m, n), written out
// directly: entry [(c+m) mod 3][c] = exp(-2*pi*i*n*c/3).
QutritOperator correction_unitary(int m, int n);

// The unitary that actually canonicalizes the residual of outcome (m, n),
// i.e. maps it onto sum_j c_j a_{j+m} |j> with no residual phases. The table
// subscripts index the error pattern, not the correction, so the right
// operator is found once by exhaustive search over the table and its
// adjoints; the result is cached for the life of the process.
const QutritOperator& resolve_correction(GbmOutcome outcome);

// Recovery measurement applied after a single corrected hop of family f.
// E_S equalizes the pattern (a_{0+f}, a_{1+f}, a_{2+f}) down to a0.
// Throws DegenerateChannel when a0 = 0.
KrausPair single_step_recovery(const ChannelCoeffs& channel, int family);

BranchSelector recovery_branch(const ChannelCoeffs& channel);

// Recovery measurement for a collapse class after three corrected hops.
// Returns an empty optional for class 10, where the channel coefficients
// cancel and no recovery is needed. Throws DegenerateChannel when a0 = 0.
std::optional<KrausPair> gctp_recovery(const ChannelCoeffs& channel, CollapseClass cls);

CollapseClass classify_collapse(int m1, int m2, int m3);

// Per-component product of channel coefficients accumulated by a collapse
// class: component j of the post-hop state is the input amplitude times
// collapse_factors(...)[j].
std::array<double, 3> collapse_factors(const ChannelCoeffs& channel, CollapseClass cls);

}  // namespace qchain
