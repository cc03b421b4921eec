#include "qchain/measurement.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace qchain {

namespace {

constexpr double inv_sqrt3 = 0.57735026918962576;

Amplitude omega_pow(int k) {
    // exp(2*pi*i*k/3)
    const double t = 2.0 * std::numbers::pi * static_cast<double>(((k % 3) + 3) % 3) / 3.0;
    return {std::cos(t), std::sin(t)};
}

void check_pair(const PureState& reg, std::pair<int, int> pair) {
    const auto [qa, qb] = pair;
    if (qa == qb) throw DuplicateIndex("gbm: measured qutrits must be distinct");
    if (qa < 0 || qb < 0 || qa >= reg.n_qutrits() || qb >= reg.n_qutrits()) {
        throw IndexOutOfRange("gbm: qutrit index out of range");
    }
}

void check_outcome(GbmOutcome outcome) {
    if (outcome.m < 0 || outcome.m > 2 || outcome.n < 0 || outcome.n > 2) {
        throw IndexOutOfRange("gbm: outcome indices must lie in 0..2");
    }
}

/*
 * Contracts <Phi_mn| against the measured pair. The residual amplitude for a
 * basis state r of the remaining qutrits is
 *   3^{-1/2} sum_j exp(-2*pi*i*j*n/3) * amp(qa=j, qb=j+m, rest=r).
 * Residual qutrits keep their original relative order.
 */
std::vector<Amplitude> residual_amplitudes(const PureState& reg, std::pair<int, int> pair,
                                           GbmOutcome outcome) {
    const auto [qa, qb] = pair;
    const int n = reg.n_qutrits();
    std::vector<std::size_t> stride(n);
    std::size_t s = 1;
    for (int q = n - 1; q >= 0; --q) {
        stride[q] = s;
        s *= 3;
    }

    std::size_t res_dim = 1;
    for (int q = 0; q < n - 2; ++q) res_dim *= 3;

    std::vector<int> rest;
    for (int q = 0; q < n; ++q)
        if (q != qa && q != qb) rest.push_back(q);

    std::vector<Amplitude> out(res_dim, 0.0);
    for (std::size_t r = 0; r < res_dim; ++r) {
        std::size_t base = 0;
        std::size_t rr = r;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
            base += (rr % 3) * stride[rest[k]];
            rr /= 3;
        }
        Amplitude acc = 0.0;
        for (int j = 0; j < 3; ++j) {
            const std::size_t idx =
                base + static_cast<std::size_t>(j) * stride[qa] +
                static_cast<std::size_t>((j + outcome.m) % 3) * stride[qb];
            acc += std::conj(omega_pow(j * outcome.n)) * reg.amp(idx);
        }
        out[r] = acc * inv_sqrt3;
    }
    return out;
}

double norm_sq_of(const std::vector<Amplitude>& v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

}  // namespace

GbmOutcome gbm_outcome_from_index(int index) {
    if (index < 0 || index > 8) throw IndexOutOfRange("gbm outcome index must lie in 0..8");
    return {index / 3, index % 3};
}

double KrausPair::completeness_error() const {
    const QutritOperator sum =
        e_success.adjoint() * e_success;
    const QutritOperator sum2 = e_failure.adjoint() * e_failure;
    QutritOperator total;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) total.at(r, c) = sum(r, c) + sum2(r, c);
    return total.max_abs_diff(QutritOperator::identity());
}

std::vector<std::pair<GbmOutcome, PureState>> gbm_basis() {
    std::vector<std::pair<GbmOutcome, PureState>> basis;
    basis.reserve(9);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            std::vector<Amplitude> amps(9, 0.0);
            for (int j = 0; j < 3; ++j) {
                amps[static_cast<std::size_t>(j * 3 + (j + m) % 3)] =
                    omega_pow(j * n) * inv_sqrt3;
            }
            basis.emplace_back(GbmOutcome{m, n}, PureState(2, std::move(amps)));
        }
    return basis;
}

std::array<double, 9> gbm_probabilities(const PureState& reg, std::pair<int, int> pair) {
    check_pair(reg, pair);
    std::array<double, 9> probs{};
    for (int idx = 0; idx < 9; ++idx) {
        probs[idx] = norm_sq_of(residual_amplitudes(reg, pair, gbm_outcome_from_index(idx)));
    }
    return probs;
}

MeasurementRecord gbm_collapse(const PureState& reg, std::pair<int, int> pair,
                               GbmOutcome outcome) {
    check_pair(reg, pair);
    check_outcome(outcome);
    std::vector<Amplitude> res = residual_amplitudes(reg, pair, outcome);
    const double p = norm_sq_of(res);
    if (p <= 1e-15) {
        throw ZeroProbabilityOutcome("gbm_collapse: outcome (" + std::to_string(outcome.m) +
                                     "," + std::to_string(outcome.n) +
                                     ") has vanishing probability");
    }
    const double inv = 1.0 / std::sqrt(p);
    for (auto& a : res) a *= inv;
    return {outcome, p, PureState(reg.n_qutrits() - 2, std::move(res))};
}

MeasurementRecord apply_generalized_measurement(const PureState& state, int target,
                                                const KrausPair& kraus, Rng& rng) {
    if (kraus.completeness_error() > validation_tol) {
        throw IncompleteKraus("apply_generalized_measurement: E_S^tE_S + E_F^tE_F != I");
    }
    const PureState s_branch = apply_operator(kraus.e_success, state, target);
    double p_success = s_branch.norm_sq();
    if (p_success > 1.0) p_success = 1.0;

    const bool success = uniform_unit(rng) < p_success;
    if (success) {
        return {true, p_success, s_branch.normalized()};
    }
    const PureState f_branch = apply_operator(kraus.e_failure, state, target);
    return {false, 1.0 - p_success, f_branch.normalized()};
}

GbmOutcome sample_gbm_outcome(const std::array<double, 9>& probs, Rng& rng) {
    const double u = uniform_unit(rng);
    double cum = 0.0;
    int last_positive = -1;
    for (int idx = 0; idx < 9; ++idx) {
        if (probs[idx] <= 0.0) continue;
        last_positive = idx;
        cum += probs[idx];
        if (u < cum) return gbm_outcome_from_index(idx);
    }
    if (last_positive < 0) {
        throw ZeroProbabilityOutcome("sample_gbm_outcome: all outcomes have zero probability");
    }
    return gbm_outcome_from_index(last_positive);
}

}  // namespace qchain
