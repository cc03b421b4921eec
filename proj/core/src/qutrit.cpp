#include "qchain/qutrit.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "qchain/rng.hpp"

namespace qchain {

namespace {

std::size_t pow3(int n) {
    std::size_t d = 1;
    for (int i = 0; i < n; ++i) d *= 3;
    return d;
}

void require_finite(const Amplitude& a, const char* what) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw ValidationError(std::string(what) + ": non-finite amplitude");
    }
}

}  // namespace

PureState::PureState(int n_qutrits, std::vector<Amplitude> amps)
    : n_qutrits_(n_qutrits), amps_(std::move(amps)) {
    if (n_qutrits_ < 1) {
        throw DimensionMismatch("PureState: need at least one qutrit");
    }
    if (amps_.size() != pow3(n_qutrits_)) {
        throw DimensionMismatch("PureState: amplitude count " + std::to_string(amps_.size()) +
                                " does not match 3^" + std::to_string(n_qutrits_));
    }
    for (const auto& a : amps_) require_finite(a, "PureState");
}

double PureState::norm_sq() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double PureState::norm() const { return std::sqrt(norm_sq()); }

PureState PureState::normalized() const {
    const double n = norm();
    if (n < 1e-12) throw ZeroVector("normalized: state norm below 1e-12");
    std::vector<Amplitude> out(amps_);
    for (auto& a : out) a /= n;
    return PureState(n_qutrits_, std::move(out));
}

ChannelCoeffs::ChannelCoeffs(double a0, double a1, double a2) : a0_(a0), a1_(a1), a2_(a2) {
    if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2)) {
        throw ValidationError("make_channel: non-finite coefficient");
    }
    if (a0 < 0.0 || a1 < 0.0 || a2 < 0.0) {
        throw Negative("make_channel: coefficients must be non-negative");
    }
    const double s = a0 * a0 + a1 * a1 + a2 * a2;
    if (std::abs(s - 1.0) > validation_tol) {
        throw NotNormalized("make_channel: a0^2+a1^2+a2^2 = " + std::to_string(s));
    }
    if (a0 > a1 + validation_tol || a1 > a2 + validation_tol) {
        throw NotOrdered("make_channel: require a0 <= a1 <= a2");
    }
}

QutritOperator::QutritOperator(const std::array<std::array<Amplitude, 3>, 3>& entries)
    : m_(entries) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) require_finite(m_[r][c], "QutritOperator");
}

QutritOperator QutritOperator::identity() {
    QutritOperator op;
    for (int i = 0; i < 3; ++i) op.m_[i][i] = 1.0;
    return op;
}

QutritOperator QutritOperator::diagonal(Amplitude d0, Amplitude d1, Amplitude d2) {
    QutritOperator op;
    op.m_[0][0] = d0;
    op.m_[1][1] = d1;
    op.m_[2][2] = d2;
    for (int i = 0; i < 3; ++i) require_finite(op.m_[i][i], "QutritOperator");
    return op;
}

QutritOperator QutritOperator::adjoint() const {
    QutritOperator out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out.m_[r][c] = std::conj(m_[c][r]);
    return out;
}

QutritOperator QutritOperator::operator*(const QutritOperator& rhs) const {
    QutritOperator out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            Amplitude s = 0.0;
            for (int k = 0; k < 3; ++k) s += m_[r][k] * rhs.m_[k][c];
            out.m_[r][c] = s;
        }
    return out;
}

double QutritOperator::max_abs_diff(const QutritOperator& rhs) const {
    double d = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) d = std::max(d, std::abs(m_[r][c] - rhs.m_[r][c]));
    return d;
}

double QutritOperator::unitarity_error() const {
    return (adjoint() * *this).max_abs_diff(identity());
}

PureState make_state(Amplitude alpha, Amplitude beta, Amplitude gamma) {
    PureState raw(1, {alpha, beta, gamma});
    if (raw.norm() < 1e-12) throw ZeroVector("make_state: all amplitudes are zero");
    return raw.normalized();
}

ChannelCoeffs make_channel(double a0, double a1, double a2) {
    return ChannelCoeffs(a0, a1, a2);
}

PureState channel_state(const ChannelCoeffs& channel) {
    std::vector<Amplitude> amps(9, 0.0);
    amps[0] = channel.a0();  // |00>
    amps[4] = channel.a1();  // |11>
    amps[8] = channel.a2();  // |22>
    return PureState(2, std::move(amps));
}

PureState tensor(const PureState& left, const PureState& right) {
    std::vector<Amplitude> out(left.dim() * right.dim());
    for (std::size_t i = 0; i < left.dim(); ++i)
        for (std::size_t j = 0; j < right.dim(); ++j)
            out[i * right.dim() + j] = left.amp(i) * right.amp(j);
    return PureState(left.n_qutrits() + right.n_qutrits(), std::move(out));
}

double fidelity(const PureState& s1, const PureState& s2) {
    if (s1.n_qutrits() != s2.n_qutrits()) {
        throw DimensionMismatch("fidelity: qutrit counts differ");
    }
    Amplitude inner = 0.0;
    for (std::size_t i = 0; i < s1.dim(); ++i) inner += std::conj(s1.amp(i)) * s2.amp(i);
    return std::norm(inner);
}

PureState haar_random_state(std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::vector<Amplitude> amps(3);
    for (auto& a : amps) {
        auto [re, im] = normal_pair(rng);
        a = Amplitude(re, im);
    }
    return PureState(1, std::move(amps)).normalized();
}

PureState apply_operator(const QutritOperator& op, const PureState& state, int target) {
    if (target < 0 || target >= state.n_qutrits()) {
        throw IndexOutOfRange("apply_operator: target qutrit " + std::to_string(target));
    }
    const std::size_t dim = state.dim();
    std::size_t stride = 1;
    for (int i = 0; i < state.n_qutrits() - 1 - target; ++i) stride *= 3;

    std::vector<Amplitude> out(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        const int t = static_cast<int>((i / stride) % 3);
        const std::size_t base = i - static_cast<std::size_t>(t) * stride;
        for (int r = 0; r < 3; ++r) {
            const Amplitude e = op(r, t);
            if (e != 0.0) out[base + static_cast<std::size_t>(r) * stride] += e * state.amp(i);
        }
    }
    return PureState(state.n_qutrits(), std::move(out));
}

}  // namespace qchain
