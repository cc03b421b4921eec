#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "qchain/errors.hpp"

namespace qchain {

using Amplitude = std::complex<double>;

// Tolerance for algebraic identities (orthonormality, completeness, unitarity).
inline constexpr double algebra_tol = 1e-12;
// Tolerance applied when validating user-supplied values.
inline constexpr double validation_tol = 1e-9;

/*
 * Register convention: a register of n qutrits is a flat row-major vector of
 * 3^n amplitudes, with qutrit 0 as the most significant trit. The basis state
 * |t0 t1 ... t_{n-1}> lives at index sum_i t_i * 3^(n-1-i).
 */
class PureState {
  public:
    PureState(int n_qutrits, std::vector<Amplitude> amps);

    int n_qutrits() const { return n_qutrits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Amplitude>& amps() const { return amps_; }
    Amplitude amp(std::size_t i) const { return amps_[i]; }

    double norm_sq() const;
    double norm() const;
    // Throws ZeroVector if the norm is below 1e-12.
    PureState normalized() const;

  private:
    int n_qutrits_;
    std::vector<Amplitude> amps_;
};

// Schmidt coefficients of a two-qutrit channel a0|00> + a1|11> + a2|22>.
// Valid coefficients satisfy 0 <= a0 <= a1 <= a2 and a0^2+a1^2+a2^2 = 1;
// construction rejects anything else instead of repairing it.
class ChannelCoeffs {
  public:
    ChannelCoeffs(double a0, double a1, double a2);

    double a0() const { return a0_; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }

  private:
    double a0_, a1_, a2_;
};

class QutritOperator {
  public:
    // Zero operator.
    QutritOperator() : m_{} {}
    explicit QutritOperator(const std::array<std::array<Amplitude, 3>, 3>& entries);

    static QutritOperator identity();
    static QutritOperator diagonal(Amplitude d0, Amplitude d1, Amplitude d2);

    Amplitude operator()(int row, int col) const { return m_[row][col]; }
    Amplitude& at(int row, int col) { return m_[row][col]; }

    QutritOperator adjoint() const;
    QutritOperator operator*(const QutritOperator& rhs) const;

    // Largest entrywise deviation from another operator.
    double max_abs_diff(const QutritOperator& rhs) const;
    // Largest entrywise deviation of A^dagger * A from the identity.
    double unitarity_error() const;

  private:
    std::array<std::array<Amplitude, 3>, 3> m_;
};

// Normalizes (alpha, beta, gamma) into a single-qutrit state.
PureState make_state(Amplitude alpha, Amplitude beta, Amplitude gamma);

// Validates channel coefficients; see ChannelCoeffs.
ChannelCoeffs make_channel(double a0, double a1, double a2);

// The channel written out as the two-qutrit state a0|00> + a1|11> + a2|22>.
PureState channel_state(const ChannelCoeffs& channel);

// Kronecker product; qutrits of `left` become the most significant trits.
PureState tensor(const PureState& left, const PureState& right);

// |<s1|s2>|^2. Both states must have the same qutrit count.
double fidelity(const PureState& s1, const PureState& s2);

// Haar-random single-qutrit state, deterministic for a fixed seed.
PureState haar_random_state(std::uint64_t seed);

// Applies a one-qutrit operator to the given trit position of a register.
// No normalization is performed, so non-unitary operators yield
// sub-normalized results.
PureState apply_operator(const QutritOperator& op, const PureState& state, int target);

}  // namespace qchain
