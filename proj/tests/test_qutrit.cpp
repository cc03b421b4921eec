#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "qchain/qutrit.hpp"
#include "qchain/rng.hpp"

using namespace qchain;

namespace {

using Matrix = std::vector<std::vector<Amplitude>>;

Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<Amplitude>(n));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

Matrix from_op(const QutritOperator& op) {
    Matrix m(3, std::vector<Amplitude>(3));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m[r][c] = op(r, c);
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ra = a.size(), ca = a[0].size();
    const std::size_t rb = b.size(), cb = b[0].size();
    Matrix m(ra * rb, std::vector<Amplitude>(ca * cb));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ca; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < cb; ++l)
                    m[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
    return m;
}

PureState matvec(const Matrix& m, const PureState& s) {
    std::vector<Amplitude> out(m.size());
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < m[r].size(); ++c) out[r] += m[r][c] * s.amp(c);
    return PureState(s.n_qutrits(), std::move(out));
}

PureState random_register(int n_qutrits, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::size_t dim = 1;
    for (int i = 0; i < n_qutrits; ++i) dim *= 3;
    std::vector<Amplitude> amps(dim);
    for (auto& a : amps) {
        const auto [x, y] = normal_pair(rng);
        a = {x, y};
    }
    return PureState(n_qutrits, std::move(amps)).normalized();
}

}  // namespace

TEST_CASE("state indexing follows the most-significant-trit convention") {
    const PureState one = make_state(0.0, 1.0, 0.0);
    CHECK(one.amp(1) == Amplitude{1.0, 0.0});

    // |1> tensor (a0|00> + a1|11> + a2|22>) puts weight at 9 + 3j + j.
    const ChannelCoeffs ch = make_channel(0.3, 0.4, std::sqrt(1 - 0.09 - 0.16));
    const PureState reg = tensor(one, channel_state(ch));
    CHECK(reg.n_qutrits() == 3);
    CHECK(reg.amp(9).real() == doctest::Approx(ch.a0()));
    CHECK(reg.amp(13).real() == doctest::Approx(ch.a1()));
    CHECK(reg.amp(17).real() == doctest::Approx(ch.a2()));
    double off = 0.0;
    for (std::size_t i = 0; i < 27; ++i) {
        if (i != 9 && i != 13 && i != 17) off += std::abs(reg.amp(i));
    }
    CHECK(off == 0.0);
}

TEST_CASE("make_state normalizes its input") {
    const PureState s = make_state({3.0, 0.0}, {0.0, 4.0}, 0.0);
    CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.amp(0).real() == doctest::Approx(0.6));
    CHECK(s.amp(1).imag() == doctest::Approx(0.8));
}

TEST_CASE("state construction rejects malformed input") {
    CHECK_THROWS_AS(PureState(1, {1.0, 0.0}), DimensionMismatch);
    CHECK_THROWS_AS(PureState(0, {1.0}), ValidationError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(PureState(1, {inf, 0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(make_state(0.0, 0.0, 0.0), ZeroVector);
}

TEST_CASE("channel validation rejects instead of repairing") {
    CHECK_THROWS_AS(make_channel(-0.1, 0.5, 0.6), Negative);
    CHECK_THROWS_AS(make_channel(0.5, 0.5, 0.5), NotNormalized);
    CHECK_THROWS_AS(make_channel(0.6, 0.5, std::sqrt(0.39)), NotOrdered);

    // Ordering violations within the validation tolerance are accepted.
    const double t = 0.57735026918962576;
    CHECK_NOTHROW(make_channel(t, t, t - 5e-10));
}

TEST_CASE("channel state is the diagonal two-qutrit embedding") {
    const ChannelCoeffs ch = make_channel(0.5, 0.6, std::sqrt(0.39));
    const PureState cs = channel_state(ch);
    CHECK(cs.n_qutrits() == 2);
    CHECK(cs.amp(0).real() == doctest::Approx(0.5));
    CHECK(cs.amp(4).real() == doctest::Approx(0.6));
    CHECK(cs.amp(8).real() == doctest::Approx(std::sqrt(0.39)));
    CHECK(cs.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fidelity is a squared overlap") {
    const PureState a = make_state(1.0, 0.0, 0.0);
    const PureState b = make_state(0.0, 1.0, 0.0);
    const PureState c = make_state(1.0, 1.0, 0.0);
    CHECK(fidelity(a, a) == doctest::Approx(1.0));
    CHECK(fidelity(a, b) == doctest::Approx(0.0));
    CHECK(fidelity(a, c) == doctest::Approx(0.5));

    // Global phase does not matter.
    const PureState d = make_state({0.0, 1.0}, 0.0, 0.0);
    CHECK(fidelity(a, d) == doctest::Approx(1.0));

    CHECK_THROWS_AS(fidelity(a, channel_state(make_channel(0.5, 0.6, std::sqrt(0.39)))),
                    DimensionMismatch);
}

TEST_CASE("haar_random_state is deterministic and uniform in the first moment") {
    const PureState s1 = haar_random_state(42);
    const PureState s2 = haar_random_state(42);
    CHECK(fidelity(s1, s2) == doctest::Approx(1.0));
    CHECK(s1.norm_sq() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(haar_random_state(42), haar_random_state(43)) < 0.9999);

    // E |<0|psi>|^2 = 1/3 for Haar-random qutrit states.
    double mean = 0.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
        mean += std::norm(haar_random_state(1000 + i).amp(0));
    }
    mean /= samples;
    CHECK(mean == doctest::Approx(1.0 / 3.0).epsilon(0.06));
}

TEST_CASE("apply_operator matches the dense Kronecker expansion") {
    const QutritOperator op({{{Amplitude{0.2, 0.1}, Amplitude{-0.5, 0.0}, Amplitude{0.0, 0.7}},
                              {Amplitude{0.0, -0.3}, Amplitude{0.4, 0.0}, Amplitude{0.1, 0.1}},
                              {Amplitude{0.6, 0.0}, Amplitude{0.0, 0.2}, Amplitude{-0.2, 0.5}}}});
    const PureState reg = random_register(3, 7);
    const Matrix o = from_op(op);
    const Matrix i3 = identity(3);

    const Matrix expanded[3] = {kron(kron(o, i3), i3), kron(kron(i3, o), i3),
                                kron(kron(i3, i3), o)};
    for (int target = 0; target < 3; ++target) {
        const PureState got = apply_operator(op, reg, target);
        const PureState want = matvec(expanded[target], reg);
        double dev = 0.0;
        for (std::size_t i = 0; i < got.dim(); ++i) {
            dev = std::max(dev, std::abs(got.amp(i) - want.amp(i)));
        }
        CHECK(dev < 1e-14);
    }

    CHECK_THROWS_AS(apply_operator(op, reg, 3), IndexOutOfRange);
    CHECK_THROWS_AS(apply_operator(op, reg, -1), IndexOutOfRange);
}

TEST_CASE("operator algebra behaves") {
    const QutritOperator id = QutritOperator::identity();
    CHECK(id.unitarity_error() < 1e-15);

    const QutritOperator d = QutritOperator::diagonal(1.0, {0.0, 1.0}, -1.0);
    CHECK(d.unitarity_error() < 1e-15);
    CHECK((d * d.adjoint()).max_abs_diff(id) < 1e-15);

    const QutritOperator half = QutritOperator::diagonal(0.5, 0.5, 0.5);
    CHECK(half.unitarity_error() == doctest::Approx(0.75));
}

TEST_CASE("normalized rejects the zero vector") {
    const PureState z(1, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(z.normalized(), ZeroVector);
}
