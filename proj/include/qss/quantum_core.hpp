#pragma once

// Dense n-qubit state vectors, GHZ preparation, projective sigma-x / sigma-y
// measurement, and the closed-form GHZ amplitude used as an independent
// reference for the dense path.
//
// Index convention: party 0 (Alice) is the most significant bit of the
// basis-state index, so index bits read i1 i2 ... in from left to right.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qss/errors.hpp"
#include "qss/random.hpp"

namespace qss {

using Amplitude = std::complex<double>;

enum class Basis : std::uint8_t { X, Y };

// 0 is the positive-axis eigenstate, 1 the negative-axis one.
enum class Outcome : std::uint8_t { Zero = 0, One = 1 };

using BasisVector = std::vector<Basis>;
using Outcomes = std::vector<Outcome>;

inline constexpr std::size_t kMinParties = 2;
inline constexpr std::size_t kMaxDenseParties = 16;
inline constexpr double kNormTolerance = 1e-12;
// Branches below this probability are never sampled.
inline constexpr double kBranchFloor = 1e-12;

constexpr unsigned to_bit(Outcome o) noexcept { return static_cast<unsigned>(o); }
constexpr Outcome outcome_from_bit(unsigned b) noexcept { return b & 1U ? Outcome::One : Outcome::Zero; }
constexpr Outcome operator^(Outcome a, Outcome b) noexcept { return outcome_from_bit(to_bit(a) ^ to_bit(b)); }

constexpr char to_char(Basis b) noexcept { return b == Basis::X ? 'x' : 'y'; }
constexpr char to_char(Outcome o) noexcept { return o == Outcome::Zero ? '0' : '1'; }

inline std::string to_string(std::span<const Basis> bases) {
    std::string s;
    s.reserve(bases.size());
    for (Basis b : bases) s.push_back(to_char(b));
    return s;
}

inline std::string to_string(std::span<const Outcome> outcomes) {
    std::string s;
    s.reserve(outcomes.size());
    for (Outcome o : outcomes) s.push_back(to_char(o));
    return s;
}

inline Basis parse_basis(char c) {
    switch (c) {
        case 'x': case 'X': return Basis::X;
        case 'y': case 'Y': return Basis::Y;
        default: throw InvalidInputError(std::string("invalid basis character '") + c + "'");
    }
}

inline BasisVector parse_bases(std::string_view s) {
    BasisVector out;
    out.reserve(s.size());
    for (char c : s) out.push_back(parse_basis(c));
    return out;
}

inline Outcomes parse_outcomes(std::string_view s) {
    Outcomes out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw InvalidInputError(std::string("invalid outcome character '") + c + "'");
        out.push_back(outcome_from_bit(c == '1'));
    }
    return out;
}

inline std::size_t y_count(std::span<const Basis> bases) noexcept {
    return static_cast<std::size_t>(std::count(bases.begin(), bases.end(), Basis::Y));
}

inline Outcome parity(std::span<const Outcome> outcomes) noexcept {
    unsigned p = 0;
    for (Outcome o : outcomes) p ^= to_bit(o);
    return outcome_from_bit(p);
}

// Packs outcomes into a basis-state index, party 0 in the most significant bit.
inline std::size_t outcomes_to_index(std::span<const Outcome> outcomes) noexcept {
    std::size_t idx = 0;
    for (Outcome o : outcomes) idx = (idx << 1) | to_bit(o);
    return idx;
}

inline Outcomes index_to_outcomes(std::size_t index, std::size_t n) {
    Outcomes out(n);
    for (std::size_t p = 0; p < n; ++p) out[p] = outcome_from_bit(static_cast<unsigned>(index >> (n - 1 - p)));
    return out;
}

// All 2^n basis vectors in index order (X = 0, Y = 1, party 0 most significant).
inline BasisVector basis_vector_from_index(std::size_t index, std::size_t n) {
    BasisVector out(n);
    for (std::size_t p = 0; p < n; ++p) out[p] = (index >> (n - 1 - p)) & 1U ? Basis::Y : Basis::X;
    return out;
}

// Computational-basis components of the sigma-x / sigma-y eigenvector |o>_b.
inline std::array<Amplitude, 2> eigenvector(Basis b, Outcome o) noexcept {
    const double h = 1.0 / std::sqrt(2.0);
    const double sign = o == Outcome::Zero ? 1.0 : -1.0;
    if (b == Basis::X) return {Amplitude{h, 0.0}, Amplitude{sign * h, 0.0}};
    return {Amplitude{h, 0.0}, Amplitude{0.0, sign * h}};
}

inline void check_party_count(std::size_t n, std::size_t max = kMaxDenseParties) {
    if (n < kMinParties || n > max) {
        throw BoundsError("party count " + std::to_string(n) + " outside [" + std::to_string(kMinParties) + ", " +
                          std::to_string(max) + "]");
    }
}

class StateVector {
public:
    StateVector(std::size_t n, std::vector<Amplitude> amps) : n_(n), amps_(std::move(amps)) {
        check_party_count(n_);
        if (amps_.size() != (std::size_t{1} << n_)) {
            throw InvalidInputError("state vector needs 2^n amplitudes");
        }
        for (const auto& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InvalidInputError("non-finite amplitude");
        }
        if (std::abs(norm_squared() - 1.0) > kNormTolerance) throw InvalidInputError("state vector is not normalized");
    }

    // |0...0>
    static StateVector zero(std::size_t n) {
        check_party_count(n);
        std::vector<Amplitude> amps(std::size_t{1} << n);
        amps[0] = 1.0;
        return {n, std::move(amps)};
    }

    std::size_t qubits() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_.at(i); }

    double norm_squared() const noexcept {
        return std::accumulate(amps_.begin(), amps_.end(), 0.0,
                               [](double acc, const Amplitude& a) { return acc + std::norm(a); });
    }

    // Bit mask of party p inside a basis-state index.
    std::size_t mask(std::size_t party) const {
        if (party >= n_) throw BoundsError("party index " + std::to_string(party) + " out of range");
        return std::size_t{1} << (n_ - 1 - party);
    }

private:
    std::size_t n_;
    std::vector<Amplitude> amps_;
};

inline StateVector make_ghz(std::size_t n) {
    check_party_count(n);
    std::vector<Amplitude> amps(std::size_t{1} << n);
    const double h = 1.0 / std::sqrt(2.0);
    amps.front() = h;
    amps.back() = h;
    return {n, std::move(amps)};
}

struct Measurement {
    Outcome outcome;
    StateVector state;
};

// Born probabilities of outcome 0 and 1 for one qubit, without collapsing.
inline std::array<double, 2> outcome_probabilities(const StateVector& state, std::size_t party, Basis basis) {
    const std::size_t m = state.mask(party);
    const auto amps = state.amplitudes();
    const auto e0 = eigenvector(basis, Outcome::Zero);
    const auto e1 = eigenvector(basis, Outcome::One);
    std::array<double, 2> p{0.0, 0.0};
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & m) continue;
        const Amplitude a0 = amps[i], a1 = amps[i | m];
        p[0] += std::norm(std::conj(e0[0]) * a0 + std::conj(e0[1]) * a1);
        p[1] += std::norm(std::conj(e1[0]) * a0 + std::conj(e1[1]) * a1);
    }
    return p;
}

// Projects the qubit onto |outcome>_basis and renormalizes.
inline StateVector project(const StateVector& state, std::size_t party, Basis basis, Outcome outcome) {
    const std::size_t m = state.mask(party);
    const auto amps = state.amplitudes();
    const auto e = eigenvector(basis, outcome);
    std::vector<Amplitude> out(amps.size());
    double prob = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & m) continue;
        const Amplitude c = std::conj(e[0]) * amps[i] + std::conj(e[1]) * amps[i | m];
        out[i] = c * e[0];
        out[i | m] = c * e[1];
        prob += std::norm(c);
    }
    if (prob < kBranchFloor) throw InvalidInputError("projection onto a zero-probability branch");
    const double scale = 1.0 / std::sqrt(prob);
    for (auto& a : out) a *= scale;
    return {state.qubits(), std::move(out)};
}

template <BitSource G>
Measurement measure_qubit(const StateVector& state, std::size_t party, Basis basis, G& gen) {
    const auto p = outcome_probabilities(state, party, basis);
    const double u = uniform01(gen);
    Outcome o;
    if (p[0] < kBranchFloor) {
        o = Outcome::One;
    } else if (p[1] < kBranchFloor) {
        o = Outcome::Zero;
    } else {
        o = u * (p[0] + p[1]) < p[0] ? Outcome::Zero : Outcome::One;
    }
    return {o, project(state, party, basis, o)};
}

// Measures every qubit, visiting parties in `order` (a permutation of 0..n-1).
template <BitSource G>
Outcomes measure_in_order(const StateVector& state, std::span<const Basis> bases, std::span<const std::size_t> order,
                          G& gen) {
    const std::size_t n = state.qubits();
    if (bases.size() != n) throw InvalidInputError("basis vector length must equal the qubit count");
    if (order.size() != n) throw InvalidInputError("measurement order must list every party");
    std::vector<bool> seen(n, false);
    for (std::size_t p : order) {
        if (p >= n || seen[p]) throw InvalidInputError("measurement order is not a permutation");
        seen[p] = true;
    }
    Outcomes out(n);
    StateVector current = state;
    for (std::size_t p : order) {
        auto m = measure_qubit(current, p, bases[p], gen);
        out[p] = m.outcome;
        current = std::move(m.state);
    }
    return out;
}

template <BitSource G>
Outcomes measure_all(const StateVector& state, std::span<const Basis> bases, G& gen) {
    std::vector<std::size_t> order(state.qubits());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return measure_in_order(state, bases, order, gen);
}

// Closed-form coefficient of |outcomes>_bases in the n-party GHZ state:
// 2^{-(n+1)/2} (1 + (-i)^m (-1)^p), m = number of Y bases, p = outcome parity.
// Does not touch a state vector.
inline Amplitude amplitude_in_bases(std::span<const Basis> bases, std::span<const Outcome> outcomes) {
    if (bases.size() != outcomes.size()) throw InvalidInputError("bases and outcomes differ in length");
    const std::size_t n = bases.size();
    if (n == 0) throw InvalidInputError("empty basis vector");
    static constexpr std::array<Amplitude, 4> minus_i_pow{Amplitude{1, 0}, Amplitude{0, -1}, Amplitude{-1, 0},
                                                          Amplitude{0, 1}};
    Amplitude phase = minus_i_pow[y_count(bases) % 4];
    if (parity(outcomes) == Outcome::One) phase = -phase;
    const double scale = std::pow(2.0, -(static_cast<double>(n) + 1.0) / 2.0);
    return scale * (Amplitude{1, 0} + phase);
}

// |amplitude_in_bases|^2 for all 2^n outcome tuples, indexed by outcomes_to_index.
inline std::vector<double> distribution_in_bases(std::span<const Basis> bases) {
    const std::size_t n = bases.size();
    check_party_count(n);
    std::vector<double> dist(std::size_t{1} << n);
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = std::norm(amplitude_in_bases(bases, index_to_outcomes(i, n)));
    return dist;
}

// Dense change of basis: entry k is <k_bases|state>, computed by applying the
// per-qubit eigenbasis transform to the full vector.
inline std::vector<Amplitude> expand_in_bases(const StateVector& state, std::span<const Basis> bases) {
    const std::size_t n = state.qubits();
    if (bases.size() != n) throw InvalidInputError("basis vector length must equal the qubit count");
    std::vector<Amplitude> v(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t m = state.mask(p);
        const auto e0 = eigenvector(bases[p], Outcome::Zero);
        const auto e1 = eigenvector(bases[p], Outcome::One);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i & m) continue;
            const Amplitude a0 = v[i], a1 = v[i | m];
            v[i] = std::conj(e0[0]) * a0 + std::conj(e0[1]) * a1;
            v[i | m] = std::conj(e1[0]) * a0 + std::conj(e1[1]) * a1;
        }
    }
    return v;
}

// Samples GHZ outcomes straight from the closed-form support, no state vector.
// Usable beyond the dense cap. Odd-Y rounds are uniform, even-Y rounds fix
// Alice's bit by the parity of the rest.
template <BitSource G>
Outcomes sample_in_bases(std::span<const Basis> bases, G& gen) {
    const std::size_t n = bases.size();
    if (n < kMinParties) throw BoundsError("party count below 2");
    Outcomes out(n);
    for (std::size_t p = 1; p < n; ++p) out[p] = outcome_from_bit(coin(gen));
    const std::size_t m = y_count(bases);
    if (m % 2 == 1) {
        out[0] = outcome_from_bit(coin(gen));
    } else {
        out[0] = parity(std::span<const Outcome>(out).subspan(1)) ^ outcome_from_bit(static_cast<unsigned>((m / 2) % 2));
    }
    return out;
}

}  // namespace qss
