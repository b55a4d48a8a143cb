#pragma once

// Intercept-resend eavesdroppers acting on the transit qubits (parties 2..n)
// and their closed-form error-rate predictions.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qss/errors.hpp"
#include "qss/protocol_rules.hpp"
#include "qss/quantum_core.hpp"
#include "qss/random.hpp"

namespace qss {

enum class EveKind : std::uint8_t { SinglePartyRandomBasis, AllPartiesRandomBasis, AllPartiesXOnly };

inline std::string to_string(EveKind k) {
    switch (k) {
        case EveKind::SinglePartyRandomBasis: return "single-random";
        case EveKind::AllPartiesRandomBasis: return "all-random";
        case EveKind::AllPartiesXOnly: return "all-x";
    }
    return "?";
}

inline EveKind parse_eve_kind(const std::string& s) {
    if (s == "single-random") return EveKind::SinglePartyRandomBasis;
    if (s == "all-random") return EveKind::AllPartiesRandomBasis;
    if (s == "all-x") return EveKind::AllPartiesXOnly;
    throw ConfigError("unknown eavesdropper model '" + s + "'");
}

struct EveModel {
    EveKind kind = EveKind::AllPartiesRandomBasis;
    // 1-based party number in [2, n]; SinglePartyRandomBasis only.
    std::optional<std::size_t> target_party;

    static EveModel single(std::size_t target) { return {EveKind::SinglePartyRandomBasis, target}; }
    static EveModel all_random() { return {EveKind::AllPartiesRandomBasis, std::nullopt}; }
    static EveModel all_x() { return {EveKind::AllPartiesXOnly, std::nullopt}; }

    void validate(std::size_t n) const {
        const bool single = kind == EveKind::SinglePartyRandomBasis;
        if (target_party.has_value() != single) {
            throw ConfigError("target_party must be set exactly for the single-party eavesdropper");
        }
        if (single && (*target_party < 2 || *target_party > n)) {
            throw ConfigError("target_party " + std::to_string(*target_party) + " is not a transit qubit of an " +
                              std::to_string(n) + "-party session");
        }
    }

    // 0-based indices of the intercepted qubits.
    std::vector<std::size_t> targets(std::size_t n) const {
        validate(n);
        if (kind == EveKind::SinglePartyRandomBasis) return {*target_party - 1};
        std::vector<std::size_t> t;
        for (std::size_t p = 1; p < n; ++p) t.push_back(p);
        return t;
    }

    friend bool operator==(const EveModel&, const EveModel&) = default;
};

struct EveObservation {
    std::size_t party;  // 0-based
    Basis basis;
    Outcome outcome;
};

using EveRecord = std::vector<EveObservation>;

struct Interception {
    StateVector state;
    EveRecord record;
};

// Measures each targeted qubit in Eve's basis; the collapsed state is what she resends.
template <BitSource G>
Interception intercept(const StateVector& state, const EveModel& model, G& gen) {
    const std::size_t n = state.qubits();
    Interception out{state, {}};
    for (std::size_t p : model.targets(n)) {
        const Basis b = model.kind == EveKind::AllPartiesXOnly ? Basis::X : (coin(gen) ? Basis::Y : Basis::X);
        auto m = measure_qubit(out.state, p, b, gen);
        out.record.push_back({p, b, m.outcome});
        out.state = std::move(m.state);
    }
    return out;
}

// Eve's guess of Alice's bit from her own outcomes and the public class.
// Empty unless she holds every transit qubit.
inline std::optional<Outcome> eve_reconstruct(const EveRecord& record, std::size_t n, RoundClass round_class) {
    if (!is_valid(round_class) || record.size() != n - 1) return std::nullopt;
    Outcomes outs;
    outs.reserve(record.size());
    for (const auto& obs : record) outs.push_back(obs.outcome);
    return reconstruct_secret_bit(outs, round_class);
}

// Unconditional error rate on sifted rounds with uniformly random participant
// bases. For AllPartiesXOnly this is the rate on check rounds where two parties
// chose Y (all-X rounds show none).
inline double predict_error_rate(std::size_t n, const EveModel& model) {
    if (n < kMinParties) throw BoundsError("party count below 2");
    switch (model.kind) {
        case EveKind::AllPartiesRandomBasis:
            return (1.0 - std::ldexp(1.0, -static_cast<int>(n - 1))) / 2.0;
        case EveKind::SinglePartyRandomBasis:
            return 0.25;
        case EveKind::AllPartiesXOnly:
            return 0.5;
    }
    return 0.0;
}

// Error rate conditioned on the round's basis vector: one half times the chance
// that Eve's basis differs from a targeted participant's.
inline double predict_error_rate_for_bases(std::span<const Basis> bases, const EveModel& model) {
    const std::size_t n = bases.size();
    const auto targets = model.targets(n);
    if (model.kind == EveKind::AllPartiesXOnly) {
        for (std::size_t p : targets) {
            if (bases[p] == Basis::Y) return 0.5;
        }
        return 0.0;
    }
    return (1.0 - std::ldexp(1.0, -static_cast<int>(targets.size()))) / 2.0;
}

}  // namespace qss
