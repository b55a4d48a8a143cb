#pragma once

// Basis-selection strategies: symmetric random choice, the favored (mostly X)
// choice, and the control-key driven choice whose keys are bootstrapped from a
// symmetric run.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qss/errors.hpp"
#include "qss/protocol_rules.hpp"
#include "qss/quantum_core.hpp"
#include "qss/random.hpp"

namespace qss {

enum class SchemeKind : std::uint8_t { Symmetric, Favored, Encrypted };

inline constexpr double kDefaultEpsilon = 0.05;
inline constexpr std::size_t kDefaultKeyLength = 1000;

inline std::string to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::Symmetric: return "symmetric";
        case SchemeKind::Favored: return "favored";
        case SchemeKind::Encrypted: return "encrypted";
    }
    return "?";
}

inline SchemeKind parse_scheme_kind(const std::string& s) {
    if (s == "symmetric") return SchemeKind::Symmetric;
    if (s == "favored") return SchemeKind::Favored;
    if (s == "encrypted") return SchemeKind::Encrypted;
    throw ConfigError("unknown scheme '" + s + "'");
}

struct SchemeConfig {
    SchemeKind kind = SchemeKind::Symmetric;
    std::optional<double> epsilon;          // Favored only: probability of Y
    std::optional<std::size_t> key_length;  // Encrypted only

    static SchemeConfig symmetric() { return {}; }
    static SchemeConfig favored(double eps = kDefaultEpsilon) { return {SchemeKind::Favored, eps, std::nullopt}; }
    static SchemeConfig encrypted(std::size_t len = kDefaultKeyLength) {
        return {SchemeKind::Encrypted, std::nullopt, len};
    }

    void validate() const {
        if (epsilon.has_value() != (kind == SchemeKind::Favored)) {
            throw ConfigError("epsilon must be set exactly for the favored scheme");
        }
        if (key_length.has_value() != (kind == SchemeKind::Encrypted)) {
            throw ConfigError("key_length must be set exactly for the encrypted scheme");
        }
        if (epsilon && !(*epsilon > 0.0 && *epsilon <= 0.5)) throw ConfigError("epsilon must lie in (0, 0.5]");
        if (key_length && *key_length == 0) throw ConfigError("key_length must be positive");
    }
};

template <BitSource G>
BasisVector choose_bases_symmetric(std::size_t n, G& gen) {
    BasisVector b(n);
    for (auto& x : b) x = coin(gen) ? Basis::Y : Basis::X;
    return b;
}

template <BitSource G>
BasisVector choose_bases_favored(std::size_t n, double epsilon, G& gen) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ConfigError("epsilon must lie in (0, 0.5]");
    BasisVector b(n);
    for (auto& x : b) x = bernoulli(gen, epsilon) ? Basis::Y : Basis::X;
    return b;
}

// Alice's basis for one control-key index. On m = 0 mod 4 rounds her outcome
// maps 0 -> X, 1 -> Y; on m = 2 mod 4 rounds the map is inverted, so the total
// Y count of the resulting basis vector is always even.
inline Basis derive_alice_control_entry(Outcome alice_outcome, RoundClass round_class) {
    if (round_class == RoundClass::OddY) throw InvalidRoundError("control keys come from even-Y rounds only");
    const bool y_on_one = round_class == RoundClass::ZeroMod4;
    const bool is_one = alice_outcome == Outcome::One;
    return (is_one == y_on_one) ? Basis::Y : Basis::X;
}

// Per-party basis sequences. Alice's sequence holds her resolved basis per index.
struct ControlKeySet {
    static constexpr int kVersion = 1;

    std::size_t parties = 0;
    std::vector<Basis> alice_key;
    std::vector<std::vector<Basis>> participant_keys;  // parties 2..n

    std::size_t key_length() const noexcept { return alice_key.size(); }

    BasisVector column(std::size_t index) const {
        BasisVector b;
        b.reserve(parties);
        b.push_back(alice_key.at(index));
        for (const auto& k : participant_keys) b.push_back(k.at(index));
        return b;
    }

    // Throws unless every sequence has the same length and every column has even Y count.
    void validate() const {
        check_party_count(parties);
        if (participant_keys.size() + 1 != parties) throw InvalidInputError("need one key per participant");
        if (alice_key.empty()) throw InvalidInputError("empty control key");
        for (const auto& k : participant_keys) {
            if (k.size() != alice_key.size()) throw InvalidInputError("control keys differ in length");
        }
        for (std::size_t j = 0; j < key_length(); ++j) {
            if (y_count(column(j)) % 2 != 0) {
                throw InvalidInputError("control key column " + std::to_string(j) + " has odd Y count");
            }
        }
    }

    friend bool operator==(const ControlKeySet&, const ControlKeySet&) = default;
};

struct KeyBootstrap {
    ControlKeySet keys;
    std::uint64_t rounds_consumed = 0;
};

// Runs symmetric rounds on fresh GHZ states until key_length valid rounds are
// retained. Participant entries are Y iff their retained bit is 1.
template <BitSource G>
KeyBootstrap run_key_bootstrap(std::size_t n, std::size_t key_length, G& gen) {
    check_party_count(n);
    if (key_length == 0) throw ConfigError("key_length must be positive");
    KeyBootstrap out;
    out.keys.parties = n;
    out.keys.participant_keys.assign(n - 1, {});
    out.keys.alice_key.reserve(key_length);
    for (auto& k : out.keys.participant_keys) k.reserve(key_length);
    const StateVector ghz = make_ghz(n);
    while (out.keys.key_length() < key_length) {
        ++out.rounds_consumed;
        const BasisVector bases = choose_bases_symmetric(n, gen);
        const Outcomes outcomes = measure_all(ghz, bases, gen);
        const RoundClass c = classify_round(bases);
        if (!is_valid(c)) continue;
        out.keys.alice_key.push_back(derive_alice_control_entry(outcomes[0], c));
        for (std::size_t p = 1; p < n; ++p) {
            out.keys.participant_keys[p - 1].push_back(outcomes[p] == Outcome::One ? Basis::Y : Basis::X);
        }
    }
    return out;
}

template <BitSource G>
ControlKeySet bootstrap_control_keys(std::size_t n, std::size_t key_length, G& gen) {
    return run_key_bootstrap(n, key_length, gen).keys;
}

// Keys are reused cyclically.
inline BasisVector choose_bases_encrypted(const ControlKeySet& keys, std::uint64_t round_index) {
    return keys.column(static_cast<std::size_t>(round_index % keys.key_length()));
}

inline nlohmann::ordered_json basis_array(std::span<const Basis> bases) {
    auto a = nlohmann::ordered_json::array();
    for (Basis b : bases) a.push_back(std::string(1, to_char(b)));
    return a;
}

inline BasisVector parse_basis_array(const nlohmann::json& a) {
    BasisVector out;
    out.reserve(a.size());
    for (const auto& e : a) {
        const auto s = e.get<std::string>();
        if (s.size() != 1) throw InvalidInputError("basis entries must be \"x\" or \"y\"");
        out.push_back(parse_basis(s[0]));
    }
    return out;
}

// {version, n, key_length, participant_keys: [["x","y",...], ...], alice_key: ["x", ...]}
inline nlohmann::ordered_json to_json(const ControlKeySet& keys) {
    nlohmann::ordered_json j;
    j["version"] = ControlKeySet::kVersion;
    j["n"] = keys.parties;
    j["key_length"] = keys.key_length();
    auto parts = nlohmann::ordered_json::array();
    for (const auto& k : keys.participant_keys) parts.push_back(basis_array(k));
    j["participant_keys"] = std::move(parts);
    j["alice_key"] = basis_array(keys.alice_key);
    return j;
}

inline ControlKeySet control_keys_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != ControlKeySet::kVersion) {
            throw InvalidInputError("unsupported control key version");
        }
        ControlKeySet keys;
        keys.parties = j.at("n").get<std::size_t>();
        keys.alice_key = parse_basis_array(j.at("alice_key"));
        for (const auto& k : j.at("participant_keys")) keys.participant_keys.push_back(parse_basis_array(k));
        if (keys.key_length() != j.at("key_length").get<std::size_t>()) {
            throw InvalidInputError("key_length does not match alice_key");
        }
        keys.validate();
        return keys;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError(std::string("malformed control key document: ") + e.what());
    }
}

}  // namespace qss
