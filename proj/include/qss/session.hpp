#pragma once

// Full secret-sharing sessions: GHZ preparation, optional interception, basis
// choice per scheme, measurement, classical announcements, sifting, check-bit
// disclosure and error estimation, aggregated into a SessionReport.
//
// Round r draws all of its randomness from its own substream
// make_stream(seed, kRoundStream, r), so rounds can be evaluated in any order
// or in parallel and still replay bit-identically. Control-key bootstrap uses
// make_stream(seed, kBootstrapStream, 0).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qss/adversary.hpp"
#include "qss/errors.hpp"
#include "qss/protocol_rules.hpp"
#include "qss/quantum_core.hpp"
#include "qss/random.hpp"
#include "qss/schemes.hpp"

namespace qss {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr double kDefaultCheckFraction = 0.5;
// Not a value from the protocol description; an operating choice.
inline constexpr double kDefaultErrorThreshold = 0.11;

struct SessionConfig {
    std::size_t n = 3;
    std::uint64_t rounds = 1000;
    SchemeConfig scheme;
    std::optional<EveModel> eve;
    // Fraction of valid rounds disclosed for checking (Symmetric and Encrypted;
    // Favored checks exactly its even-Y rounds containing a Y).
    double check_fraction = kDefaultCheckFraction;
    double error_threshold = kDefaultErrorThreshold;
    std::uint64_t seed = 0;
    // Preloaded keys for the Encrypted scheme; bootstrapped from the seed when absent.
    std::optional<ControlKeySet> control_keys;
    unsigned workers = 1;

    void validate() const {
        check_party_count(n);
        if (rounds == 0) throw ConfigError("rounds must be at least 1");
        scheme.validate();
        if (eve) eve->validate(n);
        if (!(check_fraction >= 0.0 && check_fraction <= 1.0)) throw ConfigError("check_fraction must lie in [0, 1]");
        if (!(error_threshold >= 0.0 && error_threshold <= 1.0)) {
            throw ConfigError("error_threshold must lie in [0, 1]");
        }
        if (workers == 0) throw ConfigError("workers must be at least 1");
        if (control_keys) {
            if (scheme.kind != SchemeKind::Encrypted) throw ConfigError("control keys only apply to the encrypted scheme");
            control_keys->validate();
            if (control_keys->parties != n) throw ConfigError("control keys were generated for a different party count");
            if (control_keys->key_length() != *scheme.key_length) {
                throw ConfigError("control key length differs from scheme key_length");
            }
        }
    }
};

enum class Verdict : std::uint8_t { Clean, Compromised, InsufficientSamples };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Clean: return "clean";
        case Verdict::Compromised: return "compromised";
        case Verdict::InsufficientSamples: return "insufficient_samples";
    }
    return "?";
}

// Classical-channel traffic. Each kind admits exactly one payload type, so a
// class announcement can never carry the Y count itself.
enum class MessageKind : std::uint8_t { BasisReveal, ClassAnnouncement, CheckDisclosure };

struct Message {
    MessageKind kind;
    std::uint64_t round_id;
    std::size_t sender;  // 0-based party
    std::variant<Basis, RoundClass, Outcome> payload;
};

// Throws if a message carries a payload its kind does not allow, or if an
// outcome of a non-check round was disclosed.
inline void audit_transcript(std::span<const Message> transcript, std::span<const RoundRecord> records) {
    for (const auto& msg : transcript) {
        bool ok = false;
        switch (msg.kind) {
            case MessageKind::BasisReveal: ok = std::holds_alternative<Basis>(msg.payload); break;
            case MessageKind::ClassAnnouncement: ok = std::holds_alternative<RoundClass>(msg.payload) && msg.sender == 0; break;
            case MessageKind::CheckDisclosure: ok = std::holds_alternative<Outcome>(msg.payload); break;
        }
        if (!ok) throw InvalidInputError("message in round " + std::to_string(msg.round_id) + " has a forbidden payload");
        if (msg.kind == MessageKind::CheckDisclosure) {
            if (msg.round_id >= records.size() || records[msg.round_id].designation != Designation::CheckBit) {
                throw InvalidInputError("outcome of non-check round " + std::to_string(msg.round_id) + " was disclosed");
            }
        }
    }
}

// One participant's private key-round material.
struct ParticipantShare {
    std::size_t party = 0;  // 1-based, 2..n
    BasisVector bases;
    Outcomes outcomes;
};

struct SessionReport {
    SessionConfig config;
    std::array<std::uint64_t, 3> class_counts{};        // indexed by RoundClass
    std::array<std::uint64_t, 3> designation_counts{};  // indexed by Designation
    double valid_fraction = 0.0;
    ErrorEstimate check;
    ErrorEstimate check_two_mod_4;
    ErrorEstimate check_zero_mod_4;
    // Check rounds with exactly two Y bases.
    ErrorEstimate check_two_y;
    Verdict verdict = Verdict::InsufficientSamples;

    Outcomes key_bits;  // Alice's view
    std::vector<std::uint64_t> key_round_ids;
    std::vector<RoundClass> key_classes;
    std::vector<ParticipantShare> shares;

    // Valid rounds where Eve's parity guess matched Alice's bit; only when she
    // intercepts every transit qubit.
    std::optional<ErrorEstimate> eve_agreement;
    std::uint64_t bootstrap_rounds = 0;

    std::vector<RoundRecord> records;
    std::vector<Message> transcript;

    std::uint64_t count(RoundClass c) const { return class_counts[static_cast<std::size_t>(c)]; }
    std::uint64_t count(Designation d) const { return designation_counts[static_cast<std::size_t>(d)]; }
    std::optional<double> eve_knowledge_fraction() const {
        if (!eve_agreement || eve_agreement->samples == 0) return std::nullopt;
        return static_cast<double>(eve_agreement->samples - eve_agreement->errors) /
               static_cast<double>(eve_agreement->samples);
    }
};

namespace detail {

struct RoundResult {
    RoundRecord record;
    std::optional<bool> eve_agrees;
};

inline RoundResult run_round(const SessionConfig& cfg, const ControlKeySet* keys, const StateVector& ghz,
                             std::uint64_t round_id) {
    Rng gen = make_stream(cfg.seed, kRoundStream, round_id);
    RoundResult out;
    auto& rec = out.record;
    rec.round_id = round_id;

    StateVector state = ghz;
    EveRecord eve_record;
    if (cfg.eve) {
        auto icpt = intercept(state, *cfg.eve, gen);
        state = std::move(icpt.state);
        eve_record = std::move(icpt.record);
    }

    switch (cfg.scheme.kind) {
        case SchemeKind::Symmetric: rec.bases = choose_bases_symmetric(cfg.n, gen); break;
        case SchemeKind::Favored: rec.bases = choose_bases_favored(cfg.n, *cfg.scheme.epsilon, gen); break;
        case SchemeKind::Encrypted: rec.bases = choose_bases_encrypted(*keys, round_id); break;
    }
    rec.outcomes = measure_all(state, rec.bases, gen);
    rec.round_class = classify_round(rec.bases);

    if (!is_valid(rec.round_class)) {
        rec.designation = Designation::Discarded;
    } else if (cfg.scheme.kind == SchemeKind::Favored) {
        rec.designation = y_count(rec.bases) == 0 ? Designation::KeyBit : Designation::CheckBit;
    } else {
        rec.designation = bernoulli(gen, cfg.check_fraction) ? Designation::CheckBit : Designation::KeyBit;
    }

    if (cfg.eve && is_valid(rec.round_class)) {
        if (auto guess = eve_reconstruct(eve_record, cfg.n, rec.round_class)) out.eve_agrees = *guess == rec.alice();
    }
    return out;
}

inline void append_messages(const SessionConfig& cfg, const RoundRecord& rec, std::vector<Message>& out) {
    const bool encrypted = cfg.scheme.kind == SchemeKind::Encrypted;
    // Under control keys every round is known to be valid and nobody announces
    // bases; participants reveal them to Alice only on check rounds.
    if (!encrypted) {
        for (std::size_t p = 1; p < cfg.n; ++p) out.push_back({MessageKind::BasisReveal, rec.round_id, p, rec.bases[p]});
        out.push_back({MessageKind::ClassAnnouncement, rec.round_id, 0, rec.round_class});
    }
    if (rec.designation == Designation::CheckBit) {
        for (std::size_t p = 1; p < cfg.n; ++p) {
            if (encrypted) out.push_back({MessageKind::BasisReveal, rec.round_id, p, rec.bases[p]});
            out.push_back({MessageKind::CheckDisclosure, rec.round_id, p, rec.outcomes[p]});
        }
    }
}

inline void tally(ErrorEstimate& est, bool error) {
    ++est.samples;
    if (error) ++est.errors;
}

inline void finish(ErrorEstimate& est) {
    est.insufficient_samples = est.samples == 0;
    est.rate = est.samples == 0 ? 0.0 : static_cast<double>(est.errors) / static_cast<double>(est.samples);
}

}  // namespace detail

inline SessionReport run_session(const SessionConfig& config) {
    config.validate();
    SessionReport report;
    report.config = config;
    const std::size_t n = config.n;

    std::optional<ControlKeySet> keys = config.control_keys;
    if (config.scheme.kind == SchemeKind::Encrypted && !keys) {
        Rng boot = make_stream(config.seed, kBootstrapStream, 0);
        auto kb = run_key_bootstrap(n, *config.scheme.key_length, boot);
        report.bootstrap_rounds = kb.rounds_consumed;
        keys = std::move(kb.keys);
    }

    const StateVector ghz = make_ghz(n);
    std::vector<detail::RoundResult> results(config.rounds);
    const auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) results[r] = detail::run_round(config, keys ? &*keys : nullptr, ghz, r);
    };
    const std::uint64_t workers = std::min<std::uint64_t>(config.workers, config.rounds);
    if (workers <= 1) {
        work(0, config.rounds);
    } else {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (config.rounds + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t b = w * chunk, e = std::min(config.rounds, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
    }

    report.records.reserve(results.size());
    report.shares.resize(n - 1);
    for (std::size_t p = 1; p < n; ++p) report.shares[p - 1].party = p + 1;
    ErrorEstimate eve;
    for (auto& res : results) {
        const RoundRecord& rec = report.records.emplace_back(std::move(res.record));
        ++report.class_counts[static_cast<std::size_t>(rec.round_class)];
        ++report.designation_counts[static_cast<std::size_t>(rec.designation)];
        detail::append_messages(config, rec, report.transcript);
        if (res.eve_agrees) detail::tally(eve, !*res.eve_agrees);

        if (rec.designation == Designation::CheckBit) {
            const bool err = reconstruction_disagrees(rec);
            detail::tally(report.check, err);
            detail::tally(rec.round_class == RoundClass::TwoMod4 ? report.check_two_mod_4 : report.check_zero_mod_4, err);
            if (y_count(rec.bases) == 2) detail::tally(report.check_two_y, err);
        } else if (rec.designation == Designation::KeyBit) {
            report.key_bits.push_back(rec.alice());
            report.key_round_ids.push_back(rec.round_id);
            report.key_classes.push_back(rec.round_class);
            for (std::size_t p = 1; p < n; ++p) {
                report.shares[p - 1].bases.push_back(rec.bases[p]);
                report.shares[p - 1].outcomes.push_back(rec.outcomes[p]);
            }
        }
    }
    for (auto* est : {&report.check, &report.check_two_mod_4, &report.check_zero_mod_4, &report.check_two_y}) {
        detail::finish(*est);
    }
    if (config.eve && config.eve->kind != EveKind::SinglePartyRandomBasis) {
        detail::finish(eve);
        report.eve_agreement = eve;
    }

    report.valid_fraction = static_cast<double>(report.count(RoundClass::TwoMod4) + report.count(RoundClass::ZeroMod4)) /
                            static_cast<double>(config.rounds);
    if (report.check.insufficient_samples) {
        report.verdict = Verdict::InsufficientSamples;
    } else {
        report.verdict = report.check.rate > config.error_threshold ? Verdict::Compromised : Verdict::Clean;
    }
    return report;
}

// Joint reconstruction by all n-1 participants of Alice's key bits. Any
// missing participant makes this refuse.
inline Outcomes reconstruct_shared_secret(const SessionReport& report, std::span<const ParticipantShare> shares) {
    const std::size_t n = report.config.n;
    const std::size_t len = report.key_classes.size();
    std::vector<const ParticipantShare*> by_party(n + 1, nullptr);
    for (const auto& s : shares) {
        if (s.party < 2 || s.party > n) throw InvalidInputError("share from unknown party " + std::to_string(s.party));
        if (by_party[s.party]) throw InvalidInputError("duplicate share from party " + std::to_string(s.party));
        if (s.outcomes.size() != len) throw InvalidInputError("share length differs from the key round count");
        by_party[s.party] = &s;
    }
    for (std::size_t p = 2; p <= n; ++p) {
        if (!by_party[p]) {
            throw CollusionIncompleteError("party " + std::to_string(p) + " withheld its share; all " +
                                           std::to_string(n - 1) + " participants are required");
        }
    }
    Outcomes secret(len);
    Outcomes column(n - 1);
    for (std::size_t j = 0; j < len; ++j) {
        for (std::size_t p = 2; p <= n; ++p) column[p - 2] = by_party[p]->outcomes[j];
        secret[j] = reconstruct_secret_bit(column, report.key_classes[j]);
    }
    return secret;
}

inline nlohmann::ordered_json to_json(const ErrorEstimate& e) {
    nlohmann::ordered_json j;
    j["samples"] = e.samples;
    j["errors"] = e.errors;
    j["error_rate"] = e.rate;
    j["insufficient_samples"] = e.insufficient_samples;
    return j;
}

inline nlohmann::ordered_json to_json(const SchemeConfig& s) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    if (s.epsilon) j["epsilon"] = *s.epsilon;
    if (s.key_length) j["key_length"] = *s.key_length;
    return j;
}

inline nlohmann::ordered_json to_json(const std::optional<EveModel>& eve) {
    if (!eve) return nullptr;
    nlohmann::ordered_json j;
    j["kind"] = to_string(eve->kind);
    if (eve->target_party) j["target_party"] = *eve->target_party;
    return j;
}

inline nlohmann::ordered_json to_json(const SessionConfig& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["rounds"] = c.rounds;
    j["scheme"] = to_json(c.scheme);
    j["eve"] = to_json(c.eve);
    j["check_fraction"] = c.check_fraction;
    j["error_threshold"] = c.error_threshold;
    j["seed"] = c.seed;
    return j;
}

// Overlays the fields present in `j` onto `base`. Same schema as to_json(SessionConfig).
inline SessionConfig session_config_from_json(const nlohmann::json& j, SessionConfig base = {}) {
    try {
        if (j.contains("n")) base.n = j.at("n").get<std::size_t>();
        if (j.contains("rounds")) base.rounds = j.at("rounds").get<std::uint64_t>();
        if (j.contains("scheme")) {
            const auto& s = j.at("scheme");
            SchemeConfig sc;
            sc.kind = parse_scheme_kind(s.at("kind").get<std::string>());
            if (s.contains("epsilon")) sc.epsilon = s.at("epsilon").get<double>();
            if (s.contains("key_length")) sc.key_length = s.at("key_length").get<std::size_t>();
            base.scheme = sc;
        }
        if (j.contains("eve")) {
            const auto& e = j.at("eve");
            if (e.is_null()) {
                base.eve.reset();
            } else {
                EveModel m;
                m.kind = parse_eve_kind(e.at("kind").get<std::string>());
                if (e.contains("target_party")) m.target_party = e.at("target_party").get<std::size_t>();
                base.eve = m;
            }
        }
        if (j.contains("check_fraction")) base.check_fraction = j.at("check_fraction").get<double>();
        if (j.contains("error_threshold")) base.error_threshold = j.at("error_threshold").get<double>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        return base;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed session config: ") + e.what());
    }
}

// Stable field order; byte-identical for identical configs.
inline nlohmann::ordered_json to_json(const SessionReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["config"] = to_json(r.config);
    j["rng"] = "mt19937_64; round r seeded with splitmix64 substream (seed, 1, r); bootstrap (seed, 2, 0)";
    j["control_keys"] = r.config.scheme.kind != SchemeKind::Encrypted
                            ? nlohmann::ordered_json(nullptr)
                            : nlohmann::ordered_json(r.config.control_keys ? "provided" : "bootstrapped");
    j["bootstrap_rounds"] = r.bootstrap_rounds;
    nlohmann::ordered_json counts;
    for (auto c : {RoundClass::OddY, RoundClass::TwoMod4, RoundClass::ZeroMod4}) counts[std::string(to_string(c))] = r.count(c);
    j["class_counts"] = counts;
    nlohmann::ordered_json des;
    for (auto d : {Designation::Discarded, Designation::CheckBit, Designation::KeyBit}) des[std::string(to_string(d))] = r.count(d);
    j["designation_counts"] = des;
    j["valid_fraction"] = r.valid_fraction;
    j["check"] = to_json(r.check);
    nlohmann::ordered_json per_class;
    per_class["two_mod_4"] = to_json(r.check_two_mod_4);
    per_class["zero_mod_4"] = to_json(r.check_zero_mod_4);
    per_class["two_y"] = to_json(r.check_two_y);
    j["check_breakdown"] = per_class;
    j["verdict"] = to_string(r.verdict);
    if (auto f = r.eve_knowledge_fraction()) {
        j["eve_knowledge_fraction"] = *f;
    } else {
        j["eve_knowledge_fraction"] = nullptr;
    }
    j["key_length"] = r.key_bits.size();
    j["key_bits"] = to_string(r.key_bits);
    std::string classes;
    for (auto c : r.key_classes) classes.push_back(c == RoundClass::TwoMod4 ? '2' : '0');
    j["key_classes"] = classes;
    auto shares = nlohmann::ordered_json::array();
    for (const auto& s : r.shares) {
        nlohmann::ordered_json sj;
        sj["party"] = s.party;
        sj["bases"] = to_string(s.bases);
        sj["outcomes"] = to_string(s.outcomes);
        shares.push_back(std::move(sj));
    }
    j["shares"] = shares;
    std::array<std::uint64_t, 3> msgs{};
    for (const auto& m : r.transcript) ++msgs[static_cast<std::size_t>(m.kind)];
    nlohmann::ordered_json tj;
    tj["basis_reveal"] = msgs[0];
    tj["class_announcement"] = msgs[1];
    tj["check_disclosure"] = msgs[2];
    j["transcript"] = tj;
    return j;
}

// CSV round log: round_id,bases,outcomes,class,designation
inline void write_round_log(std::ostream& os, std::span<const RoundRecord> records) {
    os << "round_id,bases,outcomes,class,designation\n";
    for (const auto& r : records) {
        os << r.round_id << ',' << to_string(r.bases) << ',' << to_string(r.outcomes) << ',' << to_string(r.round_class)
           << ',' << to_string(r.designation) << '\n';
    }
}

}  // namespace qss
