#pragma once

// Round classification by Y-basis count, parity reconstruction of Alice's bit,
// sifting, and check-round error estimation for the n-party GHZ protocol.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qss/errors.hpp"
#include "qss/quantum_core.hpp"

namespace qss {

// Category of the Y count m, counting Alice's own basis.
enum class RoundClass : std::uint8_t { OddY, TwoMod4, ZeroMod4 };

enum class Designation : std::uint8_t { Discarded, CheckBit, KeyBit };

constexpr std::string_view to_string(RoundClass c) noexcept {
    switch (c) {
        case RoundClass::OddY: return "odd_y";
        case RoundClass::TwoMod4: return "two_mod_4";
        case RoundClass::ZeroMod4: return "zero_mod_4";
    }
    return "?";
}

constexpr std::string_view to_string(Designation d) noexcept {
    switch (d) {
        case Designation::Discarded: return "discarded";
        case Designation::CheckBit: return "check";
        case Designation::KeyBit: return "key";
    }
    return "?";
}

inline RoundClass classify_round(std::span<const Basis> bases) noexcept {
    const std::size_t m = y_count(bases);
    if (m % 2 == 1) return RoundClass::OddY;
    return m % 4 == 2 ? RoundClass::TwoMod4 : RoundClass::ZeroMod4;
}

inline bool is_valid(RoundClass c) noexcept { return c != RoundClass::OddY; }

struct RoundRecord {
    std::uint64_t round_id = 0;
    BasisVector bases;
    Outcomes outcomes;  // position 0 is Alice
    RoundClass round_class = RoundClass::OddY;
    Designation designation = Designation::Discarded;

    Outcome alice() const { return outcomes.at(0); }
    std::span<const Outcome> participants() const { return std::span<const Outcome>(outcomes).subspan(1); }
};

// Alice's bit from the participants' outcomes: their parity, plus 1 when m = 2 mod 4.
inline Outcome reconstruct_secret_bit(std::span<const Outcome> participant_outcomes, RoundClass round_class) {
    if (round_class == RoundClass::OddY) throw InvalidRoundError("odd-Y rounds carry no secret bit");
    const Outcome p = parity(participant_outcomes);
    return round_class == RoundClass::TwoMod4 ? p ^ Outcome::One : p;
}

inline std::vector<RoundRecord> sift(std::span<const RoundRecord> records) {
    std::vector<RoundRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [](const RoundRecord& r) { return is_valid(r.round_class); });
    return out;
}

struct ErrorEstimate {
    std::size_t samples = 0;
    std::size_t errors = 0;
    double rate = 0.0;
    // No check records at all; rate is then 0 by convention.
    bool insufficient_samples = true;
};

inline bool reconstruction_disagrees(const RoundRecord& r) {
    if (r.outcomes.size() < kMinParties) throw InvalidInputError("record needs Alice and at least one participant");
    return reconstruct_secret_bit(r.participants(), r.round_class) != r.alice();
}

inline ErrorEstimate estimate_error_rate(std::span<const RoundRecord> check_records) {
    ErrorEstimate est;
    for (const auto& r : check_records) {
        if (!is_valid(r.round_class)) throw InvalidInputError("check record with odd-Y class");
        ++est.samples;
        if (reconstruction_disagrees(r)) ++est.errors;
    }
    est.insufficient_samples = est.samples == 0;
    est.rate = est.samples == 0 ? 0.0 : static_cast<double>(est.errors) / static_cast<double>(est.samples);
    return est;
}

}  // namespace qss
