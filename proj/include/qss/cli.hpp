#pragma once

// Command-line front end: run, verify, bootstrap, predict.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qss/adversary.hpp"
#include "qss/errors.hpp"
#include "qss/quantum_core.hpp"
#include "qss/schemes.hpp"
#include "qss/session.hpp"

namespace qss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kSeedEnvVar = "QSS_SEED";

using AmplitudeOracle = std::function<Amplitude(std::span<const Basis>, std::span<const Outcome>)>;

// Compares the dense GHZ expansion against the closed-form oracle for every
// basis vector and outcome tuple with n in [n_lo, n_hi]. Stops at the first
// mismatch and names the (n, bases, outcomes) triple.
inline bool verify_oracle(std::size_t n_lo, std::size_t n_hi, std::ostream& out, double tolerance = kNormTolerance,
                          const AmplitudeOracle& oracle = [](std::span<const Basis> b, std::span<const Outcome> o) {
                              return amplitude_in_bases(b, o);
                          }) {
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        const StateVector ghz = make_ghz(n);
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t bi = 0; bi < dim; ++bi) {
            const BasisVector bases = basis_vector_from_index(bi, n);
            const auto dense = expand_in_bases(ghz, bases);
            for (std::size_t oi = 0; oi < dim; ++oi) {
                const Outcomes outs = index_to_outcomes(oi, n);
                const Amplitude expected = oracle(bases, outs);
                if (std::abs(dense[oi] - expected) > tolerance) {
                    out << "FAIL n=" << n << " bases=" << to_string(bases) << " outcomes=" << to_string(outs)
                        << " dense=" << dense[oi] << " oracle=" << expected << '\n';
                    return false;
                }
            }
        }
        out << "PASS n=" << n << " (" << dim << " basis vectors, " << dim * dim << " amplitudes)\n";
    }
    return true;
}

// "a..b" or "a".
inline std::pair<std::size_t, std::size_t> parse_party_range(const std::string& s) {
    try {
        const auto dots = s.find("..");
        std::size_t used = 0;
        if (dots == std::string::npos) {
            const auto v = std::stoul(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return {v, v};
        }
        const std::string lo_s = s.substr(0, dots), hi_s = s.substr(dots + 2);
        const auto lo = std::stoul(lo_s, &used);
        if (used != lo_s.size()) throw std::invalid_argument(s);
        const auto hi = std::stoul(hi_s, &used);
        if (used != hi_s.size()) throw std::invalid_argument(s);
        if (lo > hi) throw std::invalid_argument(s);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw ConfigError("bad party range '" + s + "', expected N or A..B");
    }
}

inline std::string format_fraction(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed for " + path);
}

inline std::optional<EveModel> make_eve(const std::string& kind, std::optional<std::size_t> target) {
    if (kind == "none") return std::nullopt;
    EveModel m;
    m.kind = parse_eve_kind(kind);
    if (m.kind == EveKind::SinglePartyRandomBasis) m.target_party = target.value_or(2);
    return m;
}

// Fills scheme defaults and drops fields that do not apply to the chosen kind.
inline void normalize_scheme(SchemeConfig& s) {
    if (s.kind == SchemeKind::Favored) {
        if (!s.epsilon) s.epsilon = kDefaultEpsilon;
    } else {
        s.epsilon.reset();
    }
    if (s.kind == SchemeKind::Encrypted) {
        if (!s.key_length) s.key_length = kDefaultKeyLength;
    } else {
        s.key_length.reset();
    }
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-party GHZ quantum secret sharing simulator", "qss"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "simulate a session and emit a JSON report");
    std::string scheme = "symmetric", eve_kind = "none", config_path, output_path, log_path, keys_path;
    std::size_t parties = 3, key_length = kDefaultKeyLength, eve_target = 2;
    std::uint64_t rounds = 1000, seed = 0;
    double epsilon = kDefaultEpsilon, check_fraction = kDefaultCheckFraction, threshold = kDefaultErrorThreshold;
    unsigned threads = 1;
    auto* o_scheme = run->add_option("--scheme", scheme, "symmetric | favored | encrypted")
                         ->check(CLI::IsMember({"symmetric", "favored", "encrypted"}));
    auto* o_parties = run->add_option("--parties,-n", parties, "number of parties including Alice");
    auto* o_rounds = run->add_option("--rounds", rounds, "GHZ rounds to simulate");
    auto* o_seed = run->add_option("--seed", seed, "master seed");
    auto* o_eps = run->add_option("--epsilon", epsilon, "favored scheme: probability of the Y basis");
    auto* o_klen = run->add_option("--key-length", key_length, "encrypted scheme: control key length");
    run->add_option("--keys", keys_path, "encrypted scheme: control key JSON to use instead of bootstrapping");
    auto* o_eve = run->add_option("--eve", eve_kind, "none | single-random | all-random | all-x")
                      ->check(CLI::IsMember({"none", "single-random", "all-random", "all-x"}));
    auto* o_target = run->add_option("--eve-target", eve_target, "single-random: 1-based party number in [2, n]");
    auto* o_check = run->add_option("--check-fraction", check_fraction, "fraction of valid rounds disclosed");
    auto* o_thr = run->add_option("--error-threshold", threshold, "check error rate above which the session is dropped");
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--config", config_path, "session config JSON (flags override it)");
    run->add_option("--output,-o", output_path, "write the JSON report here instead of stdout");
    run->add_option("--log", log_path, "write the CSV round log here");

    // verify
    auto* verify = app.add_subcommand("verify", "check the closed-form amplitude oracle against the dense state");
    std::string range = "2..8";
    verify->add_option("--parties,-n", range, "N or A..B");

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "generate control keys from a symmetric run");
    std::size_t boot_parties = 3, boot_len = kDefaultKeyLength;
    std::uint64_t boot_seed = 0;
    std::string boot_out;
    boot->add_option("--parties,-n", boot_parties, "number of parties");
    boot->add_option("--key-length", boot_len, "control key length");
    auto* o_boot_seed = boot->add_option("--seed", boot_seed, "master seed");
    boot->add_option("--output,-o", boot_out, "write the key JSON here instead of stdout");

    // predict
    auto* predict = app.add_subcommand("predict", "closed-form eavesdropper error rate");
    std::size_t pred_parties = 3, pred_target = 2;
    std::string pred_eve = "all-random";
    predict->add_option("--parties,-n", pred_parties, "number of parties");
    predict->add_option("--eve", pred_eve, "single-random | all-random | all-x")
        ->check(CLI::IsMember({"single-random", "all-random", "all-x"}));
    predict->add_option("--eve-target", pred_target, "single-random: 1-based party number");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    const auto env_seed = []() -> std::optional<std::uint64_t> {
        if (const char* s = std::getenv(kSeedEnvVar)) {
            try {
                return std::stoull(s);
            } catch (const std::logic_error&) {
                throw ConfigError(std::string(kSeedEnvVar) + " is not an unsigned integer");
            }
        }
        return std::nullopt;
    };

    try {
        if (*run) {
            SessionConfig cfg;
            if (auto s = env_seed()) cfg.seed = *s;
            if (!config_path.empty()) cfg = session_config_from_json(read_json_file(config_path), cfg);
            if (o_parties->count()) cfg.n = parties;
            if (o_rounds->count()) cfg.rounds = rounds;
            if (o_seed->count()) cfg.seed = seed;
            if (o_scheme->count()) cfg.scheme = SchemeConfig{parse_scheme_kind(scheme), std::nullopt, std::nullopt};
            if (o_eps->count()) cfg.scheme.epsilon = epsilon;
            if (o_klen->count()) cfg.scheme.key_length = key_length;
            if (!keys_path.empty()) {
                cfg.control_keys = control_keys_from_json(read_json_file(keys_path));
                if (!cfg.scheme.key_length) cfg.scheme.key_length = cfg.control_keys->key_length();
            }
            if (o_eve->count()) cfg.eve = make_eve(eve_kind, o_target->count() ? std::optional(eve_target) : std::nullopt);
            else if (o_target->count() && cfg.eve) cfg.eve->target_party = eve_target;
            if (o_check->count()) cfg.check_fraction = check_fraction;
            if (o_thr->count()) cfg.error_threshold = threshold;
            cfg.workers = threads;
            normalize_scheme(cfg.scheme);

            const SessionReport report = run_session(cfg);
            const std::string json = to_json(report).dump(2) + "\n";
            if (output_path.empty()) {
                out << json;
            } else {
                write_text_file(output_path, json);
                out << "verdict=" << to_string(report.verdict) << " valid_fraction=" << format_fraction(report.valid_fraction)
                    << " check_error_rate=" << format_fraction(report.check.rate) << " key_bits=" << report.key_bits.size()
                    << '\n';
            }
            if (!log_path.empty()) {
                std::ostringstream csv;
                write_round_log(csv, report.records);
                write_text_file(log_path, csv.str());
            }
            return kExitOk;
        }
        if (*verify) {
            const auto [lo, hi] = parse_party_range(range);
            check_party_count(lo);
            check_party_count(hi);
            const bool ok = verify_oracle(lo, hi, out);
            out << (ok ? "verify: pass\n" : "verify: FAIL\n");
            return ok ? kExitOk : kExitFailure;
        }
        if (*boot) {
            std::uint64_t s = boot_seed;
            if (!o_boot_seed->count()) {
                if (auto e = env_seed()) s = *e;
            }
            Rng gen = make_stream(s, kBootstrapStream, 0);
            const auto keys = bootstrap_control_keys(boot_parties, boot_len, gen);
            const std::string json = to_json(keys).dump(2) + "\n";
            if (boot_out.empty()) {
                out << json;
            } else {
                write_text_file(boot_out, json);
            }
            return kExitOk;
        }
        if (*predict) {
            auto model = make_eve(pred_eve, pred_target);
            model->validate(pred_parties);
            out << format_fraction(predict_error_rate(pred_parties, *model)) << '\n';
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const BoundsError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

inline int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_command(args, out, err);
}

}  // namespace qss::cli
