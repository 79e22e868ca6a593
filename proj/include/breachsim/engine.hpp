#pragma once

#include "breachsim/cards.hpp"
#include "breachsim/common.hpp"
#include "breachsim/rng.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace breachsim {

inline constexpr int kMaxTurns = 10;
inline constexpr int kSuccessThreshold = 11;
inline constexpr int kEstablishedModifier = 3;
inline constexpr int kEstablishedCount = 4;

struct Scenario {
    // One attack card per phase, indexed by Phase value (0..3).
    std::array<std::string, kAttackPhaseCount> attack_cards;
    // Exactly four procedure ids, in draw (or file) order.
    std::vector<std::string> established;

    bool has_attack(const std::string& id) const {
        for (const auto& c : attack_cards) {
            if (c == id) return true;
        }
        return false;
    }

    bool is_established(const std::string& procedure_id) const {
        for (const auto& p : established) {
            if (p == procedure_id) return true;
        }
        return false;
    }

    bool operator==(const Scenario& other) const {
        return attack_cards == other.attack_cards && established == other.established;
    }
};

enum class GameStatus { Ongoing, Won, Lost };

inline const char* status_label(GameStatus s) {
    switch (s) {
        case GameStatus::Ongoing: return "ongoing";
        case GameStatus::Won: return "won";
        case GameStatus::Lost: return "lost";
    }
    return "ongoing";
}

struct AttemptOutcome {
    std::string procedure_id;
    int natural_roll = 0;
    int modifier = 0;
    int total = 0;
    bool success = false;
    std::optional<std::string> revealed_card;
};

// One row of a trajectory. `retrieval` is owned by the session layer (or by
// replay(), which applies the configured retrieval policy).
struct TurnRecord {
    int turn = 0;
    std::string procedure_id;
    int natural_roll = 0;
    int modifier = 0;
    int total = 0;
    bool success = false;
    std::optional<std::string> revealed_card;
    bool retrieval = false;
};

struct GameState {
    Scenario scenario;
    std::vector<std::string> revealed; // reveal order, subset of scenario.attack_cards
    int turn = 0;
    GameStatus status = GameStatus::Ongoing;
    uint64_t rng_seed = 0;
    Rng rng{0};
    std::vector<TurnRecord> history;

    bool is_revealed(const std::string& id) const {
        for (const auto& r : revealed) {
            if (r == id) return true;
        }
        return false;
    }
};

inline GameStatus game_status(int revealed_count, int turn) {
    if (revealed_count >= kAttackPhaseCount) return GameStatus::Won;
    if (turn >= kMaxTurns) return GameStatus::Lost;
    return GameStatus::Ongoing;
}

inline GameStatus game_status(const GameState& state) {
    return game_status(static_cast<int>(state.revealed.size()), state.turn);
}

inline void validate_scenario(const Catalog& catalog, const Scenario& scenario) {
    std::vector<std::string> issues;
    std::array<int, kAttackPhaseCount> per_phase{};
    for (const auto& id : scenario.attack_cards) {
        const Card* card = catalog.find(id);
        if (!card) {
            issues.push_back("attack_cards: unknown card id '" + id + "'");
            continue;
        }
        if (!card->is_attack()) {
            issues.push_back("attack_cards: '" + id + "' is a procedure card");
            continue;
        }
        per_phase[static_cast<size_t>(card->phase)] += 1;
    }
    for (int p = 0; p < kAttackPhaseCount; ++p) {
        if (per_phase[static_cast<size_t>(p)] != 1) {
            issues.push_back(std::string("attack_cards: expected exactly one ") +
                             phase_label(static_cast<Phase>(p)) + " card, got " +
                             std::to_string(per_phase[static_cast<size_t>(p)]));
        }
    }
    if (scenario.established.size() != kEstablishedCount) {
        issues.push_back("established: expected exactly 4 procedure ids, got " +
                         std::to_string(scenario.established.size()));
    }
    for (size_t i = 0; i < scenario.established.size(); ++i) {
        const std::string& id = scenario.established[i];
        const Card* card = catalog.find(id);
        if (!card) {
            issues.push_back("established: unknown card id '" + id + "'");
        } else if (card->phase != Phase::Procedure) {
            issues.push_back("established: '" + id + "' is not a procedure card");
        }
        for (size_t j = i + 1; j < scenario.established.size(); ++j) {
            if (scenario.established[j] == id) {
                issues.push_back("established: duplicate id '" + id + "'");
            }
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

// Normalizes attack cards into phase order regardless of input order.
inline Scenario canonical_scenario(const Catalog& catalog, const std::vector<std::string>& attacks,
                                   std::vector<std::string> established) {
    Scenario s;
    std::vector<std::string> issues;
    std::array<bool, kAttackPhaseCount> seen{};
    for (const auto& id : attacks) {
        const Card* card = catalog.find(id);
        if (!card || !card->is_attack()) {
            issues.push_back("attack_cards: unknown attack card id '" + id + "'");
            continue;
        }
        const auto slot = static_cast<size_t>(card->phase);
        if (seen[slot]) {
            issues.push_back(std::string("attack_cards: more than one ") +
                             phase_label(card->phase) + " card");
            continue;
        }
        seen[slot] = true;
        s.attack_cards[slot] = id;
    }
    if (attacks.size() != kAttackPhaseCount) {
        issues.push_back("attack_cards: expected 4 ids, got " + std::to_string(attacks.size()));
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    s.established = std::move(established);
    return s;
}

inline GameState new_game(const Catalog& catalog, uint64_t seed,
                          const std::optional<Scenario>& override = std::nullopt) {
    GameState state;
    state.rng_seed = seed;
    state.rng = Rng(seed);

    if (override) {
        validate_scenario(catalog, *override);
        state.scenario = *override;
        return state;
    }

    // Attack draw order is fixed (phase 0..3), then four established
    // procedures without replacement, all from the one seeded stream.
    for (int p = 0; p < kAttackPhaseCount; ++p) {
        const auto& ids = catalog.phase_ids(static_cast<Phase>(p));
        if (ids.empty()) throw ValidationError({std::string("catalog has no ") +
                                                phase_label(static_cast<Phase>(p)) + " cards"});
        state.scenario.attack_cards[static_cast<size_t>(p)] =
            ids[state.rng.below(ids.size())];
    }

    std::vector<std::string> pool = catalog.phase_ids(Phase::Procedure);
    if (pool.size() < kEstablishedCount) {
        throw ValidationError({"catalog has fewer than 4 procedure cards"});
    }
    for (int i = 0; i < kEstablishedCount; ++i) {
        const size_t j = i + state.rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        state.scenario.established.push_back(pool[i]);
    }
    return state;
}

inline int roll_d20(GameState& state) {
    if (state.status != GameStatus::Ongoing) {
        throw std::logic_error("roll_d20: game is not ongoing");
    }
    return 1 + static_cast<int>(state.rng.below(20));
}

inline AttemptOutcome resolve_attempt(const Catalog& catalog, GameState& state,
                                      const std::string& procedure_id, int natural_roll) {
    if (state.status != GameStatus::Ongoing) {
        throw std::logic_error("resolve_attempt: game is not ongoing");
    }
    if (natural_roll < 1 || natural_roll > 20) {
        throw std::invalid_argument("resolve_attempt: roll out of range: " +
                                    std::to_string(natural_roll));
    }
    const Card& proc = catalog.at(procedure_id);
    if (proc.phase != Phase::Procedure) throw UnknownIdError(procedure_id, "procedure");

    AttemptOutcome out;
    out.procedure_id = procedure_id;
    out.natural_roll = natural_roll;
    out.modifier = state.scenario.is_established(procedure_id) ? kEstablishedModifier : 0;
    out.total = natural_roll + out.modifier;
    out.success = out.total >= kSuccessThreshold;

    if (out.success) {
        // Reveal at most one matching unrevealed card, earliest phase first.
        const auto& detectable = catalog.detection_set(procedure_id);
        for (int p = 0; p < kAttackPhaseCount && !out.revealed_card; ++p) {
            const std::string& id = state.scenario.attack_cards[static_cast<size_t>(p)];
            if (state.is_revealed(id)) continue;
            if (std::find(detectable.begin(), detectable.end(), id) != detectable.end()) {
                out.revealed_card = id;
            }
        }
    }

    if (out.revealed_card) state.revealed.push_back(*out.revealed_card);
    state.turn += 1;
    state.status = game_status(state);

    TurnRecord rec;
    rec.turn = state.turn;
    rec.procedure_id = out.procedure_id;
    rec.natural_roll = out.natural_roll;
    rec.modifier = out.modifier;
    rec.total = out.total;
    rec.success = out.success;
    rec.revealed_card = out.revealed_card;
    state.history.push_back(std::move(rec));

    return out;
}

enum class RetrievalPolicy { OnNoReveal, OnFailureOnly, Never };

inline bool retrieval_triggered(RetrievalPolicy policy, const AttemptOutcome& outcome) {
    switch (policy) {
        case RetrievalPolicy::OnNoReveal: return !outcome.revealed_card.has_value();
        case RetrievalPolicy::OnFailureOnly: return !outcome.success;
        case RetrievalPolicy::Never: return false;
    }
    return false;
}

struct ReplayRun {
    std::vector<AttemptOutcome> outcomes;
    GameState final_state;
};

// Runs the engine with injected rolls instead of the RNG, for comparing
// against recorded trajectories.
inline ReplayRun replay(const Catalog& catalog, const Scenario& scenario,
                        const std::vector<int>& forced_rolls,
                        const std::vector<std::string>& procedure_choices,
                        RetrievalPolicy policy = RetrievalPolicy::OnNoReveal) {
    if (forced_rolls.size() != procedure_choices.size()) {
        throw std::invalid_argument("replay: rolls and procedure choices differ in length");
    }
    if (forced_rolls.size() > static_cast<size_t>(kMaxTurns)) {
        throw std::invalid_argument("replay: more than 10 turns supplied");
    }
    validate_scenario(catalog, scenario);

    ReplayRun run;
    run.final_state.scenario = scenario;
    for (size_t i = 0; i < forced_rolls.size(); ++i) {
        if (run.final_state.status != GameStatus::Ongoing) break;
        AttemptOutcome out =
            resolve_attempt(catalog, run.final_state, procedure_choices[i], forced_rolls[i]);
        run.final_state.history.back().retrieval = retrieval_triggered(policy, out);
        run.outcomes.push_back(std::move(out));
    }
    return run;
}

// Scenario / replay override file: {"attack_cards": [4 ids],
// "established": [4 ids], "forced_rolls": [...], "procedures": [...]}.
struct ScenarioFile {
    std::vector<std::string> attack_cards;
    std::vector<std::string> established;
    std::vector<int> forced_rolls;
    std::vector<std::string> procedures;
};

inline ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("scenario file " + path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("attack_cards") || !doc["attack_cards"].is_array()) {
        throw ValidationError({"/attack_cards: missing or not a list"});
    }
    ScenarioFile out;
    for (const auto& v : doc["attack_cards"]) out.attack_cards.push_back(v.get<std::string>());
    if (doc.contains("established")) {
        for (const auto& v : doc["established"]) out.established.push_back(v.get<std::string>());
    }
    if (doc.contains("forced_rolls")) {
        for (const auto& v : doc["forced_rolls"]) out.forced_rolls.push_back(v.get<int>());
    }
    if (doc.contains("procedures")) {
        for (const auto& v : doc["procedures"]) out.procedures.push_back(v.get<std::string>());
    }
    return out;
}

inline Scenario scenario_from_file(const Catalog& catalog, const ScenarioFile& file,
                                   Rng* established_rng = nullptr) {
    std::vector<std::string> established = file.established;
    if (established.empty() && established_rng) {
        std::vector<std::string> pool = catalog.phase_ids(Phase::Procedure);
        for (int i = 0; i < kEstablishedCount && static_cast<size_t>(i) < pool.size(); ++i) {
            const size_t j = i + established_rng->below(pool.size() - i);
            std::swap(pool[i], pool[j]);
            established.push_back(pool[i]);
        }
    }
    Scenario s = canonical_scenario(catalog, file.attack_cards, std::move(established));
    validate_scenario(catalog, s);
    return s;
}

} // namespace breachsim
