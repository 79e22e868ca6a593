#pragma once

#include "breachsim/backend.hpp"
#include "breachsim/cards.hpp"
#include "breachsim/engine.hpp"
#include "breachsim/index.hpp"
#include "breachsim/team.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace breachsim {

class TurnAbortError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScenarioLeakError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    RetrievalPolicy retrieval_policy = RetrievalPolicy::OnNoReveal;
    size_t top_k = 3;
    bool distinct_docs = false; // dedupe retrieval hits to distinct documents
    int context_window = 30; // most recent messages sent to the backend
    int discussion_rounds = 1;
    int max_retries = 3;
    std::vector<int> forced_rolls;               // replay support
    std::vector<std::string> forced_procedures;  // replay support
    std::function<void(const std::string&)> notice; // non-fatal diagnostics
};

struct Session {
    const Catalog* catalog = nullptr;
    TeamConfig team;
    AgentBackend* backend = nullptr;
    const ChunkIndex* index = nullptr; // optional
    SessionConfig cfg;
    GameState game;
    std::vector<Message> transcript;
    uint64_t clock = 0;
    size_t retrieval_count = 0;
};

struct GameReport {
    uint64_t seed = 0;
    StructureId structure = StructureId::HomoCen;
    GameStatus status = GameStatus::Ongoing;
    int turns_played = 0;
    std::vector<TurnRecord> records;
    std::vector<Message> transcript;
    size_t retrieval_count = 0;
    uint64_t config_digest = 0;
    bool aborted = false;
    std::string abort_reason;
};

inline Session make_session(const Catalog& catalog, TeamConfig team, AgentBackend& backend,
                            const ChunkIndex* index, uint64_t seed, SessionConfig cfg = {},
                            const std::optional<Scenario>& override = std::nullopt) {
    Session s;
    s.catalog = &catalog;
    s.team = std::move(team);
    s.backend = &backend;
    s.index = index;
    s.cfg = std::move(cfg);
    s.game = new_game(catalog, seed, override);
    return s;
}

namespace detail {

inline void push_message(Session& s, std::string speaker, MessageKind kind, std::string text,
                         int turn) {
    Message m;
    m.speaker = std::move(speaker);
    m.turn = turn;
    m.kind = kind;
    m.text = std::move(text);
    m.timestamp = s.clock++;
    s.transcript.push_back(std::move(m));
}

// Window sent to backends: the scenario message plus the most recent N.
inline std::vector<Message> context_window(const Session& s) {
    const auto& t = s.transcript;
    const size_t n = static_cast<size_t>(std::max(1, s.cfg.context_window));
    if (t.size() <= n) return t;
    std::vector<Message> out;
    for (const Message& m : t) {
        if (m.kind == MessageKind::Scenario) {
            out.push_back(m);
            break;
        }
    }
    const size_t take = n - out.size();
    out.insert(out.end(), t.end() - static_cast<long>(take), t.end());
    return out;
}

inline std::string public_context(const Session& s) {
    const Catalog& cat = *s.catalog;
    std::string ctx = "Turn " + std::to_string(s.game.turn + 1) + " of " +
                      std::to_string(kMaxTurns) + ". Revealed attack cards: ";
    if (s.game.revealed.empty()) {
        ctx += "none";
    } else {
        for (size_t i = 0; i < s.game.revealed.size(); ++i) {
            if (i) ctx += ", ";
            ctx += cat.at(s.game.revealed[i]).name;
        }
    }
    ctx += ". Established procedures: ";
    for (size_t i = 0; i < s.game.scenario.established.size(); ++i) {
        if (i) ctx += ", ";
        ctx += cat.at(s.game.scenario.established[i]).name;
    }
    ctx += ".";
    return ctx;
}

inline GameView make_view(const Session& s, bool privileged) {
    GameView v;
    v.catalog = s.catalog;
    v.turn = s.game.turn + 1; // turn being played
    v.seed = s.game.rng_seed;
    v.revealed = s.game.revealed;
    v.established = s.game.scenario.established;
    if (privileged) v.hidden = s.game.scenario;
    if (!s.cfg.forced_procedures.empty() &&
        static_cast<size_t>(s.game.turn) < s.cfg.forced_procedures.size()) {
        v.forced_procedure = s.cfg.forced_procedures[static_cast<size_t>(s.game.turn)];
    }
    if (!s.game.history.empty()) v.last_procedure = s.game.history.back().procedure_id;
    return v;
}

inline std::string ask(Session& s, const Role& role, TaskPurpose purpose, bool privileged,
                       int attempt = 1) {
    AgentTask task;
    task.purpose = purpose;
    task.role = &role;
    // The window vector must outlive the span.
    std::vector<Message> window = context_window(s);
    task.window = std::span<const Message>(window);
    task.view = make_view(s, privileged);
    task.game_context = public_context(s);
    task.attempt = attempt;
    return s.backend->respond(task);
}

// Speaking order per structure: centralized members first (leader last),
// hierarchical seniors before beginners, otherwise roster order.
inline std::vector<const Role*> speaking_order(const TeamConfig& team) {
    std::vector<const Role*> order;
    if (is_centralized(team.structure_id)) {
        for (const Role& r : team.defenders) {
            if (!r.is_leader) order.push_back(&r);
        }
        order.push_back(team.leader());
    } else if (is_hierarchical(team.structure_id)) {
        for (const Role& r : team.defenders) {
            if (r.expertise != Expertise::Beginner) order.push_back(&r);
        }
        for (const Role& r : team.defenders) {
            if (r.expertise == Expertise::Beginner) order.push_back(&r);
        }
    } else {
        for (const Role& r : team.defenders) order.push_back(&r);
    }
    return order;
}

} // namespace detail

// Captain narrates the initial compromise without naming any hidden card;
// leaking outputs are rejected and retried.
inline Message describe_scenario(Session& s) {
    if (s.game.turn != 0 || !s.transcript.empty()) {
        throw std::logic_error("describe_scenario: session already started");
    }
    const Catalog& cat = *s.catalog;
    std::string text;
    bool clean = false;
    for (int attempt = 1; attempt <= std::max(1, s.cfg.max_retries); ++attempt) {
        text = detail::ask(s, s.team.captain, TaskPurpose::Describe, true, attempt);
        clean = true;
        for (const auto& id : s.game.scenario.attack_cards) {
            if (contains_ci(text, cat.at(id).name)) {
                clean = false;
                break;
            }
        }
        if (clean) break;
        if (s.cfg.notice) {
            s.cfg.notice("scenario description leaked a card name; retrying");
        }
    }
    if (!clean) {
        throw ScenarioLeakError(
            "scenario description still leaks a hidden card name after retries");
    }
    detail::push_message(s, s.team.captain.role_id, MessageKind::Scenario, text, 0);
    return s.transcript.back();
}

// Post-attempt retrieval per the session policy. Returns the query and its
// results when retrieval was triggered.
inline std::optional<std::pair<std::string, std::vector<RetrievalResult>>>
maybe_retrieve(Session& s, const AttemptOutcome& outcome) {
    const int turn = s.game.turn;
    if (!retrieval_triggered(s.cfg.retrieval_policy, outcome)) return std::nullopt;

    const std::string query_text =
        detail::ask(s, s.team.captain, TaskPurpose::Query, true);
    detail::push_message(s, s.team.captain.role_id, MessageKind::RetrievalQuery, query_text,
                         turn);
    s.retrieval_count += 1;

    std::vector<RetrievalResult> results;
    if (s.index && !s.index->empty()) {
        results = s.index->query(query_text, s.cfg.top_k, s.cfg.distinct_docs);
        std::string body = "Retrieved passages:";
        for (size_t i = 0; i < results.size(); ++i) {
            char head[64];
            std::snprintf(head, sizeof(head), "\n[%zu] (%s, score %.4f) ", i + 1,
                          results[i].chunk_key().c_str(), results[i].score);
            body += head;
            body += results[i].text;
        }
        detail::push_message(s, s.team.retrieval_agent.role_id, MessageKind::RetrievalResult,
                             body, turn);
    } else if (s.cfg.notice) {
        s.cfg.notice("retrieval skipped: no index configured or index empty");
    }
    return std::make_pair(query_text, std::move(results));
}

inline TurnRecord run_turn(Session& s) {
    if (s.game.status != GameStatus::Ongoing) {
        throw std::logic_error("run_turn: game is not ongoing");
    }
    const Catalog& cat = *s.catalog;
    const int turn_number = s.game.turn + 1;

    detail::push_message(s, s.team.captain.role_id, MessageKind::Discussion,
                         "Turn " + std::to_string(turn_number) + " of " +
                             std::to_string(kMaxTurns) +
                             ". Defenders, discuss and select one procedure card.",
                         turn_number);

    // Discussion rounds.
    const auto order = detail::speaking_order(s.team);
    for (int round = 0; round < std::max(1, s.cfg.discussion_rounds); ++round) {
        for (const Role* role : order) {
            const std::string text = detail::ask(s, *role, TaskPurpose::Discuss,
                                                 s.backend->name() == "scripted");
            detail::push_message(s, role->role_id, MessageKind::Discussion, text,
                                 turn_number);
        }
    }

    // Decision.
    std::string chosen;
    std::string decider = s.team.captain.role_id;
    if (!s.cfg.forced_procedures.empty()) {
        const size_t idx = static_cast<size_t>(s.game.turn);
        if (idx >= s.cfg.forced_procedures.size()) {
            throw TurnAbortError("forced procedure list exhausted at turn " +
                                 std::to_string(turn_number));
        }
        chosen = s.cfg.forced_procedures[idx];
    } else if (const Role* leader = s.team.leader()) {
        decider = leader->role_id;
        // The leader's final Discussion message carries the DECISION line;
        // unparseable output is retried.
        for (int attempt = 1; attempt <= std::max(1, s.cfg.max_retries); ++attempt) {
            const Message& last = s.transcript.back();
            std::optional<std::string> parsed;
            if (last.speaker == leader->role_id && last.kind == MessageKind::Discussion) {
                parsed = parse_decision(last.text, cat);
            }
            if (parsed) {
                chosen = *parsed;
                break;
            }
            if (attempt == s.cfg.max_retries) {
                throw TurnAbortError("turn " + std::to_string(turn_number) +
                                     ": leader output named no valid procedure after " +
                                     std::to_string(attempt) + " attempts");
            }
            const std::string retry_text =
                detail::ask(s, *leader, TaskPurpose::Decide,
                            s.backend->name() == "scripted", attempt + 1);
            detail::push_message(s, leader->role_id, MessageKind::Discussion, retry_text,
                                 turn_number);
        }
    } else {
        // Majority vote over each defender's final stated preference.
        std::vector<Preference> prefs;
        size_t pref_order = 0;
        for (const Role* role : order) {
            std::optional<std::string> pid;
            for (const Message& m : s.transcript) {
                if (m.turn != turn_number || m.kind != MessageKind::Discussion) continue;
                if (m.speaker != role->role_id) continue;
                if (auto parsed = parse_decision(m.text, cat)) pid = parsed;
            }
            for (int attempt = 2; !pid && attempt <= std::max(1, s.cfg.max_retries);
                 ++attempt) {
                const std::string text =
                    detail::ask(s, *role, TaskPurpose::Decide,
                                s.backend->name() == "scripted", attempt);
                detail::push_message(s, role->role_id, MessageKind::Discussion, text,
                                 turn_number);
                pid = parse_decision(text, cat);
            }
            if (!pid) {
                throw TurnAbortError("turn " + std::to_string(turn_number) + ": defender '" +
                                     role->role_id +
                                     "' stated no valid preference after retries");
            }
            prefs.push_back({role->role_id, *pid, pref_order++});
        }
        auto choice = majority_choice(prefs);
        if (!choice) {
            throw TurnAbortError("turn " + std::to_string(turn_number) +
                                 ": no preferences to vote on");
        }
        chosen = *choice;
    }

    const Card& proc = cat.at(chosen);
    if (proc.phase != Phase::Procedure) {
        throw TurnAbortError("turn " + std::to_string(turn_number) + ": '" + chosen +
                             "' is not a procedure");
    }
    detail::push_message(s, decider, MessageKind::Decision, "DECISION: " + proc.name,
                         turn_number);

    // Resolve.
    int roll = 0;
    if (!s.cfg.forced_rolls.empty()) {
        const size_t idx = static_cast<size_t>(s.game.turn);
        if (idx >= s.cfg.forced_rolls.size()) {
            throw TurnAbortError("forced roll list exhausted at turn " +
                                 std::to_string(turn_number));
        }
        roll = s.cfg.forced_rolls[idx];
    } else {
        roll = roll_d20(s.game);
    }
    const AttemptOutcome outcome = resolve_attempt(cat, s.game, chosen, roll);

    char summary[160];
    std::snprintf(summary, sizeof(summary), "Roll %d %+d = %d. %s", outcome.natural_roll,
                  outcome.modifier, outcome.total, outcome.success ? "Success." : "Failure.");
    std::string outcome_text = summary;
    if (outcome.revealed_card) {
        outcome_text += " Revealed: " + cat.at(*outcome.revealed_card).name + ".";
    } else if (outcome.success) {
        outcome_text += " No attack card revealed.";
    }
    detail::push_message(s, s.team.captain.role_id, MessageKind::Outcome, outcome_text,
                         turn_number);

    const auto retrieved = maybe_retrieve(s, outcome);
    s.game.history.back().retrieval = retrieved.has_value();
    return s.game.history.back();
}

inline uint64_t session_config_digest(const Session& s) {
    std::string blob = std::string(structure_key(s.team.structure_id)) + "|" +
                       s.backend->name() + "|" +
                       std::to_string(static_cast<int>(s.cfg.retrieval_policy)) + "|" +
                       std::to_string(s.cfg.top_k) + "|" +
                       std::to_string(s.cfg.context_window) + "|" +
                       std::to_string(s.cfg.discussion_rounds) + "|" +
                       (s.index ? std::to_string(s.index->size()) : "no-index");
    return fnv1a64(blob);
}

inline GameReport run_game(Session& s) {
    describe_scenario(s);
    while (s.game.status == GameStatus::Ongoing) {
        run_turn(s);
    }
    GameReport report;
    report.seed = s.game.rng_seed;
    report.structure = s.team.structure_id;
    report.status = s.game.status;
    report.turns_played = s.game.turn;
    report.records = s.game.history;
    report.transcript = s.transcript;
    report.retrieval_count = s.retrieval_count;
    report.config_digest = session_config_digest(s);
    return report;
}

} // namespace breachsim
