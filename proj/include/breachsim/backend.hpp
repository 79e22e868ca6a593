#pragma once

#include "breachsim/cards.hpp"
#include "breachsim/common.hpp"
#include "breachsim/engine.hpp"
#include "breachsim/gateway.hpp"
#include "breachsim/team.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace breachsim {

enum class MessageKind {
    Scenario,
    Discussion,
    Decision,
    Outcome,
    RetrievalQuery,
    RetrievalResult,
};

inline const char* message_kind_key(MessageKind k) {
    switch (k) {
        case MessageKind::Scenario: return "scenario";
        case MessageKind::Discussion: return "discussion";
        case MessageKind::Decision: return "decision";
        case MessageKind::Outcome: return "outcome";
        case MessageKind::RetrievalQuery: return "retrieval_query";
        case MessageKind::RetrievalResult: return "retrieval_result";
    }
    return "discussion";
}

struct Message {
    std::string speaker; // role_id
    int turn = 0;
    MessageKind kind = MessageKind::Discussion;
    std::string text;
    // Logical sequence number, not wall clock, so transcripts replay
    // byte-identically.
    uint64_t timestamp = 0;
};

enum class TaskPurpose { Describe, Discuss, Decide, Query };

// Public and (for the captain / scripted agents) hidden game state handed to
// a backend alongside the conversation window.
struct GameView {
    const Catalog* catalog = nullptr;
    int turn = 0;
    uint64_t seed = 0;
    std::vector<std::string> revealed; // ids, reveal order
    std::vector<std::string> established;
    std::optional<Scenario> hidden;
    std::optional<std::string> forced_procedure;
    std::string last_procedure; // id of the most recent attempt, if any
};

struct AgentTask {
    TaskPurpose purpose = TaskPurpose::Discuss;
    const Role* role = nullptr;
    std::span<const Message> window;
    GameView view;
    std::string game_context; // public-state summary substituted into prompts
    int attempt = 1;          // >1 on decision-extraction retries
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual std::string respond(const AgentTask& task) = 0;
    virtual std::string name() const = 0;
};

// --- decision-line parsing -------------------------------------------------

// The deciding agent ends its message with `DECISION: <procedure name>`;
// matching is case- and punctuation-insensitive over catalog names and ids.
inline std::optional<std::string> parse_decision(const std::string& text,
                                                 const Catalog& catalog) {
    std::optional<std::string> candidate;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = normalize_name(text.substr(pos, eol - pos));
        if (line.rfind("decision", 0) == 0) {
            std::string rest = line.substr(8);
            while (!rest.empty() && rest.front() == ' ') rest.erase(rest.begin());
            if (!rest.empty()) candidate = rest;
        }
        if (eol == text.size()) break;
        pos = eol + 1;
    }
    if (!candidate) return std::nullopt;

    const auto& procedures = catalog.phase_ids(Phase::Procedure);
    for (const auto& id : procedures) {
        const Card& c = catalog.at(id);
        if (*candidate == normalize_name(c.name) || *candidate == normalize_name(c.id)) {
            return id;
        }
    }
    // Fall back to a unique substring match ("network threat hunting" for the
    // full Zeek/RITA card name, and similar shorthands).
    std::optional<std::string> match;
    for (const auto& id : procedures) {
        const Card& c = catalog.at(id);
        const std::string norm = normalize_name(c.name);
        if (candidate->find(norm) != std::string::npos ||
            norm.find(*candidate) != std::string::npos) {
            if (match && *match != id) return std::nullopt; // ambiguous
            match = id;
        }
    }
    return match;
}

struct Preference {
    std::string speaker;
    std::string procedure_id;
    size_t order = 0; // speaking order of the first proposal
};

// Majority over final stated preferences; ties break toward the procedure
// proposed earliest.
inline std::optional<std::string> majority_choice(const std::vector<Preference>& prefs) {
    if (prefs.empty()) return std::nullopt;
    std::map<std::string, std::string> last_by_speaker_key; // speaker -> proc
    std::vector<std::string> speaker_order;
    for (const auto& p : prefs) {
        if (!last_by_speaker_key.count(p.speaker)) speaker_order.push_back(p.speaker);
        last_by_speaker_key[p.speaker] = p.procedure_id;
    }
    std::map<std::string, int> counts;
    std::map<std::string, size_t> first_seen;
    for (const auto& p : prefs) {
        if (!first_seen.count(p.procedure_id)) first_seen[p.procedure_id] = p.order;
    }
    for (const auto& s : speaker_order) counts[last_by_speaker_key[s]] += 1;

    std::optional<std::string> best;
    for (const auto& [proc, count] : counts) {
        if (!best) {
            best = proc;
            continue;
        }
        const int best_count = counts[*best];
        if (count > best_count ||
            (count == best_count && first_seen[proc] < first_seen[*best])) {
            best = proc;
        }
    }
    return best;
}

// --- scripted backend --------------------------------------------------------

enum class ScriptedPolicy {
    // Deterministic pseudo-random procedure preferences; games are winnable
    // but not gamed.
    RotatingHeuristic,
    // Always proposes a procedure that can reveal an unrevealed card.
    AlwaysDetecting,
};

// Pure function of (task, policy): no internal state, safe to share across
// concurrently running sessions.
class ScriptedBackend final : public AgentBackend {
public:
    explicit ScriptedBackend(ScriptedPolicy policy = ScriptedPolicy::RotatingHeuristic)
        : policy_(policy) {}

    std::string name() const override { return "scripted"; }

    std::string respond(const AgentTask& task) override {
        switch (task.purpose) {
            case TaskPurpose::Describe: return describe(task);
            case TaskPurpose::Discuss: return discuss(task);
            case TaskPurpose::Decide: return decide(task);
            case TaskPurpose::Query: return query(task);
        }
        return "";
    }

private:
    static uint64_t task_hash(const AgentTask& task) {
        uint64_t h = task.view.seed;
        h = hash_combine(h, static_cast<uint64_t>(task.view.turn));
        h = hash_combine(h, fnv1a64(task.role ? task.role->role_id : ""));
        h = hash_combine(h, static_cast<uint64_t>(task.view.revealed.size()));
        return h;
    }

    std::string preferred_procedure(const AgentTask& task) const {
        const Catalog& cat = *task.view.catalog;
        if (task.view.forced_procedure) return *task.view.forced_procedure;
        const auto& procedures = cat.phase_ids(Phase::Procedure);
        if (policy_ == ScriptedPolicy::AlwaysDetecting && task.view.hidden) {
            for (const auto& pid : procedures) {
                const auto& det = cat.detection_set(pid);
                for (const auto& attack : task.view.hidden->attack_cards) {
                    const bool revealed =
                        std::find(task.view.revealed.begin(), task.view.revealed.end(),
                                  attack) != task.view.revealed.end();
                    if (!revealed &&
                        std::find(det.begin(), det.end(), attack) != det.end()) {
                        return pid;
                    }
                }
            }
        }
        return procedures[task_hash(task) % procedures.size()];
    }

    std::string describe(const AgentTask& task) const {
        const Catalog& cat = *task.view.catalog;
        std::string detail = "Monitoring has flagged unusual activity.";
        if (task.view.hidden) {
            detail = cat.at(task.view.hidden->attack_cards[0]).description;
        }
        return "Incident alert: " + detail +
               " Initial indications suggest this is only the first stage of a broader "
               "intrusion. Investigate and uncover the full attack path.";
    }

    std::string discuss(const AgentTask& task) const {
        // Leaders synthesize the members' preferences rather than free-pick.
        if (task.role && task.role->is_leader) return decide(task);
        const Catalog& cat = *task.view.catalog;
        const std::string pid = preferred_procedure(task);
        const std::string& name = cat.at(pid).name;
        static const char* openers[] = {
            "Given what we know so far, %s looks most promising to me.",
            "I'd run %s this turn.",
            "My read of the telemetry points to %s.",
            "Nothing conclusive yet; let's try %s next.",
        };
        static const char* challengers[] = {
            "I'm not sure the previous suggestion holds up; %s covers a blind spot.",
            "Playing devil's advocate here: %s would test a different hypothesis.",
        };
        const uint64_t h = task_hash(task);
        const char* fmt = (task.role && task.role->is_argumentative && task.view.turn > 1)
                              ? challengers[h % std::size(challengers)]
                              : openers[h % std::size(openers)];
        char line[256];
        std::snprintf(line, sizeof(line), fmt, name.c_str());
        return std::string(line) + "\nDECISION: " + name;
    }

    std::string decide(const AgentTask& task) const {
        const Catalog& cat = *task.view.catalog;
        // Tally the team's current-turn preferences, then fall back to the
        // leader's own pick.
        std::vector<Preference> prefs;
        size_t order = 0;
        for (const Message& m : task.window) {
            if (m.turn != task.view.turn || m.kind != MessageKind::Discussion) continue;
            if (task.role && m.speaker == task.role->role_id) continue;
            if (auto pid = parse_decision(m.text, cat)) {
                prefs.push_back({m.speaker, *pid, order++});
            }
        }
        std::string pid;
        if (auto choice = majority_choice(prefs)) {
            pid = *choice;
        } else {
            pid = preferred_procedure(task);
        }
        const std::string& name = cat.at(pid).name;
        return "Weighing the team's input, we go with " + name + ".\nDECISION: " + name;
    }

    std::string query(const AgentTask& task) const {
        // Last procedure name + revealed card names + scenario keywords.
        const Catalog& cat = *task.view.catalog;
        std::string q;
        if (!task.view.last_procedure.empty()) q += cat.at(task.view.last_procedure).name;
        for (const auto& id : task.view.revealed) {
            if (!q.empty()) q += " ";
            q += cat.at(id).name;
        }
        if (task.view.hidden) {
            if (!q.empty()) q += " ";
            q += cat.at(task.view.hidden->attack_cards[0]).description;
        }
        return q.empty() ? "incident response investigation" : q;
    }

    ScriptedPolicy policy_;
};

// --- remote backend ----------------------------------------------------------

class RemoteBackend final : public AgentBackend {
public:
    explicit RemoteBackend(LlmGateway& gateway) : gateway_(gateway) {}

    std::string name() const override { return "remote"; }

    std::string respond(const AgentTask& task) override {
        ChatRequest req;
        req.temperature = gateway_.config().temperature;
        req.messages.push_back({"system", role_prompt(*task.role, task.game_context)});
        for (const Message& m : task.window) {
            const bool own = task.role && m.speaker == task.role->role_id;
            req.messages.push_back({own ? "assistant" : "user",
                                    "[turn " + std::to_string(m.turn) + "] " + m.speaker +
                                        ": " + m.text});
        }
        req.messages.push_back({"user", instruction(task)});
        return gateway_.chat(req);
    }

private:
    static std::string procedure_menu(const GameView& view) {
        const Catalog& cat = *view.catalog;
        std::string out;
        for (const auto& id : cat.phase_ids(Phase::Procedure)) {
            out += "- " + cat.at(id).name;
            if (std::find(view.established.begin(), view.established.end(), id) !=
                view.established.end()) {
                out += " (Established Procedure, +3 modifier)";
            }
            out += "\n";
        }
        return out;
    }

    std::string instruction(const AgentTask& task) const {
        const Catalog& cat = *task.view.catalog;
        switch (task.purpose) {
            case TaskPurpose::Describe: {
                std::string card_brief;
                if (task.view.hidden) {
                    const Card& ic = cat.at(task.view.hidden->attack_cards[0]);
                    card_brief = ic.name + ": " + ic.description;
                }
                return "The hidden initial compromise is \"" + card_brief +
                       "\". Open the exercise: describe the situation to the defenders in "
                       "a few sentences. Do not name this or any other card, and do not "
                       "give direct clues; provide context only.";
            }
            case TaskPurpose::Discuss:
                return "It is turn " + std::to_string(task.view.turn) +
                       ". Briefly discuss which procedure the team should run, then end "
                       "your message with a single line 'DECISION: <procedure name>' "
                       "stating your preference.\nProcedures:\n" +
                       procedure_menu(task.view);
            case TaskPurpose::Decide: {
                std::string prefix =
                    task.attempt > 1
                        ? "Your previous message did not name a valid procedure. "
                        : "";
                return prefix +
                       "Make the team's final call for turn " +
                       std::to_string(task.view.turn) +
                       ". End your message with a single line 'DECISION: <procedure "
                       "name>'.\nProcedures:\n" +
                       procedure_menu(task.view);
            }
            case TaskPurpose::Query:
                return "Compose one concise retrieval query (keywords only, one line) "
                       "that would help the team decide what to investigate next.";
        }
        return "";
    }

    LlmGateway& gateway_;
};

} // namespace breachsim
