#pragma once

#include "breachsim/common.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace breachsim {

enum class Phase {
    InitialCompromise = 0,
    PivotEscalate = 1,
    C2Exfil = 2,
    Persistence = 3,
    Procedure = 4,
};

inline constexpr int kAttackPhaseCount = 4;

inline const char* phase_key(Phase p) {
    switch (p) {
        case Phase::InitialCompromise: return "initial_compromise";
        case Phase::PivotEscalate: return "pivot_escalate";
        case Phase::C2Exfil: return "c2_exfil";
        case Phase::Persistence: return "persistence";
        case Phase::Procedure: return "procedure";
    }
    return "procedure";
}

inline const char* phase_label(Phase p) {
    switch (p) {
        case Phase::InitialCompromise: return "Initial Compromise";
        case Phase::PivotEscalate: return "Pivot and Escalate";
        case Phase::C2Exfil: return "C2 and Exfiltration";
        case Phase::Persistence: return "Persistence";
        case Phase::Procedure: return "Procedure";
    }
    return "Procedure";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
    for (Phase p : {Phase::InitialCompromise, Phase::PivotEscalate, Phase::C2Exfil,
                    Phase::Persistence, Phase::Procedure}) {
        if (s == phase_key(p)) return p;
    }
    return std::nullopt;
}

struct Card {
    std::string id;
    std::string name;
    Phase phase = Phase::Procedure;
    std::string description;

    bool is_attack() const { return phase != Phase::Procedure; }
};

// Immutable after load; safe for unrestricted concurrent reads.
class Catalog {
public:
    const std::vector<Card>& cards() const { return cards_; }

    const Card* find(const std::string& id) const {
        auto it = by_id_.find(id);
        return it == by_id_.end() ? nullptr : &cards_[it->second];
    }

    const Card& at(const std::string& id) const {
        const Card* c = find(id);
        if (!c) throw UnknownIdError(id, "card");
        return *c;
    }

    // Card ids of one phase, in file order.
    const std::vector<std::string>& phase_ids(Phase p) const {
        return phase_ids_[static_cast<size_t>(p)];
    }

    size_t phase_count(Phase p) const { return phase_ids(p).size(); }

    size_t size() const { return cards_.size(); }

    // Attack card ids revealable by a procedure, sorted ascending. Empty for
    // response-only procedures.
    const std::vector<std::string>& detection_set(const std::string& procedure_id) const {
        const Card& c = at(procedure_id);
        if (c.phase != Phase::Procedure) throw UnknownIdError(procedure_id, "procedure");
        auto it = detection_.find(procedure_id);
        if (it == detection_.end()) {
            static const std::vector<std::string> empty;
            return empty;
        }
        return it->second;
    }

    const std::map<std::string, std::vector<std::string>>& detection_map() const {
        return detection_;
    }

    bool operator==(const Catalog& other) const {
        if (cards_.size() != other.cards_.size()) return false;
        for (size_t i = 0; i < cards_.size(); ++i) {
            const Card& a = cards_[i];
            const Card& b = other.cards_[i];
            if (a.id != b.id || a.name != b.name || a.phase != b.phase ||
                a.description != b.description) {
                return false;
            }
        }
        return detection_ == other.detection_;
    }

    static Catalog from_json(const nlohmann::json& doc);

private:
    std::vector<Card> cards_;
    std::unordered_map<std::string, size_t> by_id_;
    std::array<std::vector<std::string>, 5> phase_ids_;
    std::map<std::string, std::vector<std::string>> detection_;
};

inline Catalog Catalog::from_json(const nlohmann::json& doc) {
    std::vector<std::string> issues;
    Catalog cat;

    if (!doc.is_object()) {
        throw ValidationError({"/: expected a top-level object with 'cards' and 'detection'"});
    }
    if (!doc.contains("cards") || !doc["cards"].is_array()) {
        issues.push_back("/cards: missing or not a list");
    }
    if (!doc.contains("detection") || !doc["detection"].is_object()) {
        issues.push_back("/detection: missing or not a map");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    size_t idx = 0;
    for (const auto& entry : doc["cards"]) {
        const std::string path = "/cards/" + std::to_string(idx);
        ++idx;
        if (!entry.is_object()) {
            issues.push_back(path + ": expected an object");
            continue;
        }
        Card card;
        if (!entry.contains("id") || !entry["id"].is_string() ||
            entry["id"].get<std::string>().empty()) {
            issues.push_back(path + "/id: missing or empty");
            continue;
        }
        card.id = entry["id"].get<std::string>();
        if (!entry.contains("name") || !entry["name"].is_string() ||
            entry["name"].get<std::string>().empty()) {
            issues.push_back(path + "/name: missing or empty");
        } else {
            card.name = entry["name"].get<std::string>();
        }
        if (!entry.contains("phase") || !entry["phase"].is_string()) {
            issues.push_back(path + "/phase: missing");
        } else if (auto p = parse_phase(entry["phase"].get<std::string>())) {
            card.phase = *p;
        } else {
            issues.push_back(path + "/phase: unknown phase '" +
                             entry["phase"].get<std::string>() + "'");
        }
        if (entry.contains("description") && entry["description"].is_string()) {
            card.description = entry["description"].get<std::string>();
        }

        if (cat.by_id_.count(card.id)) {
            issues.push_back(path + "/id: duplicate card id '" + card.id + "'");
            continue;
        }
        cat.by_id_[card.id] = cat.cards_.size();
        cat.phase_ids_[static_cast<size_t>(card.phase)].push_back(card.id);
        cat.cards_.push_back(std::move(card));
    }

    for (const auto& [proc_id, targets] : doc["detection"].items()) {
        const std::string path = "/detection/" + proc_id;
        const Card* proc = cat.find(proc_id);
        if (!proc) {
            issues.push_back(path + ": unknown card id");
            continue;
        }
        if (proc->phase != Phase::Procedure) {
            issues.push_back(path + ": '" + proc_id + "' is not a procedure card");
            continue;
        }
        if (!targets.is_array()) {
            issues.push_back(path + ": expected a list of attack card ids");
            continue;
        }
        std::vector<std::string> ids;
        size_t ti = 0;
        for (const auto& t : targets) {
            const std::string tpath = path + "/" + std::to_string(ti);
            ++ti;
            if (!t.is_string()) {
                issues.push_back(tpath + ": expected a card id string");
                continue;
            }
            const std::string tid = t.get<std::string>();
            const Card* target = cat.find(tid);
            if (!target) {
                issues.push_back(tpath + ": unknown card id '" + tid + "'");
                continue;
            }
            if (!target->is_attack()) {
                issues.push_back(tpath + ": '" + tid + "' is a procedure, not an attack card");
                continue;
            }
            ids.push_back(tid);
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        cat.detection_[proc_id] = std::move(ids);
    }

    // Every attack card must be revealable by at least one procedure,
    // otherwise scenarios containing it can never be won.
    for (const Card& card : cat.cards_) {
        if (!card.is_attack()) continue;
        bool covered = false;
        for (const auto& [proc, ids] : cat.detection_) {
            if (std::find(ids.begin(), ids.end(), card.id) != ids.end()) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            issues.push_back("/detection: undetectable attack card '" + card.id + "'");
        }
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return cat;
}

inline Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open card file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("card file " + path + ": " + e.what());
    }
    return Catalog::from_json(doc);
}

inline const std::vector<std::string>& detection_set(const Catalog& catalog,
                                                     const std::string& procedure_id) {
    return catalog.detection_set(procedure_id);
}

} // namespace breachsim
