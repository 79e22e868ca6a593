#pragma once

#include "breachsim/common.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace breachsim {

enum class Expertise {
    Generalist,
    EndpointSecurity,
    NetworkTraffic,
    LogBehavior,
    DeceptionContainment,
    IncidentResponse,
    Beginner,
};

enum class StructureId {
    HomoCen,
    HeteroCen,
    HomoDecen,
    HeteroDecen,
    HomoHier,
    HeteroHier,
    HomoArg,
    HeteroArg,
};

inline constexpr std::array<StructureId, 8> kAllStructures = {
    StructureId::HomoCen,  StructureId::HeteroCen,  StructureId::HomoDecen,
    StructureId::HeteroDecen, StructureId::HomoHier, StructureId::HeteroHier,
    StructureId::HomoArg,  StructureId::HeteroArg,
};

inline const char* structure_key(StructureId s) {
    switch (s) {
        case StructureId::HomoCen: return "homo_cen";
        case StructureId::HeteroCen: return "hetero_cen";
        case StructureId::HomoDecen: return "homo_decen";
        case StructureId::HeteroDecen: return "hetero_decen";
        case StructureId::HomoHier: return "homo_hier";
        case StructureId::HeteroHier: return "hetero_hier";
        case StructureId::HomoArg: return "homo_arg";
        case StructureId::HeteroArg: return "hetero_arg";
    }
    return "homo_cen";
}

inline const char* structure_label(StructureId s) {
    switch (s) {
        case StructureId::HomoCen: return "Homo. Cen.";
        case StructureId::HeteroCen: return "Hetero. Cen.";
        case StructureId::HomoDecen: return "Homo. Decen.";
        case StructureId::HeteroDecen: return "Hetero. Decen.";
        case StructureId::HomoHier: return "Homo. Hier.";
        case StructureId::HeteroHier: return "Hetero. Hier.";
        case StructureId::HomoArg: return "Homo. Arg.";
        case StructureId::HeteroArg: return "Hetero. Arg.";
    }
    return "Homo. Cen.";
}

inline std::optional<StructureId> parse_structure(std::string_view s) {
    for (StructureId id : kAllStructures) {
        if (s == structure_key(id)) return id;
    }
    return std::nullopt;
}

inline bool is_centralized(StructureId s) {
    return s == StructureId::HomoCen || s == StructureId::HeteroCen;
}

inline bool is_hierarchical(StructureId s) {
    return s == StructureId::HomoHier || s == StructureId::HeteroHier;
}

inline bool is_argumentative_structure(StructureId s) {
    return s == StructureId::HomoArg || s == StructureId::HeteroArg;
}

struct Role {
    std::string role_id;
    std::string title;
    Expertise expertise = Expertise::Generalist;
    bool is_leader = false;
    bool is_argumentative = false;
    bool is_senior = false; // speaks before beginners in hierarchical teams
    std::string prompt_text;
};

struct TeamConfig {
    StructureId structure_id = StructureId::HomoCen;
    std::vector<Role> defenders; // exactly 5
    Role captain;
    Role retrieval_agent;

    const Role* leader() const {
        for (const Role& r : defenders) {
            if (r.is_leader) return &r;
        }
        return nullptr;
    }
};

// Prompt templates live in editable files so prompt ablations need no
// rebuild. `{rules}` is substituted at load; `{game_context}` at use.
class PromptLibrary {
public:
    static PromptLibrary load(const std::string& dir) {
        PromptLibrary lib;
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) {
            throw ParseError("prompt template directory not found: " + dir);
        }
        std::string rules;
        const fs::path rules_path = fs::path(dir) / "rules.txt";
        if (fs::exists(rules_path)) rules = read_file(rules_path.string());
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
            const std::string name = entry.path().stem().string();
            if (name == "rules") continue;
            std::string text = read_file(entry.path().string());
            replace_all(text, "{rules}", rules);
            lib.templates_[name] = std::move(text);
        }
        if (lib.templates_.empty()) {
            throw ParseError("no prompt templates in directory: " + dir);
        }
        return lib;
    }

    const std::string& get(const std::string& name) const {
        auto it = templates_.find(name);
        if (it == templates_.end()) throw UnknownIdError(name, "prompt template");
        return it->second;
    }

    bool has(const std::string& name) const { return templates_.count(name) != 0; }

private:
    static std::string read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot read prompt template: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static void replace_all(std::string& text, std::string_view from, std::string_view to) {
        size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    }

    std::map<std::string, std::string> templates_;
};

inline std::string role_prompt(const Role& role, const std::string& game_context) {
    std::string out = role.prompt_text;
    const std::string_view slot = "{game_context}";
    size_t pos = 0;
    while ((pos = out.find(slot, pos)) != std::string::npos) {
        out.replace(pos, slot.size(), game_context);
        pos += game_context.size();
    }
    return out;
}

namespace detail {

struct ExpertSpec {
    Expertise expertise;
    const char* role_id;
    const char* title;
    const char* tmpl;
    const char* arg_tmpl;
    const char* arg_title;
};

// The five expert domains in their documented priority order; rosters with
// fewer than five experts take a prefix of this list.
inline const std::array<ExpertSpec, 5>& expert_specs() {
    static const std::array<ExpertSpec, 5> specs = {{
        {Expertise::EndpointSecurity, "endpoint_expert", "Endpoint Security Expert",
         "expert_endpoint", "arg_expert_endpoint", "Argumentative Endpoint Security Expert"},
        {Expertise::NetworkTraffic, "network_expert", "Network Traffic Analysis Expert",
         "expert_network", "arg_expert_network", "Argumentative Network Traffic Analysis Expert"},
        {Expertise::LogBehavior, "log_expert", "Log and Behavioral Analysis Expert",
         "expert_logs", "arg_expert_logs", "Argumentative Log and Behavioral Analysis Expert"},
        {Expertise::DeceptionContainment, "deception_expert", "Deception and Containment Expert",
         "expert_deception", "arg_expert_deception",
         "Argumentative Deception and Containment Expert"},
        {Expertise::IncidentResponse, "incident_expert", "Incident Response Expert",
         "expert_incident", "arg_expert_incident", "Argumentative Incident Response Expert"},
    }};
    return specs;
}

inline Role make_role(const PromptLibrary& prompts, std::string role_id, std::string title,
                      Expertise expertise, const std::string& tmpl) {
    Role r;
    r.role_id = std::move(role_id);
    r.title = std::move(title);
    r.expertise = expertise;
    r.prompt_text = prompts.get(tmpl);
    return r;
}

inline void validate_team(const TeamConfig& team) {
    std::vector<std::string> issues;
    if (team.defenders.size() != 5) {
        issues.push_back("team must have exactly 5 defenders, got " +
                         std::to_string(team.defenders.size()));
    }
    int leaders = 0;
    for (const Role& r : team.defenders) {
        if (r.is_leader) ++leaders;
        if (r.prompt_text.empty()) {
            issues.push_back("role '" + r.role_id + "' has an empty prompt");
        }
        if (r.is_argumentative) {
            const std::string p = to_lower(r.prompt_text);
            const bool has_clause = p.find("challenge") != std::string::npos ||
                                    p.find("objection") != std::string::npos ||
                                    p.find("counterpoint") != std::string::npos ||
                                    p.find("opposing") != std::string::npos ||
                                    p.find("question") != std::string::npos ||
                                    p.find("probe") != std::string::npos;
            if (!has_clause) {
                issues.push_back("argumentative role '" + r.role_id +
                                 "' lacks a challenge-peers responsibility clause");
            }
        }
    }
    if (leaders > 1) issues.push_back("more than one leader in the roster");
    if (is_centralized(team.structure_id) != (leaders == 1)) {
        issues.push_back("leader present iff structure is centralized: violated");
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

} // namespace detail

inline TeamConfig build_team(StructureId structure, const PromptLibrary& prompts) {
    using detail::make_role;
    TeamConfig team;
    team.structure_id = structure;
    team.captain = make_role(prompts, "captain", "Incident Captain", Expertise::Generalist,
                             "captain");
    team.retrieval_agent = make_role(prompts, "retrieval", "Retrieval Agent",
                                     Expertise::Generalist, "retrieval_agent");

    const auto& experts = detail::expert_specs();
    const bool argumentative = is_argumentative_structure(structure);

    auto add_generalists = [&](int count, bool senior) {
        for (int i = 1; i <= count; ++i) {
            Role r;
            if (senior) {
                r = make_role(prompts, "senior_" + std::to_string(i),
                              "Senior Generalist " + std::to_string(i), Expertise::Generalist,
                              "generalist_senior");
                r.is_senior = true;
            } else if (argumentative) {
                r = make_role(prompts, "generalist_" + std::to_string(i),
                              "Argumentative Team Member " + std::to_string(i),
                              Expertise::Generalist, "arg_generalist");
            } else {
                r = make_role(prompts, "generalist_" + std::to_string(i),
                              "Generalist Member " + std::to_string(i), Expertise::Generalist,
                              "generalist");
            }
            team.defenders.push_back(std::move(r));
        }
    };

    auto add_experts = [&](int count) {
        for (int i = 0; i < count; ++i) {
            const auto& spec = experts[static_cast<size_t>(i)];
            Role r = argumentative
                         ? make_role(prompts, spec.role_id, spec.arg_title, spec.expertise,
                                     spec.arg_tmpl)
                         : make_role(prompts, spec.role_id, spec.title, spec.expertise,
                                     spec.tmpl);
            r.is_senior = true;
            team.defenders.push_back(std::move(r));
        }
    };

    auto add_beginners = [&](int count) {
        for (int i = 1; i <= count; ++i) {
            Role r = make_role(prompts, "beginner_" + std::to_string(i),
                               "Beginner Analyst " + std::to_string(i), Expertise::Beginner,
                               "beginner");
            team.defenders.push_back(std::move(r));
        }
    };

    switch (structure) {
        case StructureId::HomoCen: {
            Role leader = make_role(prompts, "leader", "Team Leader", Expertise::Generalist,
                                    "team_leader");
            leader.is_leader = true;
            leader.is_senior = true;
            team.defenders.push_back(std::move(leader));
            add_generalists(4, false);
            break;
        }
        case StructureId::HeteroCen: {
            Role leader = make_role(prompts, "leader", "Team Leader", Expertise::Generalist,
                                    "team_leader");
            leader.is_leader = true;
            leader.is_senior = true;
            team.defenders.push_back(std::move(leader));
            add_experts(4);
            break;
        }
        case StructureId::HomoDecen:
        case StructureId::HomoArg:
            add_generalists(5, false);
            break;
        case StructureId::HeteroDecen:
        case StructureId::HeteroArg:
            add_experts(5);
            break;
        case StructureId::HomoHier:
            add_generalists(3, true);
            add_beginners(2);
            break;
        case StructureId::HeteroHier:
            add_experts(3);
            add_beginners(2);
            break;
    }

    if (argumentative) {
        for (Role& r : team.defenders) r.is_argumentative = true;
    }

    detail::validate_team(team);
    return team;
}

} // namespace breachsim
