#pragma once

#include "breachsim/backend.hpp"
#include "breachsim/index.hpp"
#include "breachsim/orchestrator.hpp"
#include "breachsim/report.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>
#include <vector>

namespace breachsim {

enum class RagMode { None, Wiki, News };

inline const char* rag_mode_key(RagMode m) {
    switch (m) {
        case RagMode::None: return "none";
        case RagMode::Wiki: return "wiki";
        case RagMode::News: return "news";
    }
    return "none";
}

inline std::optional<RagMode> parse_rag_mode(std::string_view s) {
    if (s == "none") return RagMode::None;
    if (s == "wiki") return RagMode::Wiki;
    if (s == "news") return RagMode::News;
    return std::nullopt;
}

struct ExperimentConfig {
    std::vector<StructureId> structures{kAllStructures.begin(), kAllStructures.end()};
    int runs = 30;
    RagMode rag = RagMode::None;
    size_t top_k = 3;
    ChunkParams chunk_params{5000, 500};
    uint64_t base_seed = 1;
    RetrievalPolicy retrieval_policy = RetrievalPolicy::OnNoReveal;
    bool distinct_docs = false;
    int context_window = 30;
    int discussion_rounds = 1;
    int workers = 0; // 0 = hardware concurrency
    std::optional<std::string> scenario_override_path;

    void validate() const {
        std::vector<std::string> issues;
        if (runs < 1) issues.push_back("batch.runs must be >= 1");
        if (top_k < 1) issues.push_back("rag.top_k must be >= 1");
        if (structures.empty()) issues.push_back("batch.structures must be nonempty");
        if (!issues.empty()) throw ValidationError(std::move(issues));
    }

    nlohmann::json echo() const {
        nlohmann::json structures_json = nlohmann::json::array();
        for (StructureId s : structures) structures_json.push_back(structure_key(s));
        return {{"structures", structures_json},
                {"runs", runs},
                {"rag", rag_mode_key(rag)},
                {"top_k", top_k},
                {"chunk_size", chunk_params.chunk_size},
                {"overlap", chunk_params.overlap},
                {"base_seed", base_seed},
                {"retrieval_policy", static_cast<int>(retrieval_policy)},
                {"context_window", context_window},
                {"discussion_rounds", discussion_rounds}};
    }
};

struct StructureStats {
    StructureId id = StructureId::HomoCen;
    int runs = 0;
    int wins = 0;
    int losses = 0;
    int aborts = 0;
    int rate_tenths = 0;
};

struct BatchReport {
    nlohmann::json config_echo;
    std::vector<StructureStats> per_structure;
    std::vector<GameReport> games; // structure-major, then seed order
    double wall_clock_s = 0.0;     // console-only, never serialized

    const StructureStats* stats_for(StructureId id) const {
        for (const auto& s : per_structure) {
            if (s.id == id) return &s;
        }
        return nullptr;
    }
};

// Runs runs x structures games on a bounded worker pool. The seed schedule
// is seed_i = base_seed + i within every structure, so structures face the
// same scenarios; results merge in (structure, seed) order regardless of
// scheduling.
inline BatchReport run_batch(const Catalog& catalog, const PromptLibrary& prompts,
                             const ExperimentConfig& config, AgentBackend& backend,
                             const ChunkIndex* index) {
    config.validate();
    if (config.rag != RagMode::None && (!index || index->empty())) {
        throw ValidationError({"rag mode requires a built, nonempty index"});
    }

    std::optional<Scenario> override;
    if (config.scenario_override_path) {
        ScenarioFile file = load_scenario_file(*config.scenario_override_path);
        Rng est_rng(config.base_seed);
        override = scenario_from_file(catalog, file, &est_rng);
    }

    struct Job {
        size_t structure_idx;
        int run;
    };
    std::vector<Job> jobs;
    for (size_t si = 0; si < config.structures.size(); ++si) {
        for (int run = 0; run < config.runs; ++run) jobs.push_back({si, run});
    }

    std::vector<TeamConfig> teams;
    teams.reserve(config.structures.size());
    for (StructureId s : config.structures) teams.push_back(build_team(s, prompts));

    const auto started = std::chrono::steady_clock::now();
    std::vector<GameReport> games(jobs.size());
    std::atomic<size_t> next{0};

    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            const uint64_t seed = config.base_seed + static_cast<uint64_t>(job.run);

            SessionConfig scfg;
            scfg.retrieval_policy =
                config.rag == RagMode::None ? RetrievalPolicy::Never : config.retrieval_policy;
            scfg.top_k = config.top_k;
            scfg.distinct_docs = config.distinct_docs;
            scfg.context_window = config.context_window;
            scfg.discussion_rounds = config.discussion_rounds;

            Session session = make_session(catalog, teams[job.structure_idx], backend,
                                           config.rag == RagMode::None ? nullptr : index,
                                           seed, std::move(scfg), override);
            try {
                games[i] = run_game(session);
            } catch (const std::exception& e) {
                GameReport r;
                r.seed = seed;
                r.structure = config.structures[job.structure_idx];
                r.status = session.game.status;
                r.turns_played = session.game.turn;
                r.records = session.game.history;
                r.transcript = session.transcript;
                r.retrieval_count = session.retrieval_count;
                r.config_digest = session_config_digest(session);
                r.aborted = true;
                r.abort_reason = e.what();
                games[i] = std::move(r);
            }
        }
    };

    size_t nworkers = config.workers > 0
                          ? static_cast<size_t>(config.workers)
                          : std::max<size_t>(1, std::thread::hardware_concurrency());
    nworkers = std::min(nworkers, jobs.size());
    std::vector<std::thread> pool;
    for (size_t w = 0; w + 1 < nworkers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BatchReport report;
    report.config_echo = config.echo();
    report.games = std::move(games);
    report.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    for (size_t si = 0; si < config.structures.size(); ++si) {
        StructureStats stats;
        stats.id = config.structures[si];
        stats.runs = config.runs;
        for (int run = 0; run < config.runs; ++run) {
            const GameReport& g = report.games[si * static_cast<size_t>(config.runs) +
                                               static_cast<size_t>(run)];
            if (g.aborted) stats.aborts += 1;
            else if (g.status == GameStatus::Won) stats.wins += 1;
            else stats.losses += 1;
        }
        stats.rate_tenths = win_rate_tenths(stats.wins, stats.runs);
        report.per_structure.push_back(stats);
    }
    return report;
}

inline nlohmann::json batch_report_to_json(const BatchReport& report) {
    nlohmann::json doc;
    doc["config"] = report.config_echo;
    doc["structures"] = nlohmann::json::array();
    for (const auto& s : report.per_structure) {
        doc["structures"].push_back({{"structure", structure_key(s.id)},
                                     {"runs", s.runs},
                                     {"wins", s.wins},
                                     {"losses", s.losses},
                                     {"aborts", s.aborts},
                                     {"win_rate", format_tenths(s.rate_tenths)}});
    }
    doc["games"] = nlohmann::json::array();
    for (const auto& g : report.games) {
        nlohmann::json game = {{"structure", structure_key(g.structure)},
                               {"seed", g.seed},
                               {"status", status_label(g.status)},
                               {"turns", g.turns_played},
                               {"retrievals", g.retrieval_count},
                               {"config_digest", g.config_digest},
                               {"aborted", g.aborted}};
        if (g.aborted) game["abort_reason"] = g.abort_reason;
        doc["games"].push_back(std::move(game));
    }
    return doc;
}

// Rows per structure, columns Base / RAG-Wiki (+delta) / RAG-News (+delta).
// Deltas are computed on the rounded one-decimal values.
inline std::string render_winrate_table(const BatchReport& base, const BatchReport& wiki,
                                        const BatchReport& news) {
    std::ostringstream out;
    out << "| Team | Base | RAG-Wiki | RAG-News |\n";
    out << "| --- | --- | --- | --- |\n";
    for (const auto& b : base.per_structure) {
        const StructureStats* w = wiki.stats_for(b.id);
        const StructureStats* n = news.stats_for(b.id);
        if (!w || !n) {
            throw ValidationError({std::string("structure '") + structure_key(b.id) +
                                   "' missing from one of the reports"});
        }
        out << "| " << structure_label(b.id) << " | " << format_tenths(b.rate_tenths)
            << " | " << format_tenths(w->rate_tenths) << " "
            << format_delta(w->rate_tenths - b.rate_tenths) << " | "
            << format_tenths(n->rate_tenths) << " "
            << format_delta(n->rate_tenths - b.rate_tenths) << " |\n";
    }
    return out.str();
}

inline void write_manifest(const std::filesystem::path& out_dir, const BatchReport& report) {
    nlohmann::json manifest;
    manifest["config"] = report.config_echo;
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& g : report.games) seeds.push_back(g.seed);
    manifest["seeds"] = seeds;
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

// Writes reports/, transcripts/<structure>/<seed>.log, and manifest.json
// under out_dir. Nothing volatile goes into these files, so identical
// configs produce byte-identical output trees.
inline void write_batch_outputs(const std::filesystem::path& out_dir,
                                const BatchReport& report, RagMode rag) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "reports");
    fs::create_directories(out_dir / "transcripts");

    {
        std::ofstream out(out_dir / "reports" /
                          (std::string("batch_") + rag_mode_key(rag) + ".json"));
        out << batch_report_to_json(report).dump(2) << "\n";
    }
    for (const GameReport& g : report.games) {
        const fs::path dir = out_dir / "transcripts" / structure_key(g.structure);
        fs::create_directories(dir);
        std::ofstream out(dir / (std::to_string(g.seed) + ".log"));
        write_transcript(out, g);
    }
    write_manifest(out_dir, report);
}

// --- news corpus generation ---------------------------------------------------

struct NewsGenConfig {
    int count = 100;
    uint64_t seed = 0;
    bool dry_run = false;
    std::filesystem::path out_dir;
    std::string template_path;
    std::optional<std::string> exclusion_path;
    int procedures_per_story = 8; // 4 established + 4 basic
};

struct NewsGenResult {
    int written = 0;
    int failures = 0;
    std::filesystem::path manifest_path;
};

namespace detail {

inline std::string combo_key(std::vector<std::string> attacks) {
    std::sort(attacks.begin(), attacks.end());
    std::string key;
    for (const auto& a : attacks) key += a + "|";
    return key;
}

inline std::set<std::string> load_exclusions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open exclusion file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("exclusion file " + path + ": " + e.what());
    }
    const nlohmann::json& list = doc.is_object() && doc.contains("exclude")
                                     ? doc["exclude"]
                                     : doc;
    if (!list.is_array()) {
        throw ValidationError({"/exclude: expected a list of attack-card id quadruples"});
    }
    std::set<std::string> out;
    for (const auto& combo : list) {
        out.insert(combo_key(combo.get<std::vector<std::string>>()));
    }
    return out;
}

} // namespace detail

// Samples card combinations, fills the story prompt template, and either
// writes the prompts (dry run) or calls the gateway for full stories. The
// sampled combinations land in a manifest for downstream overlap checks.
inline NewsGenResult gen_news(const Catalog& catalog, const NewsGenConfig& cfg,
                              LlmGateway* gateway) {
    namespace fs = std::filesystem;
    if (!cfg.dry_run && !gateway) {
        throw std::invalid_argument("gen_news: gateway required unless dry_run");
    }
    std::ifstream tin(cfg.template_path);
    if (!tin) throw ParseError("cannot open news template: " + cfg.template_path);
    std::string tmpl((std::istreambuf_iterator<char>(tin)), std::istreambuf_iterator<char>());

    std::set<std::string> exclusions;
    if (cfg.exclusion_path) exclusions = detail::load_exclusions(*cfg.exclusion_path);

    fs::create_directories(cfg.out_dir);
    Rng rng(cfg.seed);
    nlohmann::json manifest = nlohmann::json::array();
    NewsGenResult result;

    for (int story = 0; story < cfg.count; ++story) {
        // Rejection-sample the attack combination against the exclusion list.
        std::vector<std::string> attacks;
        for (int tries = 0;; ++tries) {
            if (tries > 1000) {
                throw ValidationError(
                    {"gen_news: could not sample a non-excluded combination"});
            }
            attacks.clear();
            for (int p = 0; p < kAttackPhaseCount; ++p) {
                const auto& ids = catalog.phase_ids(static_cast<Phase>(p));
                attacks.push_back(ids[rng.below(ids.size())]);
            }
            if (!exclusions.count(detail::combo_key(attacks))) break;
        }

        std::vector<std::string> procedures = catalog.phase_ids(Phase::Procedure);
        for (size_t i = 0; i + 1 < procedures.size(); ++i) {
            const size_t j = i + rng.below(procedures.size() - i);
            std::swap(procedures[i], procedures[j]);
        }
        const size_t listed = std::min<size_t>(
            procedures.size(), static_cast<size_t>(std::max(4, cfg.procedures_per_story)));
        const size_t established = std::min<size_t>(4, listed);

        std::string attack_lines;
        for (const auto& id : attacks) {
            const Card& c = catalog.at(id);
            attack_lines += "- " + c.name + " (" + phase_label(c.phase) + ")\n";
        }
        std::string procedure_lines;
        for (size_t i = 0; i < listed; ++i) {
            const Card& c = catalog.at(procedures[i]);
            procedure_lines += "- " + c.name;
            if (i < established) procedure_lines += " (Established Procedure, +3 modifier)";
            procedure_lines += "\n";
        }

        std::string prompt = tmpl;
        auto replace_slot = [&](std::string_view slot, const std::string& value) {
            const size_t pos = prompt.find(slot);
            if (pos == std::string::npos) {
                throw ValidationError({"news template lacks the " + std::string(slot) +
                                       " placeholder"});
            }
            prompt.replace(pos, slot.size(), value);
        };
        replace_slot("{attack_cards}", attack_lines);
        replace_slot("{procedure_cards}", procedure_lines);

        char name[32];
        nlohmann::json entry;
        entry["attacks"] = attacks;
        nlohmann::json est = nlohmann::json::array();
        nlohmann::json procs = nlohmann::json::array();
        for (size_t i = 0; i < listed; ++i) {
            procs.push_back(procedures[i]);
            if (i < established) est.push_back(procedures[i]);
        }
        entry["procedures"] = procs;
        entry["established"] = est;

        if (cfg.dry_run) {
            std::snprintf(name, sizeof(name), "prompt_%03d.txt", story);
            std::ofstream out(cfg.out_dir / name);
            out << prompt;
            result.written += 1;
        } else {
            std::snprintf(name, sizeof(name), "story_%03d.txt", story);
            ChatRequest req;
            req.messages = {{"system",
                             "You write realistic cybersecurity incident reporting."},
                            {"user", prompt}};
            try {
                const std::string text = gateway->chat(req);
                std::ofstream out(cfg.out_dir / name);
                out << text;
                result.written += 1;
            } catch (const std::exception& e) {
                result.failures += 1;
                entry["error"] = e.what();
            }
        }
        entry["file"] = name;
        manifest.push_back(std::move(entry));
    }

    result.manifest_path = cfg.out_dir / "manifest.json";
    std::ofstream mout(result.manifest_path);
    mout << manifest.dump(2) << "\n";
    return result;
}

} // namespace breachsim
