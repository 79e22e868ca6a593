#include "breachsim/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace breachsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

struct AppConfig {
    // engine
    std::string cards_path = "data/cards.json";
    // team
    std::string prompts_dir = "data/prompts";
    int discussion_rounds = 1;
    int context_window = 30;
    // rag
    std::string wiki_corpus = "data/corpora/wiki_sample";
    std::string news_corpus = "data/corpora/news_sample";
    std::vector<size_t> top_k = {3};        // lists express ablation sweeps
    std::vector<size_t> chunk_size = {5000};
    size_t overlap = 500;
    size_t dimension = 512;
    bool distinct_docs = false;
    // gateway
    GatewayConfig gateway;
    // batch
    int runs = 30;
    uint64_t base_seed = 1;
    int workers = 0;
};

template <typename T>
T get_field(const nlohmann::json& section, const std::string& section_name,
            const std::string& key, T fallback) {
    if (!section.contains(key)) return fallback;
    try {
        return section.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError({section_name + "." + key + ": wrong type"});
    }
}

// Scalar or list; lists express ablation sweep matrices.
std::vector<size_t> get_size_list(const nlohmann::json& section,
                                  const std::string& section_name, const std::string& key,
                                  std::vector<size_t> fallback) {
    if (!section.contains(key)) return fallback;
    const auto& value = section.at(key);
    try {
        if (value.is_array()) return value.get<std::vector<size_t>>();
        return {value.get<size_t>()};
    } catch (const nlohmann::json::exception&) {
        throw ValidationError({section_name + "." + key + ": expected integer or list"});
    }
}

std::vector<size_t> parse_size_list(const std::string& arg, const std::string& what) {
    std::vector<size_t> out;
    size_t pos = 0;
    while (pos <= arg.size()) {
        size_t comma = arg.find(',', pos);
        if (comma == std::string::npos) comma = arg.size();
        const std::string token = arg.substr(pos, comma - pos);
        if (!token.empty()) {
            try {
                out.push_back(static_cast<size_t>(std::stoull(token)));
            } catch (const std::exception&) {
                throw ValidationError({what + ": '" + token + "' is not a positive integer"});
            }
        }
        pos = comma + 1;
        if (comma == arg.size()) break;
    }
    if (out.empty()) throw ValidationError({what + ": empty list"});
    return out;
}

RetrievalPolicy parse_policy(const std::string& arg) {
    if (arg == "on_no_reveal") return RetrievalPolicy::OnNoReveal;
    if (arg == "on_failure") return RetrievalPolicy::OnFailureOnly;
    if (arg == "never") return RetrievalPolicy::Never;
    throw ValidationError({"unknown retrieval policy '" + arg +
                           "' (on_no_reveal|on_failure|never)"});
}

AppConfig load_app_config(const std::string& path) {
    AppConfig cfg;
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
    const nlohmann::json empty = nlohmann::json::object();
    const auto& engine = doc.value("engine", empty);
    cfg.cards_path = get_field(engine, "engine", "cards", cfg.cards_path);

    const auto& team = doc.value("team", empty);
    cfg.prompts_dir = get_field(team, "team", "prompts", cfg.prompts_dir);
    cfg.discussion_rounds = get_field(team, "team", "discussion_rounds", cfg.discussion_rounds);
    cfg.context_window = get_field(team, "team", "context_window", cfg.context_window);

    const auto& rag = doc.value("rag", empty);
    cfg.wiki_corpus = get_field(rag, "rag", "wiki_corpus", cfg.wiki_corpus);
    cfg.news_corpus = get_field(rag, "rag", "news_corpus", cfg.news_corpus);
    cfg.top_k = get_size_list(rag, "rag", "top_k", cfg.top_k);
    cfg.chunk_size = get_size_list(rag, "rag", "chunk_size", cfg.chunk_size);
    cfg.overlap = get_field(rag, "rag", "overlap", cfg.overlap);
    cfg.dimension = get_field(rag, "rag", "dimension", cfg.dimension);
    cfg.distinct_docs = get_field(rag, "rag", "distinct_docs", cfg.distinct_docs);

    const auto& gw = doc.value("gateway", empty);
    cfg.gateway.base_url = get_field(gw, "gateway", "base_url", cfg.gateway.base_url);
    cfg.gateway.model = get_field(gw, "gateway", "model", cfg.gateway.model);
    cfg.gateway.temperature = get_field(gw, "gateway", "temperature",
                                        cfg.gateway.temperature);
    cfg.gateway.api_key_env = get_field(gw, "gateway", "api_key_env",
                                        cfg.gateway.api_key_env);
    cfg.gateway.max_concurrent = get_field(gw, "gateway", "max_concurrent",
                                           cfg.gateway.max_concurrent);
    if (gw.contains("retry")) {
        const auto& retry = gw.at("retry");
        cfg.gateway.retry.max_attempts = get_field(retry, "gateway.retry", "max_attempts",
                                                   cfg.gateway.retry.max_attempts);
        cfg.gateway.retry.base_delay_s = get_field(retry, "gateway.retry", "base_delay_s",
                                                   cfg.gateway.retry.base_delay_s);
        cfg.gateway.retry.factor = get_field(retry, "gateway.retry", "factor",
                                             cfg.gateway.retry.factor);
        cfg.gateway.retry.jitter = get_field(retry, "gateway.retry", "jitter",
                                             cfg.gateway.retry.jitter);
    }

    const auto& batch = doc.value("batch", empty);
    cfg.runs = get_field(batch, "batch", "runs", cfg.runs);
    cfg.base_seed = get_field(batch, "batch", "base_seed", cfg.base_seed);
    cfg.workers = get_field(batch, "batch", "workers", cfg.workers);
    return cfg;
}

std::vector<StructureId> parse_structures(const std::string& arg) {
    std::vector<StructureId> out;
    if (arg == "all") {
        out.assign(kAllStructures.begin(), kAllStructures.end());
        return out;
    }
    size_t pos = 0;
    while (pos <= arg.size()) {
        size_t comma = arg.find(',', pos);
        if (comma == std::string::npos) comma = arg.size();
        const std::string token = arg.substr(pos, comma - pos);
        if (!token.empty()) {
            auto id = parse_structure(token);
            if (!id) {
                throw ValidationError({"unknown team structure '" + token +
                                       "' (expected homo_cen, hetero_cen, homo_decen, "
                                       "hetero_decen, homo_hier, hetero_hier, homo_arg, "
                                       "hetero_arg, or all)"});
            }
            out.push_back(*id);
        }
        pos = comma + 1;
        if (comma == arg.size()) break;
    }
    if (out.empty()) throw ValidationError({"no team structures selected"});
    return out;
}

struct RagSetup {
    std::optional<ChunkIndex> index;
    const ChunkIndex* ptr = nullptr;
};

RagSetup build_rag(const AppConfig& app, RagMode mode, const std::string& index_path,
                   size_t chunk_size) {
    RagSetup setup;
    if (mode == RagMode::None) return setup;
    auto embedder = std::make_shared<HashedNgramEmbedder>(app.dimension);
    if (!index_path.empty()) {
        setup.index = ChunkIndex::load(index_path, embedder);
    } else {
        const std::string dir = mode == RagMode::Wiki ? app.wiki_corpus : app.news_corpus;
        IngestReport report;
        setup.index = ingest_corpus(dir, {chunk_size, app.overlap}, embedder, &report);
        std::cerr << "ingested " << report.documents << " documents (" << report.chunks
                  << " chunks) from " << dir << "\n";
        for (const auto& skipped : report.skipped) {
            std::cerr << "warning: skipped unreadable file: " << skipped << "\n";
        }
    }
    setup.ptr = &*setup.index;
    return setup;
}

struct BackendSetup {
    std::unique_ptr<LlmGateway> gateway;
    std::unique_ptr<AgentBackend> backend;
};

BackendSetup build_backend(const AppConfig& app, const std::string& kind,
                           const std::string& policy) {
    BackendSetup setup;
    if (kind == "scripted") {
        ScriptedPolicy p = ScriptedPolicy::RotatingHeuristic;
        if (policy == "detecting") p = ScriptedPolicy::AlwaysDetecting;
        else if (policy != "rotating") {
            throw ValidationError({"unknown scripted policy '" + policy + "'"});
        }
        setup.backend = std::make_unique<ScriptedBackend>(p);
    } else if (kind == "remote") {
        setup.gateway = std::make_unique<LlmGateway>(app.gateway);
        setup.backend = std::make_unique<RemoteBackend>(*setup.gateway);
    } else {
        throw ValidationError({"unknown backend '" + kind + "' (scripted|remote)"});
    }
    return setup;
}

void print_game_summary(const Catalog& catalog, const GameReport& report, TableFormat format) {
    std::cout << render_trajectory(catalog, report.records, format);
    std::cout << "\nResult: " << status_label(report.status) << " after "
              << report.turns_played << " turns, " << report.retrieval_count
              << " retrievals (seed " << report.seed << ")\n";
}

BatchReport load_batch_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open batch report: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("batch report " + path + ": " + e.what());
    }
    BatchReport report;
    report.config_echo = doc.value("config", nlohmann::json::object());
    for (const auto& entry : doc.value("structures", nlohmann::json::array())) {
        StructureStats stats;
        auto id = parse_structure(entry.value("structure", ""));
        if (!id) throw ValidationError({"structures: unknown structure in " + path});
        stats.id = *id;
        stats.runs = entry.value("runs", 0);
        stats.wins = entry.value("wins", 0);
        stats.losses = entry.value("losses", 0);
        stats.aborts = entry.value("aborts", 0);
        stats.rate_tenths = win_rate_tenths(stats.wins, std::max(1, stats.runs));
        report.per_structure.push_back(stats);
    }
    return report;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incident-response tabletop simulator with retrieval-augmented agents"};
    app.require_subcommand(1);

    // --config is honored before the rest of the flags so file values become
    // the defaults that explicit flags then override.
    AppConfig cfg;
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    try {
        if (!config_path.empty()) cfg = load_app_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    app.add_option("--config", config_path, "JSON config file (sections engine/team/rag/gateway/batch)");

    // Shared options.
    std::string cards_path = cfg.cards_path;
    std::string prompts_dir = cfg.prompts_dir;
    std::string structure_arg = "homo_cen";
    std::string rag_arg = "none";
    std::string backend_arg = "scripted";
    std::string policy_arg = "rotating";
    std::string out_dir;
    std::string index_path;
    std::string format_arg = "md";
    std::string scenario_path;
    uint64_t seed = cfg.base_seed;
    int runs = cfg.runs;
    int workers = cfg.workers;
    std::string top_k_arg;
    std::string chunk_size_arg;
    std::string policy_name = "on_no_reveal";
    bool distinct_docs = cfg.distinct_docs;
    size_t overlap = cfg.overlap;

    auto add_common = [&](CLI::App* sub, bool with_rag) {
        sub->add_option("--cards", cards_path, "card catalog file")->capture_default_str();
        sub->add_option("--prompts", prompts_dir, "prompt template directory")
            ->capture_default_str();
        if (with_rag) {
            sub->add_option("--rag", rag_arg, "retrieval corpus: none|wiki|news")
                ->capture_default_str();
            sub->add_option("--top-k", top_k_arg,
                            "retrieved passages per query (comma list sweeps)");
            sub->add_option("--chunk-size", chunk_size_arg,
                            "chunk size in characters (comma list sweeps)");
            sub->add_option("--overlap", overlap, "chunk overlap in characters")
                ->capture_default_str();
            sub->add_option("--retrieval-policy", policy_name,
                            "on_no_reveal|on_failure|never")
                ->capture_default_str();
            sub->add_flag("--distinct-docs", distinct_docs,
                          "dedupe retrieved passages to distinct documents");
            sub->add_option("--index", index_path, "load a saved index instead of ingesting");
        }
        sub->add_option("--backend", backend_arg, "agent backend: scripted|remote")
            ->capture_default_str();
        sub->add_option("--policy", policy_arg, "scripted policy: rotating|detecting")
            ->capture_default_str();
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Play a single game");
    run_cmd->add_option("--seed", seed, "game seed")->capture_default_str();
    run_cmd->add_option("--structure", structure_arg, "team structure id")
        ->capture_default_str();
    run_cmd->add_option("--scenario", scenario_path, "scenario override file");
    run_cmd->add_option("--format", format_arg, "trajectory format: md|csv")
        ->capture_default_str();
    add_common(run_cmd, true);

    CLI::App* batch_cmd = app.add_subcommand("batch", "Run a batch of games and aggregate");
    batch_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
    batch_cmd->add_option("--runs", runs, "games per structure")->capture_default_str();
    batch_cmd->add_option("--structure", structure_arg,
                          "comma-separated structure ids, or 'all'")
        ->capture_default_str();
    batch_cmd->add_option("--workers", workers, "worker threads (0 = auto)")
        ->capture_default_str();
    batch_cmd->add_option("--scenario", scenario_path, "scenario override file");
    add_common(batch_cmd, true);

    CLI::App* ingest_cmd = app.add_subcommand("ingest", "Chunk and embed a corpus directory");
    std::string corpus_dir;
    std::string out_index = "index.json";
    size_t dimension = cfg.dimension;
    size_t ingest_chunk_size = cfg.chunk_size.front();
    ingest_cmd->add_option("--corpus", corpus_dir, "directory of text/markdown files")
        ->required();
    ingest_cmd->add_option("--out-index", out_index, "output index file")
        ->capture_default_str();
    ingest_cmd->add_option("--chunk-size", ingest_chunk_size, "chunk size in characters")
        ->capture_default_str();
    ingest_cmd->add_option("--overlap", overlap, "chunk overlap in characters")
        ->capture_default_str();
    ingest_cmd->add_option("--dim", dimension, "offline embedder dimension")
        ->capture_default_str();

    CLI::App* news_cmd = app.add_subcommand("gen-news", "Generate a synthetic news corpus");
    int count = 100;
    bool dry_run = false;
    std::string exclude_path;
    std::string template_path = "data/templates/news_prompt.txt";
    news_cmd->add_option("--count", count, "stories to generate")->capture_default_str();
    news_cmd->add_option("--seed", seed, "sampling seed")->capture_default_str();
    news_cmd->add_flag("--dry-run", dry_run, "write prompts only, no model calls");
    news_cmd->add_option("--exclude", exclude_path,
                         "scenario file with combinations to exclude");
    news_cmd->add_option("--template", template_path, "story prompt template")
        ->capture_default_str();
    news_cmd->add_option("--out", out_dir, "output directory")->required();
    news_cmd->add_option("--cards", cards_path, "card catalog file")->capture_default_str();

    CLI::App* replay_cmd = app.add_subcommand("replay", "Replay a recorded trajectory");
    std::string trajectory_path;
    replay_cmd->add_option("--trajectory", trajectory_path,
                           "scenario file with forced_rolls and procedures")
        ->required();
    replay_cmd->add_option("--format", format_arg, "trajectory format: md|csv")
        ->capture_default_str();
    replay_cmd->add_option("--cards", cards_path, "card catalog file")->capture_default_str();

    CLI::App* report_cmd = app.add_subcommand("report", "Render a win-rate comparison table");
    std::string base_path, wiki_path, news_path;
    report_cmd->add_option("--base", base_path, "batch report without retrieval")->required();
    report_cmd->add_option("--wiki", wiki_path, "batch report for the wiki corpus")
        ->required();
    report_cmd->add_option("--news", news_path, "batch report for the news corpus")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        cfg.cards_path = cards_path;
        cfg.prompts_dir = prompts_dir;
        if (!top_k_arg.empty()) cfg.top_k = parse_size_list(top_k_arg, "--top-k");
        if (!chunk_size_arg.empty()) {
            cfg.chunk_size = parse_size_list(chunk_size_arg, "--chunk-size");
        }
        cfg.overlap = overlap;
        cfg.distinct_docs = distinct_docs;
        const RetrievalPolicy policy = parse_policy(policy_name);

        const TableFormat format = format_arg == "csv" ? TableFormat::Csv
                                                       : TableFormat::Markdown;

        if (replay_cmd->parsed()) {
            const Catalog catalog = load_catalog(cfg.cards_path);
            ScenarioFile file = load_scenario_file(trajectory_path);
            if (file.forced_rolls.empty() || file.procedures.empty()) {
                throw ValidationError({"trajectory file needs forced_rolls and procedures"});
            }
            Rng est(seed);
            Scenario scenario = scenario_from_file(catalog, file, &est);
            ReplayRun run = replay(catalog, scenario, file.forced_rolls, file.procedures);
            std::cout << render_trajectory(catalog, run.final_state.history, format);
            std::cout << "\nResult: " << status_label(run.final_state.status) << " after "
                      << run.final_state.turn << " turns\n";
            return kExitOk;
        }

        if (ingest_cmd->parsed()) {
            auto embedder = std::make_shared<HashedNgramEmbedder>(dimension);
            IngestReport report;
            ChunkIndex index = ingest_corpus(corpus_dir, {ingest_chunk_size, overlap},
                                             embedder, &report);
            index.save(out_index);
            std::cout << "indexed " << report.documents << " documents into " << report.chunks
                      << " chunks -> " << out_index << "\n";
            for (const auto& skipped : report.skipped) {
                std::cerr << "warning: skipped unreadable file: " << skipped << "\n";
            }
            return kExitOk;
        }

        if (news_cmd->parsed()) {
            const Catalog catalog = load_catalog(cfg.cards_path);
            NewsGenConfig ncfg;
            ncfg.count = count;
            ncfg.seed = seed;
            ncfg.dry_run = dry_run;
            ncfg.out_dir = out_dir;
            ncfg.template_path = template_path;
            if (!exclude_path.empty()) ncfg.exclusion_path = exclude_path;
            std::unique_ptr<LlmGateway> gateway;
            if (!dry_run) gateway = std::make_unique<LlmGateway>(cfg.gateway);
            NewsGenResult result = gen_news(catalog, ncfg, gateway.get());
            std::cout << (dry_run ? "prompts written: " : "stories written: ")
                      << result.written << " (failures: " << result.failures
                      << "), manifest: " << result.manifest_path.string() << "\n";
            return result.failures == 0 ? kExitOk : kExitRuntime;
        }

        if (report_cmd->parsed()) {
            BatchReport base = load_batch_json(base_path);
            BatchReport wiki = load_batch_json(wiki_path);
            BatchReport news = load_batch_json(news_path);
            std::cout << render_winrate_table(base, wiki, news);
            return kExitOk;
        }

        // run / batch share setup.
        const Catalog catalog = load_catalog(cfg.cards_path);
        const PromptLibrary prompts = PromptLibrary::load(cfg.prompts_dir);
        auto rag_mode = parse_rag_mode(rag_arg);
        if (!rag_mode) throw ValidationError({"unknown rag mode '" + rag_arg + "'"});
        BackendSetup backend = build_backend(cfg, backend_arg, policy_arg);

        if (run_cmd->parsed()) {
            if (cfg.top_k.size() != 1 || cfg.chunk_size.size() != 1) {
                throw ValidationError({"run takes single --top-k/--chunk-size values; "
                                       "sweeps are a batch feature"});
            }
            RagSetup rag = build_rag(cfg, *rag_mode, index_path, cfg.chunk_size.front());
            auto structure = parse_structure(structure_arg);
            if (!structure) {
                throw ValidationError({"unknown team structure '" + structure_arg + "'"});
            }
            SessionConfig scfg;
            scfg.retrieval_policy = *rag_mode == RagMode::None ? RetrievalPolicy::Never
                                                               : policy;
            scfg.top_k = cfg.top_k.front();
            scfg.distinct_docs = cfg.distinct_docs;
            scfg.context_window = cfg.context_window;
            scfg.discussion_rounds = cfg.discussion_rounds;
            scfg.notice = [](const std::string& msg) { std::cerr << "note: " << msg << "\n"; };

            std::optional<Scenario> override;
            if (!scenario_path.empty()) {
                ScenarioFile file = load_scenario_file(scenario_path);
                Rng est(seed);
                override = scenario_from_file(catalog, file, &est);
                scfg.forced_rolls = file.forced_rolls;
                scfg.forced_procedures = file.procedures;
            }

            Session session = make_session(catalog, build_team(*structure, prompts),
                                           *backend.backend, rag.ptr, seed, scfg, override);
            GameReport report = run_game(session);
            print_game_summary(catalog, report, format);
            if (!out_dir.empty()) {
                fs::create_directories(fs::path(out_dir) / "transcripts" /
                                       structure_key(report.structure));
                std::ofstream out(fs::path(out_dir) / "transcripts" /
                                  structure_key(report.structure) /
                                  (std::to_string(report.seed) + ".log"));
                write_transcript(out, report);
            }
            return kExitOk;
        }

        // batch; list-valued knobs expand into a sweep over the cross product
        const bool sweeping = cfg.top_k.size() > 1 || cfg.chunk_size.size() > 1;
        if (sweeping && !index_path.empty() && cfg.chunk_size.size() > 1) {
            throw ValidationError(
                {"chunk-size sweeps re-ingest the corpus and cannot use --index"});
        }
        for (size_t chunk_size : cfg.chunk_size) {
            RagSetup rag = build_rag(cfg, *rag_mode, index_path, chunk_size);
            for (size_t k : cfg.top_k) {
                ExperimentConfig bcfg;
                bcfg.structures = parse_structures(structure_arg);
                bcfg.runs = runs;
                bcfg.rag = *rag_mode;
                bcfg.top_k = k;
                bcfg.chunk_params = {chunk_size, cfg.overlap};
                bcfg.base_seed = seed;
                bcfg.retrieval_policy = policy;
                bcfg.distinct_docs = cfg.distinct_docs;
                bcfg.context_window = cfg.context_window;
                bcfg.discussion_rounds = cfg.discussion_rounds;
                bcfg.workers = workers;
                if (!scenario_path.empty()) bcfg.scenario_override_path = scenario_path;

                BatchReport report = run_batch(catalog, prompts, bcfg, *backend.backend,
                                               rag.ptr);
                if (sweeping) {
                    std::cout << "=== chunk_size " << chunk_size << ", top_k " << k
                              << " ===\n";
                }
                std::cout << "| Team | Wins | Losses | Aborts | Win rate |\n";
                std::cout << "| --- | --- | --- | --- | --- |\n";
                for (const auto& s : report.per_structure) {
                    std::cout << "| " << structure_label(s.id) << " | " << s.wins << " | "
                              << s.losses << " | " << s.aborts << " | "
                              << format_tenths(s.rate_tenths) << " |\n";
                }
                std::cout << "wall clock: " << report.wall_clock_s << "s\n";
                if (!out_dir.empty()) {
                    fs::path target = out_dir;
                    if (sweeping) {
                        target /= "c" + std::to_string(chunk_size) + "_k" + std::to_string(k);
                    }
                    write_batch_outputs(target, report, bcfg.rag);
                    std::cout << "outputs written to " << target.string() << "\n";
                }
            }
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
