#include "breachsim/engine.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace breachsim;

namespace {

const Catalog& default_catalog() {
    static const Catalog cat = load_catalog(std::string(BREACHSIM_DATA_DIR) + "/cards.json");
    return cat;
}

ScenarioFile load_replay(const std::string& name) {
    return load_scenario_file(std::string(BREACHSIM_DATA_DIR) + "/replays/" + name);
}

std::string scenario_fingerprint(const Scenario& s) {
    std::string out;
    for (const auto& a : s.attack_cards) out += a + "|";
    std::vector<std::string> est = s.established;
    std::sort(est.begin(), est.end());
    for (const auto& e : est) out += e + "|";
    return out;
}

} // namespace

TEST_CASE("new_game is deterministic per seed") {
    const Catalog& cat = default_catalog();
    GameState a = new_game(cat, 7);
    GameState b = new_game(cat, 7);
    CHECK(a.scenario == b.scenario);
    CHECK(a.turn == 0);
    CHECK(a.revealed.empty());
    CHECK(a.status == GameStatus::Ongoing);

    GameState c = new_game(cat, 8);
    CHECK(scenario_fingerprint(a.scenario) != scenario_fingerprint(c.scenario));
}

TEST_CASE("scenario override is validated and accepted") {
    const Catalog& cat = default_catalog();
    Scenario s = canonical_scenario(
        cat,
        {"credential_stuffing", "internal_password_spray", "https_as_exfil", "new_user_added"},
        {"user_and_entity_behavior_analytics", "siem_log_analysis", "crisis_management",
         "isolation"});
    GameState game = new_game(cat, 1, s);
    CHECK(game.scenario.attack_cards[0] == "credential_stuffing");
    CHECK(game.scenario.attack_cards[1] == "internal_password_spray");
    CHECK(game.scenario.attack_cards[2] == "https_as_exfil");
    CHECK(game.scenario.attack_cards[3] == "new_user_added");

    // Wrong phase multiplicity: two initial compromise cards.
    CHECK_THROWS_AS(canonical_scenario(cat, {"phish", "credential_stuffing", "https_as_exfil",
                                             "new_user_added"},
                                       {}),
                    ValidationError);

    // Non-procedure in the established set.
    Scenario bad = s;
    bad.established[0] = "phish";
    CHECK_THROWS_AS(new_game(cat, 1, bad), ValidationError);
}

TEST_CASE("scenario space is large: 10k seeds give many distinct scenarios") {
    const Catalog& cat = default_catalog();
    // Brute-force size of the unconstrained space from the shipped deck.
    const size_t combos = cat.phase_count(Phase::InitialCompromise) *
                          cat.phase_count(Phase::PivotEscalate) *
                          cat.phase_count(Phase::C2Exfil) * cat.phase_count(Phase::Persistence);
    CHECK(combos == 15288);
    // C(12,4) established sets.
    size_t est_sets = 1;
    for (size_t i = 0; i < 4; ++i) est_sets = est_sets * (12 - i) / (i + 1);
    CHECK(est_sets == 495);

    std::set<std::string> distinct;
    for (uint64_t seed = 0; seed < 10000; ++seed) {
        distinct.insert(scenario_fingerprint(new_game(cat, seed).scenario));
    }
    CHECK(distinct.size() >= 100);
}

TEST_CASE("roll_d20 is reproducible and refuses finished games") {
    const Catalog& cat = default_catalog();
    GameState a = new_game(cat, 99);
    GameState b = new_game(cat, 99);
    for (int i = 0; i < 50; ++i) {
        int ra = roll_d20(a);
        CHECK(ra == roll_d20(b));
        CHECK(ra >= 1);
        CHECK(ra <= 20);
    }

    GameState done = new_game(cat, 99);
    done.status = GameStatus::Won;
    CHECK_THROWS_AS(roll_d20(done), std::logic_error);
}

TEST_CASE("d20 faces are roughly uniform") {
    const Catalog& cat = default_catalog();
    GameState g = new_game(cat, 4242);
    std::array<int, 21> counts{};
    const int n = 20000;
    for (int i = 0; i < n; ++i) counts[static_cast<size_t>(roll_d20(g))]++;
    for (int face = 1; face <= 20; ++face) {
        const double freq = static_cast<double>(counts[static_cast<size_t>(face)]) / n;
        CAPTURE(face);
        CHECK(freq > 0.04);
        CHECK(freq < 0.06);
    }
}

TEST_CASE("resolve_attempt applies the modifier and threshold") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("sample_game.json");
    Scenario s = scenario_from_file(cat, file);

    SUBCASE("established success with reveal") {
        GameState g = new_game(cat, 0, s);
        AttemptOutcome out = resolve_attempt(cat, g, "endpoint_analysis", 17);
        CHECK(out.modifier == 3);
        CHECK(out.total == 20);
        CHECK(out.success);
        REQUIRE(out.revealed_card.has_value());
        CHECK(*out.revealed_card == "local_privilege_escalation");
        CHECK(g.turn == 1);
    }

    SUBCASE("plain failure, no reveal") {
        GameState g = new_game(cat, 0, s);
        AttemptOutcome out = resolve_attempt(cat, g, "firewall_log_review", 4);
        CHECK(out.modifier == 0);
        CHECK(out.total == 4);
        CHECK_FALSE(out.success);
        CHECK_FALSE(out.revealed_card.has_value());
    }

    SUBCASE("boundary: 8 + 3 = 11 succeeds") {
        GameState g = new_game(cat, 0, s);
        AttemptOutcome out = resolve_attempt(cat, g, "endpoint_analysis", 8);
        CHECK(out.total == 11);
        CHECK(out.success);
    }

    SUBCASE("success with empty intersection reveals nothing") {
        // North Face turn 2: SIEM succeeds but matches no unrevealed card.
        ScenarioFile nf = load_replay("north_face.json");
        Scenario ns = scenario_from_file(cat, nf);
        GameState g = new_game(cat, 0, ns);
        resolve_attempt(cat, g, "user_and_entity_behavior_analytics", 10);
        AttemptOutcome out = resolve_attempt(cat, g, "siem_log_analysis", 12);
        CHECK(out.total == 15);
        CHECK(out.success);
        CHECK_FALSE(out.revealed_card.has_value());
    }

    SUBCASE("bad inputs are rejected") {
        GameState g = new_game(cat, 0, s);
        CHECK_THROWS_AS(resolve_attempt(cat, g, "no_such_proc", 10), UnknownIdError);
        CHECK_THROWS_AS(resolve_attempt(cat, g, "endpoint_analysis", 0), std::invalid_argument);
        CHECK_THROWS_AS(resolve_attempt(cat, g, "endpoint_analysis", 21), std::invalid_argument);
    }
}

TEST_CASE("success law holds on the full roll x modifier grid") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("sample_game.json");
    Scenario s = scenario_from_file(cat, file);
    // cyber_deception is established in this scenario, firewall_log_review is not;
    // both have no matching cards here, leaving the success bit isolated.
    int cases = 0;
    for (int roll = 1; roll <= 20; ++roll) {
        for (bool established : {false, true}) {
            GameState g = new_game(cat, 0, s);
            const std::string proc = established ? "cyber_deception" : "firewall_log_review";
            AttemptOutcome out = resolve_attempt(cat, g, proc, roll);
            const int mod = established ? 3 : 0;
            CHECK(out.modifier == mod);
            CHECK(out.total == roll + mod);
            CHECK(out.success == (roll + mod >= 11));
            ++cases;
        }
    }
    CHECK(cases == 40);
}

TEST_CASE("game_status follows the win and loss rules") {
    CHECK(game_status(4, 10) == GameStatus::Won);
    CHECK(game_status(4, 6) == GameStatus::Won);
    CHECK(game_status(3, 10) == GameStatus::Lost);
    CHECK(game_status(0, 0) == GameStatus::Ongoing);
    CHECK(game_status(3, 9) == GameStatus::Ongoing);
}

TEST_CASE("random games keep the core invariants") {
    const Catalog& cat = default_catalog();
    const auto& procedures = cat.phase_ids(Phase::Procedure);
    for (uint64_t seed = 0; seed < 200; ++seed) {
        GameState g = new_game(cat, seed);
        size_t last_revealed = 0;
        int attempts = 0;
        while (g.status == GameStatus::Ongoing) {
            const std::string& proc =
                procedures[g.rng.below(procedures.size())];
            const int roll = roll_d20(g);
            AttemptOutcome out = resolve_attempt(cat, g, proc, roll);
            ++attempts;

            // Monotone reveal, at most one per attempt.
            CHECK(g.revealed.size() >= last_revealed);
            CHECK(g.revealed.size() - last_revealed <= 1);
            last_revealed = g.revealed.size();

            // Reveal soundness.
            if (out.revealed_card) {
                CHECK(out.success);
                const auto& det = cat.detection_set(proc);
                CHECK(std::find(det.begin(), det.end(), *out.revealed_card) != det.end());
                CHECK(g.scenario.has_attack(*out.revealed_card));
            }
            // Revealed is always a subset of the scenario.
            for (const auto& r : g.revealed) CHECK(g.scenario.has_attack(r));
        }
        CHECK(attempts <= kMaxTurns);
        CHECK(g.status != GameStatus::Ongoing);
        if (g.status == GameStatus::Won) CHECK(g.revealed.size() == 4);
        if (g.status == GameStatus::Lost) {
            CHECK(g.turn == kMaxTurns);
            CHECK(g.revealed.size() < 4);
        }
    }
}

TEST_CASE("replay reproduces the Cock.li trajectory") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("cockli.json");
    Scenario s = scenario_from_file(cat, file);
    ReplayRun run = replay(cat, s, file.forced_rolls, file.procedures);
    REQUIRE(run.outcomes.size() == 10);

    std::map<int, std::string> reveals;
    for (const auto& rec : run.final_state.history) {
        if (rec.revealed_card) reveals[rec.turn] = *rec.revealed_card;
    }
    REQUIRE(reveals.size() == 4);
    CHECK(reveals[4] == "web_server_compromise");
    CHECK(reveals[6] == "local_privilege_escalation");
    CHECK(reveals[7] == "http_as_exfil");
    CHECK(reveals[10] == "registry_keys_for_persistence");
    CHECK(run.final_state.status == GameStatus::Won);
}

TEST_CASE("replay reproduces the Gluestack trajectory and stops at the win") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("gluestack.json");
    Scenario s = scenario_from_file(cat, file);
    ReplayRun run = replay(cat, s, file.forced_rolls, file.procedures);
    REQUIRE(run.outcomes.size() == 6);

    std::map<int, std::string> reveals;
    for (const auto& rec : run.final_state.history) {
        if (rec.revealed_card) reveals[rec.turn] = *rec.revealed_card;
    }
    REQUIRE(reveals.size() == 4);
    CHECK(reveals[1] == "weaponizing_active_directory");
    CHECK(reveals[3] == "malware_injection_into_client_software");
    CHECK(reveals[4] == "supply_chain_attack");
    CHECK(reveals[6] == "gmail_tumblr_salesforce_twitter_as_c2");
    CHECK(run.final_state.status == GameStatus::Won);
    CHECK(run.final_state.turn == 6);
}

TEST_CASE("replay edge cases") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("sample_game.json");
    Scenario s = scenario_from_file(cat, file);

    ReplayRun empty = replay(cat, s, {}, {});
    CHECK(empty.outcomes.empty());
    CHECK(empty.final_state.turn == 0);
    CHECK(empty.final_state.status == GameStatus::Ongoing);

    CHECK_THROWS_AS(replay(cat, s, {1, 2}, {"isolation"}), std::invalid_argument);
    CHECK_THROWS_AS(replay(cat, s, {1}, {"not_a_procedure"}), UnknownIdError);

    std::vector<int> eleven(11, 1);
    std::vector<std::string> procs(11, "isolation");
    CHECK_THROWS_AS(replay(cat, s, eleven, procs), std::invalid_argument);
}

TEST_CASE("replay determinism: identical inputs give identical histories") {
    const Catalog& cat = default_catalog();
    ScenarioFile file = load_replay("cockli.json");
    Scenario s = scenario_from_file(cat, file);
    ReplayRun a = replay(cat, s, file.forced_rolls, file.procedures);
    ReplayRun b = replay(cat, s, file.forced_rolls, file.procedures);
    REQUIRE(a.final_state.history.size() == b.final_state.history.size());
    for (size_t i = 0; i < a.final_state.history.size(); ++i) {
        const TurnRecord& x = a.final_state.history[i];
        const TurnRecord& y = b.final_state.history[i];
        CHECK(x.turn == y.turn);
        CHECK(x.procedure_id == y.procedure_id);
        CHECK(x.natural_roll == y.natural_roll);
        CHECK(x.modifier == y.modifier);
        CHECK(x.success == y.success);
        CHECK(x.revealed_card == y.revealed_card);
        CHECK(x.retrieval == y.retrieval);
    }
}
