#include "breachsim/team.hpp"

#include <doctest.h>

#include <set>

using namespace breachsim;

namespace {

const PromptLibrary& prompts() {
    static const PromptLibrary lib =
        PromptLibrary::load(std::string(BREACHSIM_DATA_DIR) + "/prompts");
    return lib;
}

} // namespace

TEST_CASE("every structure fields exactly 5 defenders plus captain and retrieval agent") {
    for (StructureId s : kAllStructures) {
        TeamConfig team = build_team(s, prompts());
        CAPTURE(structure_key(s));
        CHECK(team.defenders.size() == 5);
        CHECK_FALSE(team.captain.prompt_text.empty());
        CHECK_FALSE(team.retrieval_agent.prompt_text.empty());
    }
}

TEST_CASE("leader present iff centralized, at most one") {
    for (StructureId s : kAllStructures) {
        TeamConfig team = build_team(s, prompts());
        int leaders = 0;
        for (const Role& r : team.defenders) {
            if (r.is_leader) ++leaders;
        }
        CAPTURE(structure_key(s));
        CHECK(leaders == (is_centralized(s) ? 1 : 0));
        CHECK((team.leader() != nullptr) == is_centralized(s));
    }
}

TEST_CASE("hierarchical rosters have exactly two beginners, others none") {
    for (StructureId s : kAllStructures) {
        TeamConfig team = build_team(s, prompts());
        int beginners = 0;
        for (const Role& r : team.defenders) {
            if (r.expertise == Expertise::Beginner) ++beginners;
        }
        CAPTURE(structure_key(s));
        CHECK(beginners == (is_hierarchical(s) ? 2 : 0));
    }
}

TEST_CASE("hetero hier has 3 domain experts and 2 beginners and no leader") {
    TeamConfig team = build_team(StructureId::HeteroHier, prompts());
    std::multiset<Expertise> kinds;
    for (const Role& r : team.defenders) kinds.insert(r.expertise);
    CHECK(kinds.count(Expertise::EndpointSecurity) == 1);
    CHECK(kinds.count(Expertise::NetworkTraffic) == 1);
    CHECK(kinds.count(Expertise::LogBehavior) == 1);
    CHECK(kinds.count(Expertise::Beginner) == 2);
    CHECK(team.leader() == nullptr);
}

TEST_CASE("homo arg is 5 argumentative generalists") {
    TeamConfig team = build_team(StructureId::HomoArg, prompts());
    for (const Role& r : team.defenders) {
        CHECK(r.expertise == Expertise::Generalist);
        CHECK(r.is_argumentative);
    }
}

TEST_CASE("only the two argumentative structures set the flag") {
    for (StructureId s : kAllStructures) {
        TeamConfig team = build_team(s, prompts());
        for (const Role& r : team.defenders) {
            CAPTURE(structure_key(s));
            CHECK(r.is_argumentative == is_argumentative_structure(s));
        }
    }
}

TEST_CASE("expertise diversity matches the homogeneity axis") {
    for (StructureId s : kAllStructures) {
        TeamConfig team = build_team(s, prompts());
        std::set<Expertise> distinct;
        std::set<Expertise> non_beginner;
        for (const Role& r : team.defenders) {
            distinct.insert(r.expertise);
            if (r.expertise != Expertise::Beginner) non_beginner.insert(r.expertise);
        }
        CAPTURE(structure_key(s));
        const bool hetero = s == StructureId::HeteroCen || s == StructureId::HeteroDecen ||
                            s == StructureId::HeteroHier || s == StructureId::HeteroArg;
        if (hetero) {
            CHECK(distinct.size() >= 4);
        } else {
            CHECK(non_beginner.size() == 1);
            CHECK(*non_beginner.begin() == Expertise::Generalist);
        }
    }
}

TEST_CASE("argumentative prompts carry their challenge clauses") {
    TeamConfig arg = build_team(StructureId::HeteroArg, prompts());
    const Role* endpoint = nullptr;
    for (const Role& r : arg.defenders) {
        if (r.expertise == Expertise::EndpointSecurity) endpoint = &r;
    }
    REQUIRE(endpoint != nullptr);
    CHECK(endpoint->prompt_text.find("Raise constructive objections") != std::string::npos);

    TeamConfig plain = build_team(StructureId::HomoDecen, prompts());
    for (const Role& r : plain.defenders) {
        CHECK(r.prompt_text.find("Respectfully challenge") == std::string::npos);
        CHECK_FALSE(r.is_argumentative);
    }
}

TEST_CASE("role_prompt substitutes the context and is pure") {
    TeamConfig team = build_team(StructureId::HomoCen, prompts());
    const Role& member = team.defenders[1];
    const std::string ctx = "Turn 3. Revealed so far: none.";
    const std::string a = role_prompt(member, ctx);
    const std::string b = role_prompt(member, ctx);
    CHECK(a == b);
    CHECK(a.find(ctx) != std::string::npos);
    CHECK(a.find("{game_context}") == std::string::npos);
    CHECK(a.find("{rules}") == std::string::npos);
}

TEST_CASE("missing template directory fails loudly") {
    CHECK_THROWS_AS(PromptLibrary::load("/no/such/prompt/dir"), ParseError);
}
