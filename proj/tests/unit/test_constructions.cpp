#include <catch_amalgamated.hpp>

#include <crnc/constructions.hpp>

using namespace crnc;
using Catch::Approx;

namespace {

GateParams gp(double d4, double tau) { return {{0.03, 0.004, 0.004, d4, std::nullopt}, tau}; }

bool preserves_pairs(const IoCrn& crn)
{
    for (const auto& [a, b] : rail_pairs(crn))
        for (const auto& r : crn.reactions)
            if (net_effect(r, a) + net_effect(r, b) != 0) return false;
    return true;
}

} // namespace

TEST_CASE("rate constant")
{
    CHECK(rate_constant(gp(0.1, 1.0)) == Approx(23.0));
    CHECK(rate_constant(gp(0.0, 1.0)) == Approx(13.0));
    CHECK(rate_constant(gp(1e-12, 1.0)) == Approx(13.0));
    CHECK(rate_constant(gp(0.1, 0.5)) == Approx(36.0));
    CHECK(rate_constant(gp(0.2, 1.0)) > rate_constant(gp(0.1, 1.0)));
    CHECK(rate_constant(gp(0.1, 2.0)) < rate_constant(gp(0.1, 1.0)));
    CHECK_THROWS_AS(rate_constant(gp(0.1, 0.0)), CrnError);
    CHECK_THROWS_AS(rate_constant(gp(-0.1, 1.0)), CrnError);
}

TEST_CASE("delta vector")
{
    const DeltaVector ok{0.03, 0.004, 0.004, 0.1, std::nullopt};
    CHECK(ok.in_guaranteed_region());
    CHECK(ok.epsilon() == 0.03);
    CHECK_FALSE(DeltaVector{0.5, 0.004, 0.004, 0.1, std::nullopt}.in_guaranteed_region());
    CHECK_FALSE(DeltaVector{0.03, 0.02, 0.02, 0.1, std::nullopt}.in_guaranteed_region());
    CHECK_FALSE(DeltaVector{0.039, 0.006, 0.006, 0.1, std::nullopt}.in_guaranteed_region());
    CHECK(DeltaVector::parse("0.03,0.004,0.004,0.1") == ok);
    CHECK_THROWS_AS(DeltaVector::parse("0.03,0.004"), CrnError);
    CHECK_THROWS_AS(DeltaVector::parse("a,b,c,d"), CrnError);
    const DeltaVector half = ok.scaled(0.5);
    CHECK(half.d1 == 0.015);
    CHECK(half.epsilon() == 0.03);
}

TEST_CASE("NAND construction")
{
    const auto g = build_nand(wire("X1"), wire("X2"), wire("Y"), gp(0.1, 1.0));
    CHECK(g.kind == GateKind::nand);
    CHECK(g.crn.inputs == SpeciesSet{"X1", "X1_bar", "X2", "X2_bar"});
    CHECK(g.crn.states == SpeciesSet{"Y", "Y_bar"});
    REQUIRE(g.crn.reactions.size() == 5);
    std::vector<double> ks;
    for (const auto& r : g.crn.reactions) ks.push_back(r.k);
    CHECK(ks == std::vector<double>{23, 23, 23, 69, 69});
    CHECK(g.canonical_x0 == State{{"Y", 1.0}, {"Y_bar", 0.0}});
    CHECK(validate(g.crn).empty());
    CHECK(preserves_pairs(g.crn));
    CHECK(g.observed() == std::vector<Species>{"Y", "Y_bar"});
    CHECK_THROWS_AS(build_nand(wire("A"), wire("A"), wire("Y"), gp(0.1, 1)), CrnError);
    CHECK_THROWS_AS(build_nand(wire("A"), wire("B"), wire("A"), gp(0.1, 1)), CrnError);
    CHECK_THROWS_AS(build_nand(wire("A"), wire("B"), wire("Y_bar"), gp(0.1, 1)), CrnError);
}

TEST_CASE("NAND reading dual rails")
{
    const auto g = build_nand(~wire("X1"), wire("X2"), wire("Z1"), gp(0.1, 1.0));
    const Reaction& first = g.crn.reactions[0];
    CHECK(first.reactants == Multiset{{"X1_bar", 1}, {"X2", 1}, {"Z1", 1}});
    CHECK(g.crn.reactions[1].reactants == Multiset{{"X1", 1}, {"Z1_bar", 1}});
}

TEST_CASE("SR latch construction")
{
    const auto g = build_sr_latch(~wire("S"), ~wire("R"), wire("Q1"), ~wire("Q2"), gp(0.1, 1.0));
    CHECK(g.crn.reactions.size() == 10);
    CHECK(g.crn.states == SpeciesSet{"Q1", "Q1_bar", "Q2", "Q2_bar"});
    CHECK(g.crn.inputs == SpeciesSet{"S", "S_bar", "R", "R_bar"});
    CHECK(g.k == Approx(100 * 0.1 + 26.0));
    CHECK(g.canonical_x0 == State{{"Q1", 1.0}, {"Q1_bar", 0.0}, {"Q2", 0.0}, {"Q2_bar", 1.0}});
    CHECK(g.observed() == std::vector<Species>{"Q1", "Q1_bar", "Q2", "Q2_bar"});
    CHECK(validate(g.crn).empty());
    CHECK(preserves_pairs(g.crn));
    CHECK_THROWS_AS(build_sr_latch(~wire("S"), ~wire("S"), wire("Q1"), ~wire("Q2"), gp(0.1, 1.0)), CrnError);
}

TEST_CASE("D latch construction")
{
    const auto g = build_d_latch(wire("D"), wire("E"), wire("Q"), gp(0.1, 1.0));
    REQUIRE(g.crn.reactions.size() == 4);
    CHECK(g.crn.states.size() == 2);
    CHECK(g.crn.inputs == SpeciesSet{"D", "D_bar", "E", "E_bar"});
    std::vector<double> ks;
    for (const auto& r : g.crn.reactions) ks.push_back(r.k);
    CHECK(ks == std::vector<double>{23, 23, 69, 69});
    CHECK(g.canonical_x0 == State{{"Q", 1.0}, {"Q_bar", 0.0}});
    bool e_bar_read = false;
    for (const auto& r : g.crn.reactions) e_bar_read = e_bar_read || r.reactants.contains("E_bar");
    CHECK_FALSE(e_bar_read);
    REQUIRE(g.notes.size() == 1);
    CHECK_THAT(g.notes[0], Catch::Matchers::ContainsSubstring("E_bar"));
    CHECK(preserves_pairs(g.crn));
    CHECK(validate(g.crn).empty());
}

TEST_CASE("flip-flop composition")
{
    const auto g = build_d_flip_flop(wire("D"), wire("CLK"), wire("Q"), gp(0.1, 1.0));
    CHECK(g.crn.reactions.size() == 8);
    CHECK(g.crn.states == SpeciesSet{"Q", "Q_bar", "Q_m", "Q_m_bar"});
    CHECK(g.crn.inputs == SpeciesSet{"D", "D_bar", "CLK", "CLK_bar"});
    bool slave_enabled_by_clk_bar = false;
    for (const auto& r : g.crn.reactions)
        slave_enabled_by_clk_bar = slave_enabled_by_clk_bar || (r.reactants.contains("CLK_bar") && r.reactants.contains("Q_m"));
    CHECK(slave_enabled_by_clk_bar);
    CHECK(validate(g.crn).empty());
}

TEST_CASE("initial state override")
{
    const auto g = build_nand(wire("X1"), wire("X2"), wire("Y"), gp(0.1, 1.0));
    const auto h = with_initial_state(g, {{"Y", 0.25}, {"Y_bar", 0.75}});
    CHECK(h.canonical_x0.at("Y") == 0.25);
    CHECK_THROWS_AS(with_initial_state(g, {{"Y", 0.5}, {"Y_bar", 0.6}}), CrnError);
    CHECK_THROWS_AS(with_initial_state(g, {{"Y", 1.0}, {"X1", 0.0}}), CrnError);
}
