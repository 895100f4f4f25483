#include <catch_amalgamated.hpp>

#include <crnc/compiler.hpp>
#include <crnc/kinetics.hpp>
#include <crnc/netlist.hpp>
#include <crnc/scenarios.hpp>

#include "support/oracles.hpp"

#include <fstream>
#include <set>
#include <sstream>

using namespace crnc;

namespace {

GateParams gp() { return {{0.03, 0.004, 0.004, 0.1, std::nullopt}, 1.0}; }

bool has(const ParseResult& r, Diagnostic::Kind k)
{
    return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const Diagnostic& d) { return d.kind == k; });
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("parse the XOR netlist")
{
    const auto r = parse_netlist(xor_netlist_text());
    REQUIRE(r.ok());
    const Netlist& nl = *r.netlist;
    CHECK(nl.gate_count() == 3);
    CHECK(depth(nl) == 2);
    CHECK(nl.inputs == std::vector<std::string>{"X1", "X2"});
    CHECK(nl.outputs == std::vector<std::string>{"Y"});
    CHECK(nl.gates[0].a == ~wire("X1"));
    CHECK(nl.gates[2].out == "Y");
    CHECK(parse_netlist_or_throw(to_text(nl)).gates == nl.gates);
}

TEST_CASE("sample netlists parse")
{
    const Netlist x = parse_netlist_or_throw(slurp(std::string(CRNC_SAMPLES_DIR) + "/xor.net"));
    CHECK(x.gate_count() == 3);
    const auto cyc = parse_netlist(slurp(std::string(CRNC_SAMPLES_DIR) + "/cyclic.net"));
    CHECK(has(cyc, Diagnostic::Kind::cycle));
}

TEST_CASE("gate order in the file does not matter")
{
    const auto nl = parse_netlist_or_throw("INPUTS A B\nOUTPUTS Y\nY = NAND(Z, A)\nZ = NAND(A, B)\n");
    CHECK(nl.gates[0].out == "Z");
    CHECK(nl.gates[1].out == "Y");
}

TEST_CASE("netlist diagnostics")
{
    SECTION("self loop is a cycle")
    {
        const auto r = parse_netlist("INPUTS A\nOUTPUTS Y\nY = NAND(A, Y)\n");
        REQUIRE_FALSE(r.ok());
        CHECK(has(r, Diagnostic::Kind::cycle));
        CHECK(r.diagnostics[0].line == 3);
    }
    SECTION("longer cycle")
    {
        const auto r = parse_netlist("INPUTS A\nOUTPUTS P\nP = NAND(A, Q)\nQ = NAND(A, P)\n");
        CHECK(has(r, Diagnostic::Kind::cycle));
    }
    SECTION("undefined wire")
    {
        const auto r = parse_netlist("INPUTS A\nOUTPUTS Y\nY = NAND(A, B)\n");
        CHECK(has(r, Diagnostic::Kind::undefined));
        CHECK(r.diagnostics[0].line == 3);
    }
    SECTION("undefined output") { CHECK(has(parse_netlist("INPUTS A B\nOUTPUTS W\n"), Diagnostic::Kind::undefined)); }
    SECTION("duplicate definition")
    {
        const auto r = parse_netlist("INPUTS A B\nOUTPUTS Y\nY = NAND(A, B)\nY = NAND(B, A)\n");
        CHECK(has(r, Diagnostic::Kind::duplicate));
        CHECK(r.diagnostics[0].line == 4);
    }
    SECTION("gate redefines an input")
    {
        CHECK(has(parse_netlist("INPUTS A B\nOUTPUTS A\nA = NAND(A, B)\n"), Diagnostic::Kind::duplicate));
    }
    SECTION("arity")
    {
        CHECK(has(parse_netlist("INPUTS A B C\nOUTPUTS Y\nY = NAND(A, B, C)\n"), Diagnostic::Kind::arity));
        CHECK(has(parse_netlist("INPUTS A\nOUTPUTS Y\nY = NAND(A)\n"), Diagnostic::Kind::arity));
    }
    SECTION("same wire on both inputs")
    {
        CHECK(has(parse_netlist("INPUTS A\nOUTPUTS Y\nY = NAND(A, ~A)\n"), Diagnostic::Kind::repeated_input));
    }
    SECTION("syntax")
    {
        CHECK(has(parse_netlist("INPUTS A B\nOUTPUTS Y\nY = AND(A, B)\n"), Diagnostic::Kind::syntax));
        CHECK(has(parse_netlist("INPUTS A B\nOUTPUTS Y\nY NAND(A, B)\n"), Diagnostic::Kind::syntax));
        CHECK(has(parse_netlist("INPUTS A B_bar\nOUTPUTS A\n"), Diagnostic::Kind::syntax));
        CHECK(has(parse_netlist("OUTPUTS Y\n"), Diagnostic::Kind::syntax));
    }
    SECTION("exception carries every diagnostic")
    {
        try {
            parse_netlist_or_throw("INPUTS A\nOUTPUTS Y\nY = NAND(A, B)\nZ = NAND(A)\n");
            FAIL("expected NetlistError");
        } catch (const NetlistError& e) {
            CHECK(e.diagnostics().size() == 2);
            CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("line 3"));
        }
    }
}

TEST_CASE("identity circuit")
{
    const auto nl = parse_netlist_or_throw("# straight wires\nINPUTS A B\nOUTPUTS B A\n");
    CHECK(nl.gate_count() == 0);
    CHECK(depth(nl) == 0);
    CHECK(eval_boolean(nl, {1, 0}) == std::vector<int>{0, 1});
    const auto cc = compile(nl, gp());
    CHECK(cc.crn.reactions.empty());
    CHECK(cc.crn.inputs == SpeciesSet{"A", "A_bar", "B", "B_bar"});
}

TEST_CASE("depth")
{
    CHECK(depth(parse_netlist_or_throw("INPUTS A B\nOUTPUTS Y\nY = NAND(A, B)\n")) == 1);
    std::string chain = "INPUTS A B\nOUTPUTS G5\nG1 = NAND(A, B)\n";
    for (int i = 2; i <= 5; ++i)
        chain += "G" + std::to_string(i) + " = NAND(G" + std::to_string(i - 1) + ", A)\n";
    CHECK(depth(parse_netlist_or_throw(chain)) == 5);
}

TEST_CASE("boolean evaluation")
{
    const auto x = parse_netlist_or_throw(xor_netlist_text());
    CHECK(eval_boolean(x, {0, 0}) == std::vector<int>{0});
    CHECK(eval_boolean(x, {0, 1}) == std::vector<int>{1});
    CHECK(eval_boolean(x, {1, 0}) == std::vector<int>{1});
    CHECK(eval_boolean(x, {1, 1}) == std::vector<int>{0});
    const auto n = parse_netlist_or_throw("INPUTS A B\nOUTPUTS Y\nY = NAND(A, B)\n");
    CHECK(eval_boolean(n, {1, 1}) == std::vector<int>{0});
    CHECK(eval_boolean(n, {0, 1}) == std::vector<int>{1});
    CHECK(eval_boolean(n, {1, 0}) == std::vector<int>{1});
    CHECK(eval_boolean(n, {0, 0}) == std::vector<int>{1});
    CHECK_THROWS_AS(eval_boolean(n, {1}), NetlistError);
}

TEST_CASE("random DAGs agree with the recursive oracle")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto text = oracle::random_netlist_text(seed);
        const auto r = parse_netlist(text);
        REQUIRE(r.ok());
        const Netlist& nl = *r.netlist;
        CHECK(depth(nl) == oracle::depth_dfs(nl));
        const std::size_t n = nl.inputs.size();
        for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
            std::vector<int> w(n);
            for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<int>((m >> i) & 1U);
            CHECK(eval_boolean(nl, w) == oracle::eval_recursive(nl, w));
        }
        // sub-circuits: any subset of outputs, or any wire in the fan-in cone of an output
        std::set<std::string> cone;
        std::vector<std::string> stack(nl.outputs.begin(), nl.outputs.end());
        while (!stack.empty()) {
            const auto w = stack.back();
            stack.pop_back();
            if (!cone.insert(w).second) continue;
            if (const Gate* g = nl.gate_for(w)) {
                stack.push_back(g->a.wire);
                stack.push_back(g->b.wire);
            }
        }
        for (const auto& w : cone) {
            Netlist sub = nl;
            sub.outputs = {w};
            CHECK(depth(sub) <= depth(nl));
        }
    }
}

TEST_CASE("compile XOR")
{
    const auto cc = compile(parse_netlist_or_throw(xor_netlist_text()), gp());
    CHECK(cc.depth == 2);
    CHECK(cc.gate_tau == 0.5);
    CHECK(cc.crn.reactions.size() == 15);
    for (const auto& r : cc.crn.reactions) CHECK((r.k == Catch::Approx(36.0) || r.k == Catch::Approx(108.0)));
    CHECK(cc.crn.states == SpeciesSet{"Z1", "Z1_bar", "Z2", "Z2_bar", "Y", "Y_bar"});
    CHECK(cc.crn.inputs == SpeciesSet{"X1", "X1_bar", "X2", "X2_bar"});
    CHECK(validate(cc.crn).empty());
    CHECK(cc.reactions_of.at("Y") == std::vector<std::size_t>{10, 11, 12, 13, 14});
    for (const auto& s : {"Z1", "Z2", "Y"}) {
        CHECK(cc.canonical_x0.at(s) == 1.0);
        CHECK(cc.canonical_x0.at(dual_of(s)) == 0.0);
    }
}

TEST_CASE("single-gate netlist equals the direct construction")
{
    const auto cc = compile(parse_netlist_or_throw("INPUTS X1 X2\nOUTPUTS Y\nY = NAND(X1, X2)\n"), gp());
    const auto g = build_nand(wire("X1"), wire("X2"), wire("Y"), gp());
    CHECK(cc.crn == g.crn);
    CHECK(cc.canonical_x0 == g.canonical_x0);
}

TEST_CASE("compiled random DAGs are modular with 5 reactions per gate")
{
    int eight = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Netlist nl = parse_netlist_or_throw(oracle::random_netlist_text(seed));
        const auto cc = compile(nl, gp());
        CHECK(cc.crn.reactions.size() == 5 * nl.gate_count());
        CHECK(validate(cc.crn).empty());
        for (const auto& g : nl.gates) {
            CHECK_FALSE(cc.crn.inputs.contains(g.out));
            CHECK_FALSE(cc.crn.inputs.contains(dual_of(g.out)));
        }
        if (nl.gate_count() == 8) {
            ++eight;
            CHECK(cc.crn.reactions.size() == 40);
        }
    }
    CHECK(eight > 0);
}

TEST_CASE("compiled circuits settle to the boolean value (sampled DAGs)")
{
    const GateParams p = gp();
    for (std::uint64_t seed = 300; seed < 306; ++seed) {
        const Netlist nl = parse_netlist_or_throw(oracle::random_netlist_text(seed));
        const auto cc = compile(nl, p);
        const std::size_t n = nl.inputs.size();
        for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
            std::vector<int> w(n);
            std::vector<Species> sp;
            std::vector<double> vals;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = static_cast<int>((m >> i) & 1U);
                sp.push_back(nl.inputs[i]);
                sp.push_back(dual_of(nl.inputs[i]));
                vals.push_back(w[i]);
                vals.push_back(1 - w[i]);
            }
            const Signal u = Signal::constant(sp, vals, 3.0);
            const Trace tr = simulate(cc.crn, cc.canonical_x0, u, SimConfig::for_delay(1.0, 3.0));
            const auto expect = oracle::eval_recursive(nl, w);
            for (std::size_t j = 0; j < nl.outputs.size(); ++j) {
                const auto& o = nl.outputs[j];
                for (std::size_t r = 0; r < tr.times.size(); ++r) {
                    if (tr.times[r] < 1.0) continue;
                    const double y = tr.values[r][*tr.index_of(o)];
                    const double yb = tr.values[r][*tr.index_of(dual_of(o))];
                    CHECK(std::hypot(y - expect[j], yb - (1 - expect[j])) <= p.delta.d1);
                }
            }
        }
    }
}
