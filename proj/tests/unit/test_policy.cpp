#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/policy.hpp"

using namespace ruleforge;

namespace {

Policy cartpole_best() {
    return {{{{{2, Op::GreaterThan, -0.02}, {3, Op::GreaterThan, -0.30}}, 1}}, 0};
}

Policy mountaincar_best() {
    return {{
                {{{1, Op::GreaterThan, 0.00}}, 2},
                {{{0, Op::GreaterThan, 0.30}, {0, Op::LessThan, 0.60}, {1, Op::GreaterThan, -0.07}}, 0},
                {{{0, Op::GreaterThan, 0.30}}, 2},
                {{{0, Op::LessThan, 0.60}}, 0},
                {{{1, Op::GreaterThan, -0.03}}, 2},
            },
            0};
}

std::string read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("eval_policy: first match and fallback") {
    const auto p = cartpole_best();
    CHECK(eval_policy(p, std::vector{0.0, 0.0, 0.05, 0.1}) == 1);
    CHECK(eval_policy(p, std::vector{0.0, 0.0, -0.10, 0.1}) == 0);
}

TEST_CASE("eval_policy: comparisons are strict") {
    const Policy p{{{{{0, Op::LessThan, 0.5}}, 1}, {{{0, Op::GreaterThan, 0.5}}, 2}}, 0};
    CHECK(eval_policy(p, std::vector{0.5}) == 0);
    CHECK(eval_policy(p, std::vector{0.49}) == 1);
    CHECK(eval_policy(p, std::vector{0.51}) == 2);
}

TEST_CASE("eval_policy: dimension mismatch is an error even for unreached predicates") {
    const Policy p{{{{{0, Op::GreaterThan, -10.0}}, 1}, {{{7, Op::LessThan, 0.0}}, 0}}, 0};
    CHECK_THROWS_AS(eval_policy(p, std::vector{0.0, 0.0}), ValidationError);
}

TEST_CASE("eval_policy agrees with the naive interpreter") {
    oracle::PolicyGen gen(1234, 4, 3);
    for (int i = 0; i < 50; ++i) {
        const auto p = gen.policy();
        for (int k = 0; k < 1000; ++k) {
            const auto s = gen.state();
            REQUIRE(eval_policy(p, s) == oracle::naive_eval(p, s));
        }
    }
}

TEST_CASE("eval_policy properties: determinism, shadowing, totality") {
    oracle::PolicyGen gen(99, 4, 2);
    for (int i = 0; i < 200; ++i) {
        const auto p = gen.policy();
        const auto s = gen.state();
        const auto a = eval_policy(p, s);
        CHECK(eval_policy(p, s) == a);
        CHECK(a < 2);

        // A rule that cannot fire on s, put in front, changes nothing on s.
        auto shadowed = p;
        Rule dead{{{0, Op::GreaterThan, s[0]}}, 1 - a};
        shadowed.rules.insert(shadowed.rules.begin(), dead);
        CHECK(eval_policy(shadowed, s) == a);
    }
}

TEST_CASE("complexity counts predicates") {
    CHECK(complexity(cartpole_best()) == 2);
    CHECK(complexity(mountaincar_best()) == 7);
    const Policy three{{{{{0, Op::LessThan, 1}}, 0}, {{{1, Op::LessThan, 1}}, 0}, {{{0, Op::GreaterThan, 1}}, 1}}, 0};
    CHECK(complexity(three) == 3);
    oracle::PolicyGen gen(5, 6, 3);
    for (int i = 0; i < 500; ++i) {
        const auto p = gen.policy();
        REQUIRE(complexity(p) == oracle::recount(p));
    }
}

TEST_CASE("descriptor uses mean absolute threshold") {
    const auto cp = descriptor(cartpole_best());
    CHECK(cp.rule_count == 1);
    CHECK(cp.mean_abs_threshold == doctest::Approx(0.16).epsilon(1e-12));

    const Policy zero{{{{{0, Op::LessThan, 0.0}}, 0}}, 0};
    CHECK(descriptor(zero) == Descriptor{1, 0.0});

    const auto mc = descriptor(mountaincar_best());
    CHECK(mc.rule_count == 5);
    CHECK(mc.mean_abs_threshold == doctest::Approx(0.2714285714285714).epsilon(1e-12));

    oracle::PolicyGen gen(8, 4, 2);
    for (int i = 0; i < 200; ++i) {
        auto p = gen.policy();
        const auto d = descriptor(p);
        for (auto& r : p.rules) {
            for (auto& pr : r.predicates) pr.threshold = -pr.threshold;
        }
        REQUIRE(descriptor(p).mean_abs_threshold == d.mean_abs_threshold);
    }
}

TEST_CASE("duplicate predicates count and dedup removes them") {
    const Policy dup{{{{{5, Op::GreaterThan, 0.0}, {4, Op::LessThan, 0.5}, {5, Op::GreaterThan, 0.0}}, 2}}, 0};
    CHECK(complexity(dup) == 3);
    const auto clean = dedup_predicates(dup);
    CHECK(complexity(clean) == 2);
    CHECK(clean.rules[0].predicates[0] == Predicate{5, Op::GreaterThan, 0.0});
}

TEST_CASE("format_policy renders the text grammar") {
    CHECK(format_policy(cartpole_best()) == "if s[2] > -0.02 and s[3] > -0.30 then action = 1\nelse action = 0\n");
    const Policy negzero{{{{{0, Op::LessThan, -0.001}}, 1}}, 0};
    CHECK(format_policy(negzero) == "if s[0] < 0.00 then action = 1\nelse action = 0\n");
}

TEST_CASE("parse_policy reads the published policies") {
    const auto p = parse_policy("if s[2] > -0.02 and s[3] > -0.30 then action = 1\nelse action = 0");
    CHECK(p == cartpole_best());
    CHECK(parse_policy(read(RULEFORGE_SOURCE_DIR "/policies/mountaincar_published.txt")) == mountaincar_best());
    const auto acro = parse_policy(read(RULEFORGE_SOURCE_DIR "/policies/acrobot_published.txt"), {6, 3, 0, 0});
    CHECK(acro.rules.size() == 3);
    CHECK(complexity(acro) == 7);
}

TEST_CASE("parse_policy accepts precision, CRLF, blank lines and 'else if'") {
    const auto p = parse_policy("\r\nif s[0] < 0.123456 then action = 2\r\nelse if s[1] > +1e-3 then action = 1\r\n\r\nelse action = 0\r\n");
    REQUIRE(p.rules.size() == 2);
    CHECK(p.rules[0].predicates[0].threshold == 0.123456);
    CHECK(p.rules[1].predicates[0].threshold == 0.001);
}

TEST_CASE("parse_policy errors") {
    CHECK_THROWS_AS(parse_policy("else action = 0"), ValidationError);
    CHECK_THROWS_AS(parse_policy("if s[0] < 1 then action = 1"), ParseError);
    CHECK_THROWS_AS(parse_policy("if s[0] <= 1 then action = 1\nelse action = 0"), ParseError);
    CHECK_THROWS_AS(parse_policy("if s[0] < 1 then action = 1\nelse action = 0\nif s[0] < 1 then action = 1"),
                    ParseError);
    CHECK_THROWS_AS(parse_policy("if s[0] < 1 then action = 1\nelse action = 0", {4, 1, 0, 0}), ValidationError);
    CHECK_THROWS_AS(parse_policy("if s[4] < 1 then action = 1\nelse action = 0", {4, 2, 0, 0}), ValidationError);

    try {
        parse_policy("if s[0] < 1 then action = 1\nif s[0] ! 2 then action = 0\nelse action = 0");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 9);
    }
}

TEST_CASE("format/parse round trip is byte identical") {
    oracle::PolicyGen gen(2024, 6, 3);
    for (int i = 0; i < 100; ++i) {
        const auto p = gen.policy();
        const auto text = format_policy(p);
        const auto back = parse_policy(text);
        REQUIRE(back == p);
        REQUIRE(format_policy(back) == text);
    }
}

TEST_CASE("JSON form round trips exactly") {
    oracle::PolicyGen gen(77, 6, 3);
    for (int i = 0; i < 50; ++i) {
        auto p = gen.policy();
        p.rules[0].predicates[0].threshold = 0.1 + 0.2;  // not 2-decimal representable
        REQUIRE(policy_from_json(nlohmann::json::parse(policy_to_json(p).dump())) == p);
    }
    CHECK_THROWS_AS(policy_from_json(nlohmann::json{{"rules", 3}}), ParseError);
}
