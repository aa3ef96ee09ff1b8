#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ruleforge/errors.hpp"
#include "ruleforge/evolution.hpp"

using namespace ruleforge;

namespace {

struct Setup {
    EnvSpec spec = env_spec("cartpole");
    VariationConfig cfg = default_variation(spec);
};

bool in_grid(const VariationConfig& cfg, const Predicate& p) {
    const auto& set = cfg.threshold_sets[p.dim];
    return std::find(set.begin(), set.end(), p.threshold) != set.end();
}

}  // namespace

TEST_CASE("threshold grids: 2-decimal values over the physical ranges") {
    const auto cfg = default_variation(env_spec("cartpole"));
    REQUIRE(cfg.threshold_sets.size() == 4);
    CHECK(cfg.threshold_sets[0].front() == -2.4);
    CHECK(cfg.threshold_sets[0].back() == 2.4);
    CHECK(cfg.threshold_sets[0].size() == 41);
    for (const auto& set : cfg.threshold_sets) {
        CHECK(std::is_sorted(set.begin(), set.end()));
        for (double v : set) {
            CHECK(std::round(v * 100.0) / 100.0 == v);
            CHECK_FALSE((std::signbit(v) && v == 0.0));
        }
    }
    CHECK(max_abs_threshold(cfg) == 3.0);
    const auto mc = default_variation(env_spec("mountaincar"));
    CHECK(mc.threshold_sets[1].size() == 15);  // [-0.07, 0.07] collapses after rounding
    CHECK(max_abs_threshold(default_variation(env_spec("acrobot"))) == doctest::Approx(28.27));
}

TEST_CASE("random_policy satisfies every invariant") {
    Setup s;
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const auto p = random_policy(s.spec, s.cfg, rng);
        REQUIRE_NOTHROW(validate(p, s.cfg.limits()));
        for (const auto& r : p.rules) {
            for (const auto& pr : r.predicates) REQUIRE(in_grid(s.cfg, pr));
        }
    }
}

TEST_CASE("random_policy with unit bounds has complexity 1") {
    Setup s;
    s.cfg.max_rules = 1;
    s.cfg.max_predicates_per_rule = 1;
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) REQUIRE(complexity(random_policy(s.spec, s.cfg, rng)) == 1);
}

TEST_CASE("random_policy rule counts are uniform (chi-square, alpha 0.01)") {
    Setup s;
    Rng rng(3);
    constexpr int n = 100000;
    std::vector<int> hist(s.cfg.max_rules + 1, 0);
    for (int i = 0; i < n; ++i) ++hist[random_policy(s.spec, s.cfg, rng).rules.size()];
    CHECK(hist[0] == 0);
    const double expected = static_cast<double>(n) / static_cast<double>(s.cfg.max_rules);
    double chi2 = 0.0;
    for (std::size_t k = 1; k <= s.cfg.max_rules; ++k) chi2 += std::pow(hist[k] - expected, 2) / expected;
    CHECK(chi2 < 15.08627246938899);  // chi2.ppf(0.99, df=5)
}

TEST_CASE("mutate: caps respected under forced kinds") {
    Setup s;
    Rng rng(4);
    auto full = random_policy(s.spec, s.cfg, rng);
    while (full.rules.size() < s.cfg.max_rules) full.rules.push_back(random_rule(s.cfg, rng));
    for (int i = 0; i < 200; ++i) {
        const auto child = mutate_as(full, MutationKind::AddRule, s.cfg, rng);
        REQUIRE(child.rules.size() <= s.cfg.max_rules);
        REQUIRE(oracle::classify_edit(full, child) == oracle::EditKind::PredicateField);
    }
    Policy single{{random_rule(s.cfg, rng)}, 0};
    for (int i = 0; i < 200; ++i) {
        const auto child = mutate_as(single, MutationKind::RemoveRule, s.cfg, rng);
        REQUIRE(child.rules.size() == 1);
    }
}

TEST_CASE("mutate: exactly one elementary edit, parent untouched") {
    Setup s;
    Rng rng(5);
    std::array<int, 4> seen{};
    for (int i = 0; i < 10000; ++i) {
        const auto parent = random_policy(s.spec, s.cfg, rng);
        const auto copy = parent;
        const auto child = mutate(parent, s.cfg, rng);
        REQUIRE(parent == copy);
        const auto kind = oracle::classify_edit(parent, child);
        REQUIRE(kind != oracle::EditKind::Other);
        REQUIRE(kind != oracle::EditKind::None);
        ++seen[static_cast<int>(kind) - 1];
        REQUIRE_NOTHROW(validate(child, s.cfg.limits()));
    }
    for (int c : seen) CHECK(c > 0);
}

TEST_CASE("mutate is reproducible from the generator seed") {
    Setup s;
    Rng a(6), b(6);
    Rng gen(60);
    const auto p = random_policy(s.spec, s.cfg, gen);
    for (int i = 0; i < 100; ++i) REQUIRE(mutate(p, s.cfg, a) == mutate(p, s.cfg, b));
}

TEST_CASE("crossover_at follows the single-point rule") {
    Setup s;
    const Rule A{{{0, Op::LessThan, 0.1}}, 0}, B{{{1, Op::LessThan, 0.2}}, 1};
    const Rule C{{{2, Op::GreaterThan, 0.3}}, 0}, D{{{3, Op::GreaterThan, 0.4}}, 1};
    const Policy p1{{A, B}, 0}, p2{{C, D}, 1};
    CHECK(crossover_at(p1, p2, 1, s.cfg) == Policy{{A, D}, 0});
    CHECK(crossover_at(p1, p2, 2, s.cfg) == Policy{{A, B}, 0});
    const Policy longer{{C, D, A, B, C, D}, 0};
    s.cfg.max_rules = 4;
    CHECK(crossover_at(Policy{{A, B}, 0}, longer, 1, s.cfg).rules == std::vector<Rule>{A, D, A, B});
    CHECK_THROWS_AS(crossover_at(p1, p2, 0, s.cfg), UsageError);
    CHECK_THROWS_AS(crossover_at(p1, p2, 3, s.cfg), UsageError);
}

TEST_CASE("crossover: self-crossover identity and provenance") {
    Setup s;
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const auto p1 = random_policy(s.spec, s.cfg, rng);
        const auto p2 = random_policy(s.spec, s.cfg, rng);
        REQUIRE(crossover(p1, p1, s.cfg, rng).rules == p1.rules);

        const auto c1 = p1, c2 = p2;
        const auto child = crossover(p1, p2, s.cfg, rng);
        REQUIRE(p1 == c1);
        REQUIRE(p2 == c2);
        REQUIRE(child.rules.size() >= 1);
        REQUIRE(child.rules.size() <= s.cfg.max_rules);
        REQUIRE(child.fallback_action == p1.fallback_action);
        // Some c in [1, |p1|] explains the child: prefix from p1, then p2 at the same indices.
        bool explained = false;
        for (std::size_t c = 1; c <= p1.rules.size() && !explained; ++c) {
            bool ok = child.rules.size() == std::min(s.cfg.max_rules, c + (p2.rules.size() > c ? p2.rules.size() - c : 0));
            for (std::size_t i = 0; ok && i < child.rules.size(); ++i) {
                ok = i < c ? child.rules[i] == p1.rules[i] : child.rules[i] == p2.rules[i];
            }
            explained = ok;
        }
        REQUIRE(explained);
    }
}

TEST_CASE("variation closure fuzz") {
    Setup s;
    Rng rng(8);
    std::vector<Policy> pool;
    for (int i = 0; i < 32; ++i) pool.push_back(random_policy(s.spec, s.cfg, rng));
    for (int i = 0; i < 100000; ++i) {
        const auto& a = pool[rng.uniform_index(pool.size())];
        const auto& b = pool[rng.uniform_index(pool.size())];
        auto child = rng.bernoulli(0.5) ? crossover(a, b, s.cfg, rng) : mutate(a, s.cfg, rng);
        REQUIRE(child.rules.size() >= 1);
        REQUIRE(child.rules.size() <= s.cfg.max_rules);
        validate_structure(child);
        pool[rng.uniform_index(pool.size())] = std::move(child);
    }
}

TEST_CASE("select_elites ranks by fitness, then complexity, then insertion") {
    GridSpec grid{6, 16, 3.0};
    Archive archive(grid);
    CHECK_THROWS_AS(select_elites(archive, 3), UsageError);

    const Policy two{{{{{2, Op::GreaterThan, -0.02}, {3, Op::GreaterThan, -0.30}}, 1}}, 0};
    const Policy four{{{{{2, Op::GreaterThan, -0.02}, {3, Op::GreaterThan, -0.30}}, 1},
                       {{{0, Op::GreaterThan, 2.0}, {1, Op::GreaterThan, 2.0}}, 0}},
                      0};
    archive.insert(four, 500.0 - 0.1 * 4, 1);
    CHECK(select_elites(archive, 4).size() == 1);
    archive.insert(two, 500.0 - 0.1 * 2, 1);
    auto elites = select_elites(archive, 4);
    REQUIRE(elites.size() == 2);
    CHECK(elites[0] == two);

    Archive tie(grid);
    const Policy three{{{{{0, Op::GreaterThan, 0.5}, {1, Op::GreaterThan, 0.5}, {2, Op::GreaterThan, 0.5}}, 1}}, 0};
    const Policy two_b{{{{{0, Op::GreaterThan, 0.0}, {1, Op::GreaterThan, 0.0}}, 1}}, 0};
    tie.insert(three, 100.0, 1);
    tie.insert(two_b, 100.0, 2);
    CHECK(select_elites(tie, 1)[0] == two_b);

    CHECK(elite_count(0.25, 200) == 50);
    CHECK(elite_count(0.25, 2) == 1);
    CHECK(elite_count(0.01, 10) == 1);
}
