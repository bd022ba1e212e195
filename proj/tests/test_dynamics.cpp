#include "helpers.hpp"
#include "oracles.hpp"

#include "ftrans/dynamics.hpp"

#include <doctest.h>

#include <functional>
#include <map>
#include <random>

using namespace ftrans;

namespace {

const std::vector<std::string> kPaper = {"p41_1", "p41_2",  "p41_3",  "bd1_nonmixing",
                                         "p44_ruler", "p52_ip", "p54_delta", "p58_rhc"};

bool subset(const RunSet& a, const RunSet& b) { return subtract(a, b).empty(); }

/// (B^m x)_k = prod_{i=k+1}^{k+m} w_i x_{k+m}, multiplying weight by weight.
DyadicVector brute_power(const std::function<oracle::i64(oracle::i64)>& wexp, bool unilateral,
                         const std::map<oracle::i64, Dyadic>& x, oracle::u64 m) {
    DyadicVector out;
    for (const auto& [idx, v] : x) {
        oracle::i64 k = idx - static_cast<oracle::i64>(m);
        if (unilateral && k < 0) continue;
        Dyadic y = v;
        for (oracle::i64 i = k + 1; i <= idx; ++i) y = y * Dyadic(1, wexp(i));
        out.set(k, out.get(k) + y);
    }
    return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("dyadic arithmetic") {
    Dyadic a = Dyadic::from_rational(Rational(3, 8)), b(5, 2);
    CHECK(a.num() == 3);
    CHECK(a.exp() == -3);
    CHECK(b == Dyadic(20));
    CHECK((a + b).to_rational() == Rational(163, 8));
    CHECK((a - b).to_rational() == Rational(-157, 8));
    CHECK((a * b).to_rational() == Rational(15, 2));
    CHECK(compare(a, b) < 0);
    CHECK(compare(Dyadic(1, 100000), Dyadic(1, 99999)) > 0);
    CHECK(compare(Dyadic(-1, 100000), Dyadic(1, -100000)) < 0);
    CHECK(compare(a, Rational(3, 8)) == 0);
    CHECK(Dyadic(0, 7) == Dyadic());
    CHECK_THROWS_AS(Dyadic::from_rational(Rational(1, 3)), DomainError);
    CHECK(to_string(a) == "3/2^3");
    CHECK(to_string(b) == "20");
    CHECK(witness_coefficient(2).to_rational() > Rational(1, 2));
    for (int r = 2; r < 200; ++r) {
        Rational c = witness_coefficient(r).to_rational();
        CHECK(c > Rational(1, r));
        CHECK(c < 1);
    }
}

TEST_CASE("vectors and open sets") {
    DyadicVector x = DyadicVector::unit(2, Dyadic(3)) + DyadicVector::unit(-1, Dyadic(-1, -1));
    CHECK(x.norm(Norm::sup).to_rational() == 3);
    CHECK(x.norm(Norm::l1).to_rational() == Rational(7, 2));
    CHECK((x - x).empty());
    CHECK(DyadicVector::from_json(x.to_json()) == x);
    CHECK(DyadicVector::from_json(nlohmann::json::parse(R"({"entries": [[0, "1/4"], [3, "-2"]]})")).get(3) == Dyadic(-2));
    CHECK_THROWS_AS(parse_norm("l2"), ConfigError);

    CylinderOpen u;
    u.kind = CylinderOpen::Kind::coord_lower_bound_with_norm_cap;
    u.j = 2;
    u.bound = Rational(1, 2);
    u.cap = 4;
    CHECK(u.contains(x));
    u.cap = 3;
    CHECK(!u.contains(x));
    CylinderOpen v;
    v.center = DyadicVector::unit(2, Dyadic(3));
    v.radius = Rational(1, 2);
    CHECK(!v.contains(x));
    v.radius = Rational(3, 4);
    CHECK(v.contains(x));
    v.norm = Norm::l1;
    CHECK(v.contains(x));
    v.radius = Rational(1, 2);
    CHECK(!v.contains(x));
}

TEST_CASE("apply_power examples") {
    WeightSpec bil = generate_weight("periodic", {{"kind", "bilateral"}, {"deltas", {"1", "-2", "3"}}});
    ExponentProfile p = profile_for(bil, -10, 10, 10);
    for (int j = -5; j <= 5; ++j) {
        DyadicVector y = apply_power(p, DyadicVector::unit(j), 1);
        CHECK(y == DyadicVector::unit(j - 1, Dyadic(1, p.weight_exponent(j))));
    }
    WeightSpec uni = generate_weight("bd1_nonmixing");
    for (int m : {1, 2, 7}) CHECK(apply_power(uni, DyadicVector::unit(0), m).empty());

    DyadicVector x = DyadicVector::unit(0) + DyadicVector::unit(5);
    auto e = oracle::bd1(100);
    DyadicVector got = apply_power(uni, x, 3);
    CHECK(got == DyadicVector::unit(2, Dyadic(1, e[3] + e[4] + e[5])));

    // S^n then B^n is the identity on finite supports
    ExponentProfile q = profile_for(uni, 0, 20, 50);
    DyadicVector z = DyadicVector::unit(3, Dyadic(5)) + DyadicVector::unit(11, Dyadic(-1, -4));
    for (int n : {0, 1, 9, 30}) CHECK(apply_power(q, apply_forward_power(q, z, n), n) == z);
}

TEST_CASE("apply_power matches element-wise products") {
    std::mt19937_64 rng(41);
    for (const auto& name : kPaper) {
        CAPTURE(name);
        auto e = oracle::weights(name, 1200);
        auto wexp = [&](oracle::i64 i) { return e.at(static_cast<std::size_t>(i)); };
        ExponentProfile p = compile_exponent_profile(generate_weight(name), 1200);
        for (int iter = 0; iter < 20; ++iter) {
            std::map<oracle::i64, Dyadic> entries;
            DyadicVector x;
            for (int k = 0; k < 4; ++k) {
                oracle::i64 idx = std::uniform_int_distribution<oracle::i64>(0, 50)(rng);
                Dyadic v(std::uniform_int_distribution<int>(-9, 9)(rng) | 1, std::uniform_int_distribution<int>(-5, 5)(rng));
                entries[idx] = v;
                x.set(idx, v);
            }
            oracle::u64 m = std::uniform_int_distribution<oracle::u64>(0, 1000)(rng);
            CHECK(apply_power(p, x, m) == brute_power(wexp, true, entries, m));
        }
    }
    const std::vector<oracle::i64> cyc{2, -1, 0, 1, -3};
    auto wexp = [&](oracle::i64 i) { return cyc[static_cast<std::size_t>(((i - 1) % 5 + 5) % 5)]; };
    WeightSpec bil = generate_weight("periodic", {{"kind", "bilateral"}, {"deltas", {"2", "-1", "0", "1", "-3"}}});
    ExponentProfile p = profile_for(bil, -50, 50, 1000);
    for (int iter = 0; iter < 30; ++iter) {
        std::map<oracle::i64, Dyadic> entries;
        DyadicVector x;
        for (int k = 0; k < 3; ++k) {
            oracle::i64 idx = std::uniform_int_distribution<oracle::i64>(-50, 50)(rng);
            entries[idx] = Dyadic(3);
            x.set(idx, Dyadic(3));
        }
        oracle::u64 m = std::uniform_int_distribution<oracle::u64>(0, 1000)(rng);
        REQUIRE(p.weight_exponent(1) == 2);
        CHECK(apply_power(p, x, m) == brute_power(wexp, false, entries, m));
    }
}

TEST_CASE("sandwich soundness") {
    std::vector<WeightSpec> specs;
    for (const auto& n : kPaper) specs.push_back(generate_weight(n));
    specs.push_back(generate_weight("constant", {{"kind", "bilateral"}}));
    specs.push_back(generate_weight("periodic", {{"kind", "bilateral"}, {"deltas", {"1", "1", "-1", "-1", "-1", "1"}}}));
    for (const auto& w : specs) {
        CAPTURE(w.name);
        for (int j : {0, 2})
            for (int n : {1, 3})
                for (Norm norm : {Norm::sup, Norm::l1}) {
                    SandwichReport r = return_set_bounds(w, j, n, n + 2, 2000, norm);
                    CHECK(r.sound());
                    CHECK(subset(r.lower, r.upper));
                    for (const auto& [m, ok] : r.per_m) CHECK(ok == r.lower.contains(m));
                }
    }
    CHECK_THROWS_AS(return_set_bounds(specs[0], 0, 2, 2, 100), DomainError);
    CHECK_THROWS_AS(return_set_bounds(specs[0], -1, 1, 2, 100), DomainError);
}

TEST_CASE("sandwich examples") {
    SandwichReport two = return_set_bounds(generate_weight("constant", {{"kind", "bilateral"}}), 0, 1, 2, 1000);
    CHECK(two.sound());
    CHECK(two.upper.empty());  // Ā is empty: products below 0 never shrink

    const oracle::u64 h = 10000;
    SandwichReport bd = return_set_bounds(generate_weight("bd1_nonmixing"), 0, 1, 4, h);
    CHECK(bd.sound());
    auto e = oracle::prefix(oracle::bd1(h));
    oracle::Bits returns(h + 1);
    for (oracle::u64 n = 1; n <= h; ++n) returns[n] = e[n] == 0;
    CHECK(complement(bd.upper, h) == oracle::runset(returns));
}

TEST_CASE("upward-closed verdicts pass from the lower bound to the upper bound") {
    const Nat h = 100000;
    FamilyParams p;
    p.rule = HorizonRule::threshold;  // fixed thresholds keep the verdicts monotone in the set
    for (const auto& name : kPaper) {
        CAPTURE(name);
        SandwichReport r = return_set_bounds(generate_weight(name), 0, 1, 2, h);
        for (const char* f : {"syndetic", "thick", "piecewise_syndetic", "BD_upper_pos"}) {
            CAPTURE(f);
            if (membership_verdict(r.lower, f, h, p).holds()) CHECK(membership_verdict(r.upper, f, h, p).holds());
        }
    }
}

TEST_CASE("criterion examples") {
    CriterionReport u = criterion_check(generate_weight("bd1_nonmixing"), DyadicVector::unit(0), Rational(1, 8), 1000);
    CHECK(u.backward_small == RunSet::interval(1, 1000));
    CHECK(u.passed());

    CriterionReport c =
        criterion_check(generate_weight("constant", {{"kind", "bilateral"}}), DyadicVector::unit(0), Rational(1, 8), 1000);
    CHECK(c.forward_small == RunSet::interval(4, 1000));
    CHECK(c.passed());

    DyadicVector x = DyadicVector::unit(0) + DyadicVector::unit(1);
    CriterionReport ip = criterion_check(generate_weight("p52_ip"), x, Rational(1, 16), 10000);
    CHECK(ip.passed());
    CHECK_THROWS_AS(criterion_check(generate_weight("p52_ip"), x, 0, 100), DomainError);

    for (const auto& name : kPaper)
        for (Norm norm : {Norm::sup, Norm::l1}) {
            CAPTURE(name);
            DyadicVector y = DyadicVector::unit(0, Dyadic(3)) + DyadicVector::unit(4, Dyadic(-1, -2));
            CHECK(criterion_check(generate_weight(name), y, Rational(1, 4), 5000, norm).passed());
        }
}

}  // TEST_SUITE
