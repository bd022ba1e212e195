#include "helpers.hpp"
#include "oracles.hpp"

#include "ftrans/families.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace ftrans;

namespace {

RunSet four_sums(oracle::u64 h) {
    auto v = oracle::four_sums(h);
    return RunSet::from_elements(std::vector<Nat>(v.begin(), v.end()));
}

RunSet quadratic_seed(oracle::u64 h) {
    auto v = oracle::quadratic_seed(h);
    return RunSet::from_elements(std::vector<Nat>(v.begin(), v.end()));
}

bool holds(const RunSet& a, const char* family, oracle::u64 h, const FamilyParams& p = {}) {
    return membership_verdict(a, family, h, p).holds();
}

}  // namespace

TEST_SUITE("families") {

TEST_CASE("membership examples") {
    Verdict v = membership_verdict(th::evens(10000), "syndetic", 10000);
    CHECK(v.status == VerdictStatus::holds_at_horizon);
    CHECK(v.witness["gap"] == "2");

    RunSet b = four_sums(1000000);
    Verdict a1 = membership_verdict(complement(b, 100000), "syndetic", 100000);
    CHECK(a1.status == VerdictStatus::holds_at_horizon);
    CHECK(a1.witness["gap"] == "2");

    CHECK(membership_verdict(b, "piecewise_syndetic", 1000000).status == VerdictStatus::fails_at_horizon);

    CHECK_THROWS_AS(membership_verdict(b, "sparse", 100), ConfigError);
}

TEST_CASE("every family on simple sets") {
    const oracle::u64 h = 10000;
    RunSet full = RunSet::interval(1, h), tail = RunSet::interval(h / 4, h);
    for (const auto& f : family_names()) {
        CAPTURE(f);
        CHECK(holds(full, f.c_str(), h));
        CHECK(!holds(RunSet(), f.c_str(), h));
    }
    CHECK(holds(tail, "cofinite", h));
    CHECK(!holds(th::evens(h), "cofinite", h));
    CHECK(!holds(th::evens(h), "thick", h));
    CHECK(holds(th::evens(h), "D_lower_pos", h));
    CHECK(!holds(th::evens(h), "D_upper_1", h));
    CHECK(!holds(th::evens(h), "thickly_syndetic", h));
}

TEST_CASE("IP examples") {
    const oracle::u64 h = 100000;
    RunSet b = four_sums(h), a = complement(b, h);
    std::vector<Nat> gens;
    for (unsigned n = 1; n <= 6; ++n) gens.push_back(pow2(2 * n));
    Verdict in_b = ip_verdict(b, IpMode::contains_fs, gens, h);
    CHECK(in_b.holds());
    Verdict in_a = ip_verdict(a, IpMode::contains_fs, gens, h);
    CHECK(!in_a.holds());
    CHECK(verify_verdict(in_b, b));
    CHECK(verify_verdict(in_a, a));

    Verdict star = ip_verdict(a, IpMode::misses_fs, {}, h);
    CHECK(star.status == VerdictStatus::fails_at_horizon);
    CHECK(verify_verdict(star, a));

    CHECK(ip_verdict(RunSet::interval(1, h), IpMode::contains_fs, gens, h).holds());

    FamilyParams p;
    p.ip_depth = 1;
    CHECK(!ip_verdict(th::evens(1000), IpMode::misses_fs, {}, 1000, p).holds());
    for (unsigned d = 2; d <= 4; ++d) {
        p.ip_depth = d;
        Verdict v = ip_verdict(th::evens(1000), IpMode::misses_fs, {}, 1000, p);
        CHECK(v.holds());
        CHECK(v.witness["search_complete"] == true);
    }
}

TEST_CASE("Delta examples") {
    const oracle::u64 h = 100000;
    std::vector<Nat> seed;
    for (unsigned m = 1; m <= 200; ++m) seed.push_back(2 * m);
    Verdict d = delta_verdict(th::evens(1000), DeltaMode::contains_diffset, seed, 1000);
    CHECK(d.holds());
    CHECK(verify_verdict(d, th::evens(1000)));
    CHECK(!delta_verdict(th::odds(1000), DeltaMode::contains_diffset, seed, 1000).holds());

    Verdict odd = delta_verdict(th::odds(h), DeltaMode::dual_evidence, {}, h);
    CHECK(odd.status == VerdictStatus::fails_at_horizon);
    CHECK(verify_verdict(odd, th::odds(h)));

    RunSet a = complement(quadratic_seed(h), h);
    Verdict q = delta_verdict(a, DeltaMode::dual_evidence, {}, h);
    CHECK(q.status == VerdictStatus::holds_at_horizon);
    auto seed_elems = oracle::quadratic_seed(h);
    std::set<oracle::u64> in_seed(seed_elems.begin(), seed_elems.end());
    oracle::u64 peak = 0;
    for (oracle::u64 v = 1; v <= 50; ++v) {
        oracle::u64 m = 0;
        for (oracle::u64 x : seed_elems) m += (x + v <= h && in_seed.count(x + v)) ? 1 : 0;
        peak = std::max(peak, m);
    }
    CHECK(q.witness["max_multiplicity"] == std::to_string(peak));  // bounded, though above 2 for v <= 50
    CHECK(verify_verdict(q, a));
    CHECK(holds(a, "syndetic", h));  // Δ*-at-horizon also passes syndetic

    std::vector<Nat> bad{Nat(3), Nat(3)};
    CHECK_THROWS_AS(delta_verdict(a, DeltaMode::contains_diffset, bad, h), DomainError);
}

TEST_CASE("transforms") {
    const oracle::u64 h = 20000;
    const unsigned n_max = 3;
    std::vector<Run> runs;
    for (oracle::u64 x = 1; x <= h; x += 12) runs.push_back({x, x + 2 * n_max + 2});
    RunSet ts = RunSet::from_runs(runs);
    FamilyParams p;
    p.shrink_max = n_max;
    Verdict tilde = family_transform(ts, "syndetic", Transform::tilde, 0, n_max, h, p);
    CHECK(tilde.holds());
    CHECK(holds(ts, "thickly_syndetic", h, p));
    CHECK(verify_verdict(tilde, ts));

    CHECK(!family_transform(th::evens(h), "thick", Transform::tilde, 0, 1, h).holds());

    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        RunSet a = oracle::random_set(rng, h, 0.6, 30);
        for (const char* f : {"syndetic", "thick", "D_upper_pos", "BD_lower_1"}) {
            CHECK(family_transform(a, f, Transform::plus, 0, 0, h).holds() == holds(a, f, h));
            CHECK(family_transform(a, f, Transform::bullet, 0, 0, h).holds() == holds(a, f, h));
        }
    }

    // translation: F + k membership of A reduces to F membership of the translate
    RunSet a = th::rs({{5, 10}});
    CHECK(translate_for_family(a, 3) == th::rs({{2, 7}}));
    CHECK(translate_for_family(a, -2) == th::rs({{1, 3}, {7, 12}}));
    Verdict plus = family_transform(th::odds(h), "syndetic", Transform::plus, 2, 0, h);
    Verdict bullet = family_transform(th::odds(h), "syndetic", Transform::bullet, 2, 0, h);
    CHECK(plus.holds());
    CHECK(bullet.holds());
    CHECK(verify_verdict(plus, th::odds(h)));
    CHECK(verify_verdict(bullet, th::odds(h)));
}

TEST_CASE("hierarchy consistency and monotonicity") {
    std::mt19937_64 rng(17);
    const oracle::u64 h = 10000;
    FamilyParams p;
    p.gap_max = 16;
    for (int iter = 0; iter < 60; ++iter) {
        RunSet a = oracle::random_set(rng, h, iter % 3 == 0 ? 0.9 : 0.5, iter % 2 ? 8 : 120);
        if (iter % 5 == 0) a = unite(a, RunSet::interval(h / 2 + iter, h));
        RunSet b = unite(a, oracle::random_set(rng, h, 0.3, 20));
        CAPTURE(iter);
        bool synd = holds(a, "syndetic", h, p), thick = holds(a, "thick", h, p);
        FamilyParams trend = p;
        trend.rule = HorizonRule::trend;
        // a fixed gap bound also judges the head, so only the trend rule sees cofinite => syndetic
        if (holds(a, "cofinite", h, p)) CHECK((thick && holds(a, "syndetic", h, trend)));
        if (holds(a, "thickly_syndetic", h, p)) CHECK(synd);
        CHECK(synd == holds(a, "BD_lower_pos", h, p));
        CHECK(thick == holds(a, "BD_upper_1", h, p));
        for (const auto& f : family_names()) {
            CAPTURE(f);
            if (holds(a, f.c_str(), h, p)) CHECK(holds(b, f.c_str(), h, p));
        }
    }
}

TEST_CASE("witness soundness and corrupted witnesses") {
    std::mt19937_64 rng(23);
    const oracle::u64 h = 5000;
    std::vector<RunSet> sets{th::evens(h), complement(four_sums(h), h), RunSet::interval(100, h),
                             th::rs({{1, 3}, {4000, 4100}})};
    for (int i = 0; i < 12; ++i) sets.push_back(oracle::random_set(rng, h, 0.5 + 0.04 * i, 4 + 20 * (i % 4)));
    std::size_t rejected = 0, total = 0;
    for (const RunSet& a : sets) {
        for (HorizonRule rule : {HorizonRule::threshold, HorizonRule::trend}) {
            FamilyParams p;
            p.rule = rule;
            for (const auto& f : family_names()) {
                Verdict v = membership_verdict(a, f, h, p);
                CAPTURE(f);
                REQUIRE(verify_verdict(v, a));
                REQUIRE(verify_verdict(verdict_from_json(nlohmann::json::parse(to_json(v).dump())), a));

                Verdict flipped = v;
                flipped.status = v.holds() ? VerdictStatus::fails_at_horizon : VerdictStatus::holds_at_horizon;
                ++total;
                rejected += verify_verdict(flipped, a) ? 0 : 1;

                Verdict other = v;  // same verdict presented for a different set
                RunSet changed = v.holds() ? RunSet() : RunSet::interval(1, h);
                CHECK(!verify_verdict(other, changed));
            }
        }
        Verdict d = delta_verdict(a, DeltaMode::dual_evidence, {}, h);
        REQUIRE(verify_verdict(d, a));
        Verdict df = d;
        df.status = d.holds() ? VerdictStatus::fails_at_horizon : VerdictStatus::holds_at_horizon;
        CHECK(!verify_verdict(df, a));
    }
    CHECK(rejected == total);

    Verdict v = membership_verdict(th::evens(h), "syndetic", h);
    v.witness["gap"] = "1";
    CHECK(!verify_verdict(v, th::evens(h)));
    v.witness = nlohmann::json::object();
    CHECK(!verify_verdict(v, th::evens(h)));
}

TEST_CASE("positive Banach density sets have Δ* difference sets") {
    std::mt19937_64 rng(29);
    const oracle::u64 h = 3000;
    for (int i = 0; i < 100; ++i) {
        RunSet a = oracle::random_set(rng, 2 * h, 0.35 + 0.002 * i, 6);
        REQUIRE(window_min(a, 200, 0, 2 * h - 200).count >= 20);  // every window is well populated
        RunSet d = positive_differences(a, 2 * h, h);
        Verdict v = delta_verdict(d, DeltaMode::dual_evidence, {}, h);
        CHECK(v.holds());
    }
}

TEST_CASE("verdict json") {
    Verdict v = membership_verdict(th::evens(100), "syndetic", 100);
    auto j = to_json(v);
    CHECK(j["family"] == "syndetic");
    CHECK(j["status"] == "holds_at_horizon");
    CHECK(j["horizon"] == "100");
    Verdict back = verdict_from_json(j);
    CHECK(back.status == v.status);
    CHECK(back.witness == v.witness);
    CHECK(parse_status("certified") == VerdictStatus::certified);
}

}  // TEST_SUITE
