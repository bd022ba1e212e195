#include "ftrans/finite_algebra.hpp"

#include "ftrans/numeric.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <string>

namespace ftrans {

namespace {

void check_universe(unsigned n, unsigned cap) {
    if (n < 1 || n > cap)
        throw DomainError("universe size must lie in [1, " + std::to_string(cap) + "], got " + std::to_string(n));
}

Collection all_subsets(unsigned n) {
    unsigned count = 1u << n;
    return count == 64 ? ~Collection{0} : ((Collection{1} << count) - 1);
}

}  // namespace

Collection upward_closure(unsigned n, Collection c) {
    // one pass per element: add S ∪ {i} for every present S
    for (unsigned i = 0; i < n; ++i)
        for (SubsetMask s = 0; s < (1u << n); ++s)
            if ((c >> s) & 1u) c |= Collection{1} << (s | (1u << i));
    return c;
}

bool is_upward_closed(unsigned n, Collection c) { return upward_closure(n, c) == c; }

FiniteFamily FiniteFamily::from_generators(unsigned n, const std::vector<SubsetMask>& sets) {
    check_universe(n, 6);
    Collection c = 0;
    for (SubsetMask s : sets) {
        if (s >= (1u << n)) throw DomainError("subset outside the universe");
        c |= Collection{1} << s;
    }
    return from_members(n, upward_closure(n, c));
}

FiniteFamily FiniteFamily::from_members(unsigned n, Collection members) {
    check_universe(n, 6);
    if (members & ~all_subsets(n)) throw DomainError("collection has subsets outside the universe");
    if (members == 0) throw DomainError("a family must be non-empty");
    if (members & 1u) throw DomainError("a family must not contain the empty set");
    if (!is_upward_closed(n, members)) throw DomainError("a family must be upward closed");
    FiniteFamily f;
    f.n_ = n;
    f.members_ = members;
    return f;
}

std::vector<SubsetMask> FiniteFamily::minimal_sets() const {
    std::vector<SubsetMask> out;
    for (SubsetMask s = 1; s < (1u << n_); ++s) {
        if (!contains(s)) continue;
        bool minimal = true;
        for (unsigned i = 0; i < n_ && minimal; ++i)
            if ((s >> i & 1u) && contains(s & ~(1u << i))) minimal = false;
        if (minimal) out.push_back(s);
    }
    return out;
}

namespace {

/// All upward-closed collections (including empty and full) on n elements, built
/// from pairs (lower, upper) on n-1 elements with lower ⊆ upper.
std::vector<Collection> monotone_collections(unsigned n) {
    if (n == 0) return {0, 1};
    auto prev = monotone_collections(n - 1);
    unsigned half = 1u << (n - 1);
    std::vector<Collection> out;
    for (Collection without : prev)
        for (Collection with : prev)
            if ((without & ~with) == 0) out.push_back(without | (with << half));
    return out;
}

}  // namespace

std::vector<FiniteFamily> enumerate_families(unsigned n) {
    if (n > 5) throw ConfigError("exhaustive enumeration is limited to n <= 5; use sample_families for n = 6");
    check_universe(n, 5);
    std::vector<FiniteFamily> out;
    for (Collection c : monotone_collections(n))
        if (c != 0 && !(c & 1u)) out.push_back(FiniteFamily::from_members(n, c));
    std::sort(out.begin(), out.end(),
              [](const FiniteFamily& a, const FiniteFamily& b) { return a.members() < b.members(); });
    return out;
}

std::vector<FiniteFamily> sample_families(unsigned n, std::size_t count, std::uint64_t seed) {
    check_universe(n, 6);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<SubsetMask> pick(1, (1u << n) - 1);
    std::uniform_int_distribution<int> howmany(1, 4);
    std::vector<FiniteFamily> out;
    while (out.size() < count) {
        std::vector<SubsetMask> gens;
        for (int k = howmany(rng); k > 0; --k) gens.push_back(pick(rng));
        out.push_back(FiniteFamily::from_generators(n, gens));
    }
    return out;
}

FiniteFamily dual_family(const FiniteFamily& f) {
    unsigned n = f.universe_size();
    SubsetMask full = f.full();
    // A meets every member iff its complement contains no member, i.e. is not in F
    Collection d = 0;
    for (SubsetMask a = 0; a <= full; ++a)
        if (!f.contains(full & ~a)) d |= Collection{1} << a;
    if (d == 0 || (d & 1u)) throw InvariantViolation("dual family is empty or contains the empty set");
    return FiniteFamily::from_members(n, d);
}

Collection family_product(const FiniteFamily& f1, const FiniteFamily& f2) {
    if (f1.universe_size() != f2.universe_size()) throw DomainError("family_product: universe mismatch");
    SubsetMask full = f1.full();
    Collection out = 0;
    for (SubsetMask a = 0; a <= full; ++a) {
        if (!f1.contains(a)) continue;
        for (SubsetMask b = 0; b <= full; ++b)
            if (f2.contains(b)) out |= Collection{1} << (a & b);
    }
    return out;
}

bool collection_within(Collection c, const FiniteFamily& f) { return (c & ~f.members()) == 0; }

StructureReport structure_checks(const FiniteFamily& f) {
    StructureReport r;
    r.is_filter = collection_within(family_product(f, f), f);
    r.is_partition_regular = true;
    SubsetMask full = f.full();
    for (SubsetMask a = 1; a <= full && r.is_partition_regular; ++a) {
        if (!f.contains(a)) continue;
        // every 2-coloring of A: colour class a1 ⊆ A and its complement in A
        for (SubsetMask a1 = a;; a1 = (a1 - 1) & a) {
            if (!f.contains(a1) && !f.contains(a & ~a1)) {
                r.is_partition_regular = false;
                break;
            }
            if (a1 == 0) break;
        }
    }
    r.is_ultrafilter = r.is_filter && r.is_partition_regular;
    return r;
}

nlohmann::json to_json(const FiniteFamily& f) {
    nlohmann::json sets = nlohmann::json::array();
    for (SubsetMask s : f.minimal_sets()) {
        nlohmann::json elems = nlohmann::json::array();
        for (unsigned i = 0; i < f.universe_size(); ++i)
            if (s >> i & 1u) elems.push_back(i + 1);
        sets.push_back(elems);
    }
    return {{"n", f.universe_size()}, {"minimal_sets", sets}};
}

nlohmann::json LemmaReport::to_json() const {
    return {{"n", n},
            {"families", families},
            {"filters", filters},
            {"partition_regular", partition_regular},
            {"ultrafilters", ultrafilters},
            {"double_dual_ok", double_dual_ok},
            {"bridges_ok", bridges_ok},
            {"passed", passed()},
            {"counterexample", counterexample ? *counterexample : nlohmann::json(nullptr)}};
}

LemmaReport verify_lemma23(unsigned n) {
    if (n > 5) throw ConfigError("verify_lemma23 is exhaustive and limited to n <= 5");
    LemmaReport rep;
    rep.n = n;
    for (const FiniteFamily& f : enumerate_families(n)) {
        ++rep.families;
        FiniteFamily d = dual_family(f);
        StructureReport s = structure_checks(f);
        StructureReport sd = structure_checks(d);
        bool i = s.is_partition_regular;
        bool ii = collection_within(family_product(f, d), f);
        bool iii = sd.is_filter;
        bool dd = dual_family(d) == f;
        bool bridges = (i == sd.is_filter) && (s.is_filter == sd.is_partition_regular);
        bool ultra = !s.is_ultrafilter || d == f;
        rep.filters += s.is_filter;
        rep.partition_regular += i;
        rep.ultrafilters += s.is_ultrafilter;
        rep.double_dual_ok += dd;
        rep.bridges_ok += bridges;
        if (!rep.counterexample && !(i == ii && ii == iii && dd && bridges && ultra)) {
            rep.counterexample = nlohmann::json{{"family", to_json(f)},
                                                {"partition_regular", i},
                                                {"product_with_dual_within", ii},
                                                {"dual_is_filter", iii},
                                                {"double_dual", dd},
                                                {"bridges", bridges},
                                                {"ultrafilter_self_dual", ultra}};
        }
    }
    return rep;
}

}  // namespace ftrans
