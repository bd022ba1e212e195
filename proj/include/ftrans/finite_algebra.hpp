#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace ftrans {

/// Subset of {1..n} encoded as a bitmask (bit i-1 <-> element i).
using SubsetMask = std::uint32_t;
/// Collection of subsets of {1..n}, n <= 6: bit S set iff subset S is present.
using Collection = std::uint64_t;

/// Non-empty upward-closed collection of non-empty subsets of {1..n}.
class FiniteFamily {
public:
    /// Upward closure of the given generators; throws DomainError if the result is
    /// empty, contains the empty set, or n is outside [1, 6].
    static FiniteFamily from_generators(unsigned n, const std::vector<SubsetMask>& sets);
    /// Trusts that `members` is upward closed (validated).
    static FiniteFamily from_members(unsigned n, Collection members);

    unsigned universe_size() const { return n_; }
    Collection members() const { return members_; }
    bool contains(SubsetMask s) const { return (members_ >> s) & 1u; }
    SubsetMask full() const { return static_cast<SubsetMask>((1u << n_) - 1); }
    std::vector<SubsetMask> minimal_sets() const;

    friend bool operator==(const FiniteFamily&, const FiniteFamily&) = default;

private:
    unsigned n_ = 1;
    Collection members_ = 0;
};

/// Upward closure of a collection inside the lattice of subsets of {1..n}.
Collection upward_closure(unsigned n, Collection c);
bool is_upward_closed(unsigned n, Collection c);

/// Every family on {1..n}, n <= 5, exactly once (ordered by membership mask).
std::vector<FiniteFamily> enumerate_families(unsigned n);
/// Random families for universes too large to enumerate (n <= 6).
std::vector<FiniteFamily> sample_families(unsigned n, std::size_t count, std::uint64_t seed);

/// F* = {A : A meets every member of F}.
FiniteFamily dual_family(const FiniteFamily& f);
/// Raw collection {A ∩ B : A ∈ F1, B ∈ F2}; may contain the empty set.
Collection family_product(const FiniteFamily& f1, const FiniteFamily& f2);
bool collection_within(Collection c, const FiniteFamily& f);

struct StructureReport {
    bool is_filter = false;
    bool is_partition_regular = false;
    bool is_ultrafilter = false;
};
StructureReport structure_checks(const FiniteFamily& f);

struct LemmaReport {
    unsigned n = 0;
    std::size_t families = 0;
    std::size_t filters = 0;
    std::size_t partition_regular = 0;
    std::size_t ultrafilters = 0;
    std::size_t double_dual_ok = 0;
    std::size_t bridges_ok = 0;
    std::optional<nlohmann::json> counterexample;

    bool passed() const { return !counterexample; }
    nlohmann::json to_json() const;
};

/// Checks, for every family F on {1..n}: F partition regular <=> F·F* ⊆ F <=> F* filter,
/// plus (F*)* = F, the two duality bridges and "ultrafilter => F = F*".
LemmaReport verify_lemma23(unsigned n);

nlohmann::json to_json(const FiniteFamily& f);

}  // namespace ftrans
