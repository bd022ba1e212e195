#pragma once

#include "ftrans/numeric.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <variant>
#include <vector>

namespace ftrans {

/// Half-open interval [lo, hi) of positive integers.
struct Run {
    Nat lo;
    Nat hi;
    Nat length() const { return hi - lo; }
    friend bool operator==(const Run&, const Run&) = default;
};

/// A subset of Z+ = {1, 2, ...} stored as sorted, disjoint, non-adjacent runs.
/// Immutable once built; every query costs O(log R) or O(R) in the run count.
class RunSet {
public:
    RunSet() = default;

    /// Sorts, merges overlapping/adjacent runs, drops empty ones and clips to >= 1.
    static RunSet from_runs(std::vector<Run> runs);
    /// Trusts that runs are already normalized (checked in debug builds).
    static RunSet from_sorted(std::vector<Run> runs);
    static RunSet interval(const Nat& lo, const Nat& hi_inclusive);
    static RunSet from_elements(std::vector<Nat> elements);

    const std::vector<Run>& runs() const { return runs_; }
    std::size_t run_count() const { return runs_.size(); }
    bool empty() const { return runs_.empty(); }
    Nat cardinality() const;
    std::optional<Nat> min() const;
    std::optional<Nat> max() const;

    bool contains(const Nat& x) const;
    /// |A ∩ [1, n]|.
    Nat prefix_count(const Nat& n) const;
    /// |A ∩ [lo, hi]| (inclusive bounds).
    Nat count_in(const Nat& lo, const Nat& hi) const;
    /// Index of the first run with hi > x (runs().size() if none).
    std::size_t run_at_or_after(const Nat& x) const;

    /// Normalization invariant; throws InvariantViolation if broken.
    void check() const;

    friend bool operator==(const RunSet& a, const RunSet& b) { return a.runs_ == b.runs_; }

private:
    void index();
    std::vector<Run> runs_;
    std::vector<Nat> before_;  // elements in runs_[0..i)
};

// --- set algebra -----------------------------------------------------------

RunSet unite(const RunSet& a, const RunSet& b);
RunSet intersect(const RunSet& a, const RunSet& b);
RunSet subtract(const RunSet& a, const RunSet& b);
/// [1, horizon] \ A.
RunSet complement(const RunSet& a, const Nat& horizon);
RunSet restrict(const RunSet& a, const Nat& horizon);
/// A + i.
RunSet shift_plus(const RunSet& a, const Nat& i);
/// (A - i) ∩ Z+.
RunSet shift_minus(const RunSet& a, const Nat& i);
/// nA. Costs one run per element when n > 1.
RunSet scale(const RunSet& a, const Nat& n);
/// A/n = {m : nm ∈ A}.
RunSet contract(const RunSet& a, const Nat& n);

enum class SetOp { unite, intersect, subtract, complement, restrict, shift_plus, shift_minus, scale, contract };
SetOp parse_set_op(std::string_view name);

/// Uniform entry point; `arg` is a set for binary operations and an integer otherwise.
/// The result is restricted to [1, horizon] when a horizon is given.
RunSet set_algebra(SetOp op, const RunSet& a, const std::variant<RunSet, Nat>& arg,
                   const std::optional<Nat>& horizon = std::nullopt);

// --- counting ----------------------------------------------------------------

/// Largest difference of consecutive elements of A ∩ [1, n]; nullopt ("infinite")
/// when fewer than two elements.
std::optional<Nat> max_gap(const RunSet& a, const Nat& n);
/// Longest run of consecutive integers inside A ∩ [1, n].
Nat max_run(const RunSet& a, const Nat& n);

struct WindowExtreme {
    Nat count;
    Nat k;  // window is [k+1, k+s]
};
/// min/max over k in [k_lo, k_hi] of |A ∩ [k+1, k+s]|, O(R log R) via breakpoints.
WindowExtreme window_min(const RunSet& a, const Nat& s, const Nat& k_lo, const Nat& k_hi);
WindowExtreme window_max(const RunSet& a, const Nat& s, const Nat& k_lo, const Nat& k_hi);

// --- derived sets ------------------------------------------------------------

/// {m ∈ A ∩ [1, horizon] : [max(1, m-N), m+N] ⊆ A}.
RunSet shrink(const RunSet& a, const Nat& n, const Nat& horizon);
/// |{x ∈ A∩[1,H] : x + v ∈ A∩[1,H]}|.
Nat difference_multiplicity(const RunSet& a, const Nat& v, const Nat& horizon);
/// (A - A) ∩ [1, horizon] for A ∩ [1, source_horizon]; costs O(|A|^2) bit operations.
RunSet positive_differences(const RunSet& a, const Nat& source_horizon, const Nat& horizon);

// --- serialization -------------------------------------------------------------

nlohmann::json to_json(const RunSet& a);
RunSet runset_from_json(const nlohmann::json& j);

}  // namespace ftrans
