#pragma once

#include "ftrans/families.hpp"
#include "ftrans/intset.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ftrans {

// --- weight programs ------------------------------------------------------------
//
// Every weight is a power of two, w_i = 2^{e_i}, so a weight sequence is described
// by its exponent increments. A segment (length, delta) stands for `length`
// consecutive weights 2^delta; E(n) = e_1 + ... + e_n is then piecewise linear.

enum class ShiftKind { unilateral, bilateral };
std::string_view to_string(ShiftKind k);

struct Segment {
    Nat length;
    Int delta;
    friend bool operator==(const Segment&, const Segment&) = default;
};
using Block = std::vector<Segment>;

/// none: the program is the whole (finite) sequence; cycle: it repeats forever in
/// both directions; scheme: the named construction's generator is authoritative and
/// `program` only holds a preview of its first blocks.
enum class RepeatRule { none, cycle, scheme };

struct WeightSpec {
    ShiftKind kind = ShiftKind::unilateral;
    std::string name = "explicit";
    nlohmann::json params = nlohmann::json::object();
    std::vector<Block> program;
    RepeatRule repeat = RepeatRule::none;
    Nat origin = 0;  // bilateral: the first `origin` program weights sit at indices <= 0

    nlohmann::json to_json() const;
    static WeightSpec from_json(const nlohmann::json& j);
};

struct ConstructionInfo {
    std::string name;
    std::string summary;
    bool lacunary;           // natural checkpoints grow super-exponentially
    bool exposes_reset_set;  // weights of the form 2 except resets on an explicit set B
};
const std::vector<ConstructionInfo>& constructions();
const ConstructionInfo& construction_info(std::string_view name);

/// Named constructions plus the generic "constant" and "periodic" helpers.
WeightSpec generate_weight(std::string_view construction, const nlohmann::json& params = {});

// --- exponent profile -------------------------------------------------------------

/// One linear piece: E(first - 1 + k) = base + slope * k for k = 1..length.
struct ProfileSegment {
    Nat first;
    Nat length;
    Int slope;
    Int base;
};

/// Pieces covering [1, extent] contiguously. Stored as machine words while every
/// coordinate and value stays below 2^62, as big integers otherwise.
class SegmentTable {
public:
    struct Word {
        std::int64_t first, length, slope, base;
    };
    static constexpr std::int64_t kWordLimit = std::int64_t(1) << 62;

    std::size_t size() const { return wide_ ? big_.size() : small_.size(); }
    bool empty() const { return size() == 0; }
    ProfileSegment operator[](std::size_t i) const;
    /// Word storage is valid only while compact() holds.
    bool compact() const { return !wide_; }
    const std::vector<Word>& words() const { return small_; }
    const std::vector<ProfileSegment>& wide() const { return big_; }
    /// Appends a piece, merging it into the last one when the slopes agree.
    void append(const Nat& first, const Nat& length, const Int& slope, const Int& base);
    /// Word-sized append; the caller guarantees the piece stays below kWordLimit.
    void append_word(std::int64_t first, std::int64_t length, std::int64_t slope, std::int64_t base);

private:
    void widen();
    bool wide_ = false;
    std::vector<Word> small_;
    std::vector<ProfileSegment> big_;
};

struct Periodicity {
    Nat period;  // program length
    Int drift;   // E(n + period) - E(n)
};

class ExponentProfile {
public:
    ShiftKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    /// E is known on [0, extent] (and on [-back_extent, 0] for bilateral shifts).
    const Nat& extent() const { return extent_; }
    const Nat& back_extent() const { return back_extent_; }
    /// E(n), with E(0) = 0 and E(-m) = -(e_0 + e_{-1} + ... + e_{-m+1}).
    Int at(const Int& n) const;
    /// Exponent e_n of the single weight w_n.
    Int weight_exponent(const Int& n) const { return at(n) - at(n - 1); }

    const SegmentTable& forward() const { return forward_; }
    /// Backward pieces are indexed by m = -n and describe F(m) = -E(-m).
    const SegmentTable& backward() const { return backward_; }
    /// Natural density checkpoints supplied by the construction (may be empty).
    const std::vector<Nat>& checkpoints() const { return checkpoints_; }
    const std::optional<Periodicity>& periodicity() const { return periodicity_; }
    bool lacunary() const { return lacunary_; }
    /// max E over [1, n] (n <= extent).
    Int forward_max(const Nat& n) const;

private:
    friend ExponentProfile compile_exponent_profile(const WeightSpec&, const Nat&, const Nat&);
    ShiftKind kind_ = ShiftKind::unilateral;
    std::string name_;
    Nat extent_ = 0;
    Nat back_extent_ = 0;
    SegmentTable forward_;
    SegmentTable backward_;
    std::vector<Nat> checkpoints_;
    std::optional<Periodicity> periodicity_;
    bool lacunary_ = false;
};

/// Unrolls the weight program until it covers [1, extent] (whole blocks, so the
/// profile may extend further) and, for bilateral shifts, [-back_extent, 0].
ExponentProfile compile_exponent_profile(const WeightSpec& w, const Nat& extent, const Nat& back_extent = 0);

// --- return-time sets ----------------------------------------------------------------

/// A = {n in [1,H] : E(j+n) - E(j) >= t+1}     (product of n weights above j exceeds 2^t)
/// Ā = {n in [1,H] : E(j) - E(j-n) <= -(t+1)}  (product of the n weights up to j is below 2^-t)
/// For unilateral shifts Ā only covers n <= j (indices below 0 do not exist);
/// `bar_truncated` flags that case.
struct ReturnSets {
    RunSet a;
    RunSet a_bar;
    bool bar_truncated = false;
};
ReturnSets return_time_sets(const ExponentProfile& p, const Int& t, const Int& j, const Nat& horizon);
/// Threshold exponent for a real bound M > 0: product > M iff E-difference >= t+1.
Int threshold_exponent(const Rational& m);

/// Ā for unilateral shifts, completed by [j+1, H] (where B^n e_j = 0).
RunSet unilateral_bar_completion(const ReturnSets& s, const Int& j, const Nat& horizon);

// --- hypercyclicity test -------------------------------------------------------------

struct SalasResult {
    bool holds;
    std::optional<Nat> witness;  // n in the intersection of the A-sets
    nlohmann::json detail;
};
/// Bilateral: some n <= H lies in A_{t,j} ∩ Ā_{t,j} for every |j| <= N.
/// Unilateral: some n <= H lies in A_{t,j} for every 0 <= j <= N (E unbounded above).
SalasResult salas_check(const ExponentProfile& p, const Int& t, const Nat& n_range, const Nat& horizon);

// --- classification -------------------------------------------------------------------

/// Trend rule, tail = last half of the natural checkpoints, Banach window sqrt(X).
FamilyParams default_classifier_params();

struct ClassifyConfig {
    Nat horizon{1000000};
    Nat extent_cap{Int(1) << 664};  // about 10^200: reach of lacunary constructions
    std::vector<Int> t_grid{0, 1, 2, 3};
    std::vector<Int> j_grid{0, 1, 2};
    FamilyParams params = default_classifier_params();
    std::vector<std::string> classes;  // empty: all

    nlohmann::json to_json() const;
};

const std::vector<std::string>& class_names();
/// Family evaluated on every grid set for a class ("transitive" uses "nonempty_tail").
std::string class_family(std::string_view cls);

/// Evaluation window used by the classifier for a weight.
struct ClassifyFrame {
    ExponentProfile profile;
    Nat extent;                // X: the horizon the families are evaluated at
    std::vector<Nat> checkpoints;
};
ClassifyFrame classify_frame(const WeightSpec& w, const ClassifyConfig& cfg);
/// Minimal horizon accepted for a (t, j) grid.
Nat minimal_horizon(const ClassifyConfig& cfg);

/// The set the classifier tests for (t, j): A (unilateral) or A ∩ Ā (bilateral).
RunSet grid_set(const ClassifyFrame& f, const Int& t, const Int& j);

/// Verdicts keyed by class name, each with per-(t, j) sub-verdicts in its witness.
std::vector<Verdict> classify_shift(const WeightSpec& w, const ClassifyConfig& cfg);
Verdict classify_one(const ClassifyFrame& f, const WeightSpec& w, std::string_view cls, const ClassifyConfig& cfg);

/// Family test on contract(A_{t,j} ∩ lZ+, l) over the grid; l = 1 reproduces classify_one.
Verdict power_product_check(const WeightSpec& w, const Nat& l, std::string_view cls, const ClassifyConfig& cfg);

/// Threshold t3 such that A_{2^t3, j3} ⊆ A_{2^t1, j1} ∩ A_{2^t2, j2} for |j1|,|j2| < j3,
/// from the bound M3 > K (M1 + M2) (1 + sup|w|)^{2 j3}.
Int absorption_threshold(const ExponentProfile& p, const Int& t1, const Int& j1, const Int& t2, const Int& j2,
                         const Int& j3);

struct HierarchyClaim {
    std::string construction;
    std::string cls;
    bool expected;
};
const std::vector<HierarchyClaim>& hierarchy_claims();

struct HierarchyRow {
    HierarchyClaim claim;
    Verdict verdict;
    bool matches() const { return verdict.holds() == claim.expected; }
};
std::vector<HierarchyRow> hierarchy_report(const ClassifyConfig& cfg);

}  // namespace ftrans
