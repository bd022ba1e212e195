#pragma once

#include "ftrans/intset.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftrans {

enum class VerdictStatus { certified, holds_at_horizon, fails_at_horizon };
std::string_view to_string(VerdictStatus s);
VerdictStatus parse_status(std::string_view s);

struct Verdict {
    std::string family;
    VerdictStatus status = VerdictStatus::fails_at_horizon;
    Nat horizon;
    nlohmann::json witness = nlohmann::json::object();
    nlohmann::json params = nlohmann::json::object();

    bool holds() const { return status != VerdictStatus::fails_at_horizon; }
};

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

/// How tail properties are judged from a finite window.
///  threshold: fixed bounds (gap <= gap_max, run >= thick_run); monotone under inclusion.
///  trend:     compare the head [1, split] with the full window; detects slow
///             (e.g. logarithmic) growth of runs or gaps that no fixed bound sees.
enum class HorizonRule { threshold, trend };

struct FamilyParams {
    HorizonRule rule = HorizonRule::threshold;
    Rational epsilon{1, 10};             // "density = 1" means ratio >= 1 - epsilon
    Rational delta{1, 100};              // "density > 0" means ratio >= delta
    std::optional<Nat> thick_run;        // L_req; default floor(sqrt(H))
    Nat gap_max = 64;                    // G_max
    Nat shrink_max = 2;                  // N_max for thickly_syndetic
    std::optional<Nat> window;           // Banach window size; default floor(sqrt(H))
    Rational tail_fraction{1, 2};
    std::vector<Nat> checkpoints;        // empty: 16-point linear grid
    // IP / Delta search knobs
    unsigned ip_depth = 6;
    unsigned long long ip_node_budget = 20000;
    Nat v_min = 1;
    Nat v_max = 50;

    nlohmann::json to_json() const;
    static FamilyParams from_json(const nlohmann::json& j);
};

/// Resolved evaluation window shared by all families: the checkpoint list, the
/// tail window and the split point separating head from tail.
struct HorizonFrame {
    Nat horizon;
    std::vector<Nat> checkpoints;
    std::size_t tail_begin = 0;  // index of the first tail checkpoint
    Nat split;                   // last head checkpoint (0 when there is no head)
};
HorizonFrame make_frame(const Nat& horizon, const FamilyParams& p);

const std::vector<std::string>& family_names();
bool is_family(std::string_view name);

Verdict membership_verdict(const RunSet& a, std::string_view family, const Nat& horizon,
                           const FamilyParams& params = {});

enum class IpMode { contains_fs, misses_fs };
Verdict ip_verdict(const RunSet& a, IpMode mode, const std::vector<Nat>& generators, const Nat& horizon,
                   const FamilyParams& params = {});

enum class DeltaMode { contains_diffset, dual_evidence };
Verdict delta_verdict(const RunSet& a, DeltaMode mode, const std::vector<Nat>& seed, const Nat& horizon,
                      const FamilyParams& params = {});

enum class Transform { tilde, plus, bullet };
Transform parse_transform(std::string_view s);
/// tilde: shrink(A, N) in base for N = 0..n_max; plus/bullet: some/every |k| <= k_max.
Verdict family_transform(const RunSet& a, std::string_view base_family, Transform t, const Nat& k_max,
                         const Nat& n_max, const Nat& horizon, const FamilyParams& params = {});

/// (A - k) ∩ Z+ for k >= 0, (A + |k|) ∪ [1, |k|] for k < 0: the set whose base-family
/// membership decides membership of A in F + k.
RunSet translate_for_family(const RunSet& a, const Int& k);

/// Re-checks a verdict's witness against A. Does not trust the verdict's status.
bool verify_verdict(const Verdict& v, const RunSet& a);

}  // namespace ftrans
