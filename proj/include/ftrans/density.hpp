#pragma once

#include "ftrans/intset.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftrans {

struct CheckpointRatio {
    Nat n;
    Nat count;       // |A ∩ [1, n]|
    Rational ratio;  // count / n, exact
};

struct BanachRow {
    Nat s;
    Rational lower;  // min over windows of |A ∩ [k+1, k+s]| / s
    Rational upper;
    Nat k_lower;     // window attaining the minimum
    Nat k_upper;
};

/// Finite-horizon density evidence. The lower/upper estimates are the min/max
/// of the exact ratios over the tail of the checkpoint list.
struct DensityReport {
    std::vector<CheckpointRatio> checkpoints;
    std::optional<Rational> lower_estimate;
    std::optional<Rational> upper_estimate;
    std::vector<BanachRow> banach;
};

/// Number of trailing checkpoints forming the tail window: ceil(f*m), clamped to [1, m].
std::size_t tail_size(std::size_t m, const Rational& tail_fraction);

DensityReport asymptotic_density_estimate(const RunSet& a, std::span<const Nat> checkpoints,
                                          const Rational& tail_fraction = Rational(1, 2));

/// Windows [k+1, k+s] with k in [k_lo, horizon - s]; k_lo defaults to horizon/2,
/// standing in for the k -> infinity limit.
DensityReport banach_density_estimate(const RunSet& a, std::span<const Nat> window_sizes,
                                      const Nat& horizon, const std::optional<Nat>& k_lo = std::nullopt);

/// Columns n,count,ratio_num,ratio_den,ratio_float.
std::string density_csv(const DensityReport& report);
nlohmann::json to_json(const DensityReport& report);

/// k/16 * horizon for k = 1..16 (deduplicated, positive).
std::vector<Nat> linear_checkpoints(const Nat& horizon, unsigned points = 16);

}  // namespace ftrans
