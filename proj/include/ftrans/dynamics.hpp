#pragma once

#include "ftrans/shifts.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <vector>

namespace ftrans {

/// num * 2^exp, normalized so that num is odd (or zero with exp = 0).
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(Int num, Int exp = 0);
    /// Exact conversion; throws DomainError unless the denominator is a power of two.
    static Dyadic from_rational(const Rational& r);

    const Int& num() const { return num_; }
    const Int& exp() const { return exp_; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ < 0 ? -1 : (num_ > 0 ? 1 : 0); }

    Dyadic abs() const { return {boost::multiprecision::abs(num_), exp_}; }
    Dyadic times_pow2(const Int& e) const { return {num_, exp_ + e}; }
    Rational to_rational() const;

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
    friend bool operator==(const Dyadic&, const Dyadic&) = default;

private:
    Int num_ = 0;
    Int exp_ = 0;
};

/// Three-way comparison without materializing huge powers when magnitudes differ.
int compare(const Dyadic& a, const Dyadic& b);
int compare(const Dyadic& a, const Rational& q);
std::string to_string(const Dyadic& d);

enum class Norm { sup, l1 };
Norm parse_norm(std::string_view s);

/// Finitely supported vector; zero entries are never stored.
class DyadicVector {
public:
    DyadicVector() = default;
    static DyadicVector unit(const Int& index, const Dyadic& value = Dyadic(1));

    void set(const Int& index, const Dyadic& value);
    Dyadic get(const Int& index) const;
    const std::map<Int, Dyadic>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    Dyadic norm(Norm n) const;

    friend DyadicVector operator+(const DyadicVector& a, const DyadicVector& b);
    friend DyadicVector operator-(const DyadicVector& a, const DyadicVector& b);
    friend bool operator==(const DyadicVector&, const DyadicVector&) = default;

    nlohmann::json to_json() const;
    /// {"entries": [[index, "p/q"], ...]} with dyadic values.
    static DyadicVector from_json(const nlohmann::json& j);

private:
    std::map<Int, Dyadic> entries_;
};

/// U = {|x_j| > bound, ||x|| < cap}  or  V = {||x - center|| < radius}.
struct CylinderOpen {
    enum class Kind { coord_lower_bound_with_norm_cap, ball };
    Kind kind = Kind::ball;
    Int j = 0;
    Rational bound = 0;
    Rational cap = 1;
    DyadicVector center;
    Rational radius = 1;
    Norm norm = Norm::sup;

    bool contains(const DyadicVector& x) const;
};

/// B_w^m x, with (B_w^m x)_k = 2^{E(k+m) - E(k)} x_{k+m}; unilateral shifts drop indices < 0.
DyadicVector apply_power(const ExponentProfile& p, const DyadicVector& x, const Nat& m);
DyadicVector apply_power(const WeightSpec& w, const DyadicVector& x, const Nat& m);
/// S_w^n x, with S_w e_i = w_{i+1}^{-1} e_{i+1}.
DyadicVector apply_forward_power(const ExponentProfile& p, const DyadicVector& x, const Nat& n);

/// Profile long enough for index windows [lo - reach, hi + reach].
ExponentProfile profile_for(const WeightSpec& w, const Int& lo, const Int& hi, const Nat& reach);

struct SandwichReport {
    Int j;
    Nat n;  // the paper's N
    Nat r;  // the paper's R
    Norm norm = Norm::sup;
    Nat horizon;
    Dyadic a;             // witness coefficient on e_j
    RunSet lower;         // m whose canonical witness x(m) realizes U -> V
    RunSet upper;         // A_{N,j} ∩ Ā_{N,j} (Ā completed for unilateral shifts)
    Nat violations = 0;   // lower members outside upper
    Nat recheck_failures = 0;  // lower members that fail the direct simulation
    std::vector<std::pair<Nat, bool>> per_m;

    bool sound() const { return violations == 0 && recheck_failures == 0; }
    nlohmann::json to_json() const;
};

/// Two-sided bounds lower ⊆ N(U, V) ⊆ upper for the sets U, V built from (j, N, R).
SandwichReport return_set_bounds(const WeightSpec& w, const Int& j, const Nat& n, const Nat& r, const Nat& horizon,
                                 Norm norm = Norm::sup);
SandwichReport return_set_bounds(const ExponentProfile& p, const Int& j, const Nat& n, const Nat& r,
                                 const Nat& horizon, Norm norm = Norm::sup);
/// Simulates B_w^m x(m) and tests U and V membership directly.
bool sandwich_member(const ExponentProfile& p, const Int& j, const Nat& n, const Nat& r, const Nat& m,
                     const Dyadic& a, Norm norm);
Dyadic witness_coefficient(const Nat& r);

struct CriterionReport {
    Rational epsilon;
    Norm norm = Norm::sup;
    Nat horizon;
    Nat support_radius;  // m: support ⊆ [-m, m]
    Rational m_value;    // the threshold M
    Int t;
    RunSet backward_small;  // {n : ||B^n x|| < eps}
    RunSet forward_small;   // {n : ||S_n x|| < eps}
    RunSet bar_intersection;
    RunSet a_intersection;
    Nat backward_violations = 0;
    Nat forward_violations = 0;

    bool passed() const { return backward_violations == 0 && forward_violations == 0; }
    nlohmann::json to_json() const;
};

/// Checks ⋂ Ā_{M,j} ⊆ {n : ||B^n x|| < eps} and ⋂ A_{M,j} ⊆ {n : ||S_n x|| < eps}, j over the support range.
CriterionReport criterion_check(const WeightSpec& w, const DyadicVector& x, const Rational& epsilon,
                                const Nat& horizon, Norm norm = Norm::sup);

}  // namespace ftrans
