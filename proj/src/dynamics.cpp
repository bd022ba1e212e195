#include "ftrans/dynamics.hpp"

#include <algorithm>

namespace ftrans {

using nlohmann::json;

namespace {

unsigned shift_amount(const Int& e) { return static_cast<unsigned>(to_u64(e, "dyadic shift")); }

/// Position of the lowest set bit of a non-zero integer.
unsigned low_bit(const Int& v) { return static_cast<unsigned>(boost::multiprecision::lsb(boost::multiprecision::abs(v))); }

}  // namespace

Dyadic::Dyadic(Int num, Int exp) : num_(std::move(num)), exp_(std::move(exp)) {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    unsigned z = low_bit(num_);
    if (z) {
        num_ >>= z;
        exp_ += z;
    }
}

Dyadic Dyadic::from_rational(const Rational& r) {
    Int p = numerator(r), q = denominator(r);
    if (p == 0) return {};
    if ((q & (q - 1)) != 0) throw DomainError("value " + to_string(r) + " is not dyadic");
    return {p, -Int(low_bit(q))};
}

Rational Dyadic::to_rational() const {
    if (exp_ >= 0) return Rational(num_ << shift_amount(exp_));
    return Rational(num_, Int(1) << shift_amount(-exp_));
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Int e = std::min(a.exp_, b.exp_);
    return {(a.num_ << shift_amount(a.exp_ - e)) + (b.num_ << shift_amount(b.exp_ - e)), e};
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + Dyadic(-b.num_, b.exp_); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) { return {a.num_ * b.num_, a.exp_ + b.exp_}; }

int compare(const Dyadic& a, const Dyadic& b) {
    Dyadic d = a - b;
    return d.sign();
}

int compare(const Dyadic& a, const Rational& q) {
    int sa = a.sign(), sq = q < 0 ? -1 : (q > 0 ? 1 : 0);
    if (sa != sq) return sa < sq ? -1 : 1;
    if (sa == 0) return 0;
    // |a| in [2^(la-1), 2^la), |q| in (2^(lq-1), 2^(lq+1))
    Int la = Int(bit_length(a.num())) + a.exp();
    Int lq = Int(bit_length(numerator(q))) - Int(bit_length(denominator(q)));
    int mag = 0;
    if (la <= lq - 1) mag = -1;
    else if (la - 1 >= lq + 1) mag = 1;
    if (mag == 0) {
        Rational av = a.to_rational();
        mag = abs(av) < abs(q) ? -1 : (abs(av) > abs(q) ? 1 : 0);
    }
    return sa > 0 ? mag : -mag;
}

std::string to_string(const Dyadic& d) {
    if (d.exp() >= 0) return to_string(d.to_rational());
    return d.num().str() + "/2^" + Int(-d.exp()).str();
}

Norm parse_norm(std::string_view s) {
    if (s == "sup" || s == "c0") return Norm::sup;
    if (s == "l1") return Norm::l1;
    throw ConfigError("unknown norm: " + std::string(s));
}

// --- vectors -------------------------------------------------------------------------------

DyadicVector DyadicVector::unit(const Int& index, const Dyadic& value) {
    DyadicVector v;
    v.set(index, value);
    return v;
}

void DyadicVector::set(const Int& index, const Dyadic& value) {
    if (value.is_zero()) entries_.erase(index);
    else entries_[index] = value;
}

Dyadic DyadicVector::get(const Int& index) const {
    auto it = entries_.find(index);
    return it == entries_.end() ? Dyadic() : it->second;
}

Dyadic DyadicVector::norm(Norm n) const {
    Dyadic out;
    for (const auto& [i, v] : entries_) {
        Dyadic a = v.abs();
        if (n == Norm::l1) out = out + a;
        else if (compare(a, out) > 0) out = a;
    }
    return out;
}

DyadicVector operator+(const DyadicVector& a, const DyadicVector& b) {
    DyadicVector out = a;
    for (const auto& [i, v] : b.entries_) out.set(i, out.get(i) + v);
    return out;
}

DyadicVector operator-(const DyadicVector& a, const DyadicVector& b) {
    DyadicVector out = a;
    for (const auto& [i, v] : b.entries_) out.set(i, out.get(i) - v);
    return out;
}

json DyadicVector::to_json() const {
    json e = json::array();
    for (const auto& [i, v] : entries_) e.push_back({i.str(), to_string(v.to_rational())});
    return {{"entries", e}};
}

DyadicVector DyadicVector::from_json(const json& j) {
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
        throw ConfigError("vector must be {\"entries\": [[index, value], ...]}");
    DyadicVector v;
    for (const auto& e : j["entries"]) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("vector entry must be [index, value]");
        Int idx = e[0].is_string() ? parse_int(e[0].get<std::string>()) : Int(e[0].get<long long>());
        Rational val = e[1].is_string() ? parse_rational(e[1].get<std::string>()) : Rational(e[1].get<long long>());
        v.set(idx, v.get(idx) + Dyadic::from_rational(val));
    }
    return v;
}

bool CylinderOpen::contains(const DyadicVector& x) const {
    if (kind == Kind::coord_lower_bound_with_norm_cap)
        return compare(x.get(j).abs(), bound) > 0 && compare(x.norm(norm), cap) < 0;
    return compare((x - center).norm(norm), radius) < 0;
}

// --- shift powers ------------------------------------------------------------------------------

DyadicVector apply_power(const ExponentProfile& p, const DyadicVector& x, const Nat& m) {
    bool uni = p.kind() == ShiftKind::unilateral;
    DyadicVector out;
    for (const auto& [i, v] : x.entries()) {
        if (uni && i < 0) throw DomainError("unilateral vectors live on indices >= 0");
        Int k = i - m;
        if (uni && k < 0) continue;  // B_w e_0 = 0
        out.set(k, v.times_pow2(p.at(i) - p.at(k)));
    }
    return out;
}

DyadicVector apply_forward_power(const ExponentProfile& p, const DyadicVector& x, const Nat& n) {
    DyadicVector out;
    for (const auto& [i, v] : x.entries()) {
        if (p.kind() == ShiftKind::unilateral && i < 0) throw DomainError("unilateral vectors live on indices >= 0");
        Int k = i + n;
        out.set(k, v.times_pow2(p.at(i) - p.at(k)));
    }
    return out;
}

ExponentProfile profile_for(const WeightSpec& w, const Int& lo, const Int& hi, const Nat& reach) {
    Int top = hi + reach;
    Nat extent = top > 1 ? Nat(top) : Nat(1);
    Nat back = 0;
    if (w.kind == ShiftKind::bilateral) {
        Int bottom = lo - reach;
        back = bottom < 0 ? Nat(-bottom) : Nat(0);
    }
    return compile_exponent_profile(w, extent, back);
}

DyadicVector apply_power(const WeightSpec& w, const DyadicVector& x, const Nat& m) {
    if (x.empty()) return {};
    Int lo = x.entries().begin()->first, hi = x.entries().rbegin()->first;
    return apply_power(profile_for(w, lo, hi, m), x, m);
}

// --- return-set sandwich ---------------------------------------------------------------------

Dyadic witness_coefficient(const Nat& r) {
    // round(256 (R+1) / (2R)) / 256, strictly between 1/R and 1 for R >= 2
    Int k = floor_div(256 * (r + 1) + r, 2 * r);
    return Dyadic(k, -8);
}

namespace {

struct SandwichSets {
    CylinderOpen u, v;
};

SandwichSets make_sets(const Int& j, const Nat& n, const Nat& r, Norm norm) {
    SandwichSets s;
    s.u.kind = CylinderOpen::Kind::coord_lower_bound_with_norm_cap;
    s.u.j = j;
    s.u.bound = Rational(1, r);
    s.u.cap = 1;
    s.u.norm = norm;
    s.v.kind = CylinderOpen::Kind::ball;
    s.v.center = DyadicVector::unit(j, Dyadic(n + 1));
    s.v.radius = Rational(1, r * r);
    s.v.norm = norm;
    return s;
}

DyadicVector witness(const ExponentProfile& p, const Int& j, const Nat& n, const Nat& m, const Dyadic& a) {
    DyadicVector x = DyadicVector::unit(j, a);
    x.set(j + m, Dyadic(n + 1).times_pow2(p.at(j) - p.at(j + m)));
    return x;
}

}  // namespace

bool sandwich_member(const ExponentProfile& p, const Int& j, const Nat& n, const Nat& r, const Nat& m,
                     const Dyadic& a, Norm norm) {
    SandwichSets s = make_sets(j, n, r, norm);
    DyadicVector x = witness(p, j, n, m, a);
    return s.u.contains(x) && s.v.contains(apply_power(p, x, m));
}

SandwichReport return_set_bounds(const ExponentProfile& p, const Int& j, const Nat& n, const Nat& r,
                                 const Nat& horizon, Norm norm) {
    if (n < 1) throw DomainError("N must be >= 1");
    if (r <= n) throw DomainError("R must exceed N");
    bool uni = p.kind() == ShiftKind::unilateral;
    SandwichReport rep;
    rep.j = j;
    rep.n = n;
    rep.r = r;
    rep.norm = norm;
    rep.horizon = horizon;
    rep.a = witness_coefficient(r);

    Int t = threshold_exponent(Rational(n));
    ReturnSets rs = return_time_sets(p, t, j, horizon);
    RunSet bar = uni ? unilateral_bar_completion(rs, j, horizon) : rs.a_bar;
    rep.upper = intersect(rs.a, bar);

    // closed form: x(m) ∈ U  <=>  b < 1 (sup) or a + b < 1 (l1), b = (N+1) 2^-(E(j+m)-E(j));
    // B^m x(m) ∈ V  <=>  a 2^(E(j)-E(j-m)) < 1/R^2 (vacuous when j - m < 0 on a unilateral shift)
    Rational v_radius(1, r * r);
    Int ej = p.at(j);
    std::vector<Nat> members;
    for (Nat m = 1; m <= horizon; ++m) {
        Dyadic b = Dyadic(n + 1).times_pow2(ej - p.at(j + m));
        Dyadic size = norm == Norm::sup ? (compare(b, rep.a) > 0 ? b : rep.a) : rep.a + b;
        bool in_u = compare(size, Rational(1)) < 0;
        bool in_v = true;
        if (!(uni && j - m < 0)) in_v = compare(rep.a.times_pow2(ej - p.at(j - m)), v_radius) < 0;
        bool in = in_u && in_v;
        rep.per_m.push_back({m, in});
        if (!in) continue;
        members.push_back(m);
        if (!rep.upper.contains(m)) ++rep.violations;
        if (!sandwich_member(p, j, n, r, m, rep.a, norm)) ++rep.recheck_failures;
    }
    rep.lower = RunSet::from_elements(std::move(members));
    return rep;
}

SandwichReport return_set_bounds(const WeightSpec& w, const Int& j, const Nat& n, const Nat& r, const Nat& horizon,
                                 Norm norm) {
    if (w.kind == ShiftKind::unilateral && j < 0) throw DomainError("unilateral shifts have no index j < 0");
    return return_set_bounds(profile_for(w, j, j, horizon), j, n, r, horizon, norm);
}

json SandwichReport::to_json() const {
    json rows = json::array();
    for (const auto& [m, in] : per_m) rows.push_back({m.str(), in});
    return {{"j", j.str()},
            {"N", n.str()},
            {"R", r.str()},
            {"norm", norm == Norm::sup ? "sup" : "l1"},
            {"horizon", horizon.str()},
            {"a", ftrans::to_string(a)},
            {"lower", ftrans::to_json(lower)},
            {"upper", ftrans::to_json(upper)},
            {"violations", violations.str()},
            {"recheck_failures", recheck_failures.str()},
            {"sound", sound()},
            {"per_m", rows}};
}

// --- criterion ------------------------------------------------------------------------------------

CriterionReport criterion_check(const WeightSpec& w, const DyadicVector& x, const Rational& epsilon,
                                const Nat& horizon, Norm norm) {
    if (epsilon <= 0) throw DomainError("epsilon must be positive");
    if (x.empty()) throw DomainError("criterion_check needs a non-zero vector");
    bool uni = w.kind == ShiftKind::unilateral;
    CriterionReport rep;
    rep.epsilon = epsilon;
    rep.norm = norm;
    rep.horizon = horizon;
    Int lo = x.entries().begin()->first, hi = x.entries().rbegin()->first;
    if (uni && lo < 0) throw DomainError("unilateral vectors live on indices >= 0");
    Nat m = std::max<Nat>({Nat(1), abs(lo), abs(hi)});
    rep.support_radius = m;
    // sup norm: each surviving coordinate is below eps/(2m); l1 sums 2m+1 of them
    Nat terms = norm == Norm::sup ? Nat(2 * m) : Nat(2 * m + 1);
    rep.m_value = x.norm(Norm::sup).to_rational() * terms / epsilon;
    rep.t = threshold_exponent(rep.m_value);

    Int j_lo = uni ? Int(0) : Int(-m);
    ExponentProfile p = profile_for(w, j_lo, m, horizon);

    RunSet bar = RunSet::interval(1, horizon), fwd = RunSet::interval(1, horizon);
    for (Int j = j_lo; j <= m; ++j) {
        ReturnSets rs = return_time_sets(p, rep.t, j, horizon);
        bar = intersect(bar, uni ? unilateral_bar_completion(rs, j, horizon) : rs.a_bar);
        fwd = intersect(fwd, rs.a);
    }
    rep.bar_intersection = bar;
    rep.a_intersection = fwd;

    std::vector<Nat> back_small, fwd_small;
    for (Nat n = 1; n <= horizon; ++n) {
        bool b = compare(apply_power(p, x, n).norm(norm), epsilon) < 0;
        bool f = compare(apply_forward_power(p, x, n).norm(norm), epsilon) < 0;
        if (b) back_small.push_back(n);
        if (f) fwd_small.push_back(n);
        if (bar.contains(n) && !b) ++rep.backward_violations;
        if (fwd.contains(n) && !f) ++rep.forward_violations;
    }
    rep.backward_small = RunSet::from_elements(std::move(back_small));
    rep.forward_small = RunSet::from_elements(std::move(fwd_small));
    return rep;
}

json CriterionReport::to_json() const {
    return {{"epsilon", to_string(epsilon)},
            {"norm", norm == Norm::sup ? "sup" : "l1"},
            {"horizon", horizon.str()},
            {"support_radius", support_radius.str()},
            {"M", to_string(m_value)},
            {"t", t.str()},
            {"backward_small", ftrans::to_json(backward_small)},
            {"forward_small", ftrans::to_json(forward_small)},
            {"bar_intersection", ftrans::to_json(bar_intersection)},
            {"a_intersection", ftrans::to_json(a_intersection)},
            {"backward_violations", backward_violations.str()},
            {"forward_violations", forward_violations.str()},
            {"passed", passed()}};
}

}  // namespace ftrans
