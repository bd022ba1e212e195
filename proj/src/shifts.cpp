#include "weights_internal.hpp"

#include <algorithm>

namespace ftrans {

using nlohmann::json;

// --- segment storage ---------------------------------------------------------------

namespace {

/// |x| < 2^62, read straight from the limbs.
bool fits_word(const Int& x) {
    const auto& b = x.backend();
    static_assert(sizeof(*b.limbs()) == 8);
    return b.size() == 1 && *b.limbs() < static_cast<std::uint64_t>(SegmentTable::kWordLimit);
}

std::int64_t word(const Int& x) {
    auto m = static_cast<std::int64_t>(*x.backend().limbs());
    return x.backend().sign() ? -m : m;
}

}  // namespace

ProfileSegment SegmentTable::operator[](std::size_t i) const {
    if (wide_) return big_[i];
    const Word& w = small_[i];
    return {Nat(w.first), Nat(w.length), Int(w.slope), Int(w.base)};
}

void SegmentTable::widen() {
    big_.reserve(small_.size());
    for (std::size_t i = 0; i < small_.size(); ++i) big_.push_back((*this)[i]);
    small_.clear();
    small_.shrink_to_fit();
    wide_ = true;
}

void SegmentTable::append_word(std::int64_t first, std::int64_t length, std::int64_t slope, std::int64_t base) {
    if (!small_.empty() && small_.back().slope == slope)
        small_.back().length += length;
    else
        small_.push_back({first, length, slope, base});
}

void SegmentTable::append(const Nat& first, const Nat& length, const Int& slope, const Int& base) {
    if (!wide_) {
        if (fits_word(first) && fits_word(length) && fits_word(slope) && fits_word(base)) {
            std::int64_t f = word(first), l = word(length), sl = word(slope), b = word(base);
            bool merge = !small_.empty() && small_.back().slope == sl;
            __int128 len = merge ? __int128(small_.back().length) + l : l;
            __int128 end = merge ? __int128(small_.back().base) + __int128(sl) * len : __int128(b) + __int128(sl) * l;
            if (len < kWordLimit && f + l < kWordLimit && end < kWordLimit && end > -kWordLimit) {
                if (merge)
                    small_.back().length = static_cast<std::int64_t>(len);
                else
                    small_.push_back({f, l, sl, b});
                return;
            }
        }
        widen();
    }
    if (!big_.empty() && big_.back().slope == slope)
        big_.back().length += length;
    else
        big_.push_back({first, length, slope, base});
}

// --- profile compilation -------------------------------------------------------------

namespace {

struct SegmentSink {
    SegmentTable& out;
    bool words = true;  // position and value tracked in machine words
    std::int64_t wpos = 0, wvalue = 0;
    Nat bpos = 0;  // last covered coordinate
    Int bvalue = 0;

    Nat pos() const { return words ? Nat(wpos) : bpos; }

    void push(const Nat& length, const Int& slope) {
        if (length < 1) return;
        if (words && out.compact() && fits_word(length) && fits_word(slope)) {
            std::int64_t l = word(length), s = word(slope);
            __int128 p = __int128(wpos) + l, v = __int128(wvalue) + __int128(s) * l;
            const __int128 lim = SegmentTable::kWordLimit;
            if (p < lim && v < lim && v > -lim) {
                out.append_word(wpos + 1, l, s, wvalue);
                wpos = static_cast<std::int64_t>(p);
                wvalue = static_cast<std::int64_t>(v);
                return;
            }
        }
        if (words) {
            bpos = wpos;
            bvalue = wvalue;
            words = false;
        }
        out.append(bpos + 1, length, slope, bvalue);
        bvalue += slope * length;
        bpos += length;
    }
};

/// Weights w_0, w_{-1}, ... of an explicit bilateral program, as (length, delta) runs.
void compile_backward(const WeightSpec& w, const Nat& back_extent, SegmentSink& sink) {
    std::vector<Segment> segs = detail::flatten(w);
    Nat total = 0;
    for (const auto& s : segs) total += s.length;
    bool cycle = w.repeat == RepeatRule::cycle;
    if (cycle && segs.size() == 1) {
        sink.push(back_extent, segs[0].delta);
        return;
    }
    // program position of index 0 (1-based); positions run downwards from here
    Nat q = w.origin;
    if (cycle) {
        q %= total;
        if (q == 0) q = total;
    }
    if (q == 0) throw DomainError("weight program has no weights at indices <= 0");
    std::size_t i = 0;
    Nat start = 1;
    while (start + segs[i].length <= q) start += segs[i].length, ++i;
    Nat take = q - start + 1;
    for (;;) {
        sink.push(take, segs[i].delta);
        if (sink.pos() >= back_extent) return;
        if (i == 0) {
            if (!cycle) throw DomainError("weight program ends at index -" + sink.pos().str() + " before the requested extent");
            i = segs.size();
        }
        --i;
        take = segs[i].length;
    }
}

}  // namespace

ExponentProfile compile_exponent_profile(const WeightSpec& w, const Nat& extent, const Nat& back_extent) {
    if (w.kind == ShiftKind::bilateral && w.repeat == RepeatRule::scheme)
        throw ConfigError("named constructions are unilateral");
    ExponentProfile p;
    p.kind_ = w.kind;
    p.name_ = w.name;
    if (w.repeat == RepeatRule::scheme) p.lacunary_ = construction_info(w.name).lacunary;

    SegmentSink fwd{p.forward_};
    auto gen = detail::make_generator(w);
    for (Nat at = fwd.pos(); at < extent || at == 0; at = fwd.pos()) {
        auto block = gen->next(extent - at);
        if (block.empty()) {
            if (at >= extent) break;
            throw DomainError("weight program ends at index " + at.str() + " before the requested extent " +
                              extent.str());
        }
        for (const auto& g : block) {
            fwd.push(g.length, g.delta);
            if (g.mark) p.checkpoints_.push_back(fwd.pos());
        }
    }
    p.extent_ = fwd.pos();

    if (w.kind == ShiftKind::bilateral && back_extent > 0) {
        SegmentSink back{p.backward_};
        compile_backward(w, back_extent, back);
        p.back_extent_ = back.pos();
    }
    if (w.repeat == RepeatRule::cycle) {
        Periodicity per{0, 0};
        for (const Block& b : w.program)
            for (const Segment& s : b) per.period += s.length, per.drift += s.delta * s.length;
        p.periodicity_ = per;
    }
    return p;
}

namespace {

/// Segment containing coordinate x (segments cover [1, extent] contiguously).
std::size_t piece_at(const SegmentTable& segs, const Nat& x) {
    if (segs.compact()) {
        const auto& w = segs.words();
        auto v = word(x);
        auto it = std::upper_bound(w.begin(), w.end(), v,
                                   [](std::int64_t y, const SegmentTable::Word& s) { return y < s.first; });
        return static_cast<std::size_t>(it - w.begin()) - 1;
    }
    const auto& big = segs.wide();
    auto it = std::upper_bound(big.begin(), big.end(), x,
                               [](const Nat& v, const ProfileSegment& s) { return v < s.first; });
    return static_cast<std::size_t>(it - big.begin()) - 1;
}

Int value_in(const ProfileSegment& s, const Nat& x) { return s.base + s.slope * (x - s.first + 1); }

}  // namespace

Int ExponentProfile::at(const Int& n) const {
    if (n == 0) return 0;
    if (n > 0) {
        if (n > extent_) throw DomainError("index " + n.str() + " beyond compiled extent " + extent_.str());
        return value_in(forward_[piece_at(forward_, n)], n);
    }
    Nat m = -n;
    if (m > back_extent_) throw DomainError("index " + n.str() + " beyond compiled backward extent");
    return -value_in(backward_[piece_at(backward_, m)], m);
}

Int ExponentProfile::forward_max(const Nat& n) const {
    if (n < 1 || n > extent_) throw DomainError("forward_max: n outside [1, extent]");
    std::optional<Int> best;
    for (std::size_t i = 0; i < forward_.size(); ++i) {
        ProfileSegment s = forward_[i];
        if (s.first > n) break;
        Nat last = std::min<Nat>(s.first + s.length - 1, n);
        Int v = s.slope > 0 ? value_in(s, last) : value_in(s, s.first);
        if (!best || v > *best) best = v;
    }
    return *best;
}

// --- return-time sets -------------------------------------------------------------------

namespace {

using Span = std::pair<Int, Int>;  // inclusive

/// Coordinates x in [lo, hi] where the segment values satisfy v >= c (ge) or v <= c.
void level_wide(const std::vector<ProfileSegment>& segs, const Nat& lo, const Nat& hi, const Int& c, bool ge,
           std::vector<Span>& out, bool negate) {
    if (lo > hi || segs.empty()) return;
    auto it = std::upper_bound(segs.begin(), segs.end(), lo,
                               [](const Nat& v, const ProfileSegment& s) { return v < s.first; });
    for (std::size_t i = static_cast<std::size_t>(it - segs.begin()) - 1; i < segs.size() && segs[i].first <= hi; ++i) {
        const ProfileSegment& s = segs[i];
        Int k1 = lo > s.first ? Int(lo - s.first + 1) : Int(1);
        Int k2 = std::min<Int>(s.length, hi - s.first + 1);
        // base + slope*k compared with c
        Int d = c - s.base;
        if (s.slope == 0) {
            if (ge ? 0 < d : 0 > d) continue;
        } else if ((s.slope > 0) == ge) {
            // condition k*slope >= d (slope > 0) or k*(-slope) >= -d
            Int need = s.slope > 0 ? ceil_div(d, s.slope) : ceil_div(-d, -s.slope);
            k1 = std::max(k1, need);
        } else {
            Int cap = s.slope > 0 ? floor_div(d, s.slope) : floor_div(-d, -s.slope);
            k2 = std::min(k2, cap);
        }
        if (k1 > k2) continue;
        Int a = s.first - 1 + k1, b = s.first - 1 + k2;
        if (negate) out.push_back({-b, -a});
        else out.push_back({a, b});
    }
}

using i128 = __int128;

i128 floor_div128(i128 a, i128 b) {  // b > 0
    i128 q = a / b;
    return (a % b != 0 && a < 0) ? q - 1 : q;
}
i128 ceil_div128(i128 a, i128 b) { return -floor_div128(-a, b); }

/// Word-sized version of level_wide; all arguments fit below 2^62.
void level_words(const std::vector<SegmentTable::Word>& segs, std::int64_t lo, std::int64_t hi, std::int64_t c,
                 bool ge, std::vector<Span>& out, bool negate) {
    auto it = std::upper_bound(segs.begin(), segs.end(), lo,
                               [](std::int64_t v, const SegmentTable::Word& s) { return v < s.first; });
    for (std::size_t i = static_cast<std::size_t>(it - segs.begin()) - 1; i < segs.size() && segs[i].first <= hi; ++i) {
        const SegmentTable::Word& s = segs[i];
        i128 k1 = lo > s.first ? i128(lo) - s.first + 1 : 1;
        i128 k2 = std::min<i128>(s.length, i128(hi) - s.first + 1);
        i128 d = i128(c) - s.base;
        if (s.slope == 0) {
            if (ge ? 0 < d : 0 > d) continue;
        } else if ((s.slope > 0) == ge) {
            i128 need = s.slope > 0 ? ceil_div128(d, s.slope) : ceil_div128(-d, -i128(s.slope));
            k1 = std::max(k1, need);
        } else {
            i128 cap = s.slope > 0 ? floor_div128(d, s.slope) : floor_div128(-d, -i128(s.slope));
            k2 = std::min(k2, cap);
        }
        if (k1 > k2) continue;
        auto a = static_cast<std::int64_t>(s.first - 1 + k1), b = static_cast<std::int64_t>(s.first - 1 + k2);
        if (negate) out.emplace_back(Int(-b), Int(-a));
        else out.emplace_back(Int(a), Int(b));
    }
}

void level(const SegmentTable& segs, const Nat& lo, const Nat& hi, const Int& c, bool ge, std::vector<Span>& out,
           bool negate) {
    if (lo > hi || segs.empty()) return;
    if (segs.compact() && fits_word(lo) && fits_word(hi) && fits_word(c))
        level_words(segs.words(), word(lo), word(hi), word(c), ge, out, negate);
    else if (!segs.compact())
        level_wide(segs.wide(), lo, hi, c, ge, out, negate);
    else {
        std::vector<ProfileSegment> big;
        big.reserve(segs.size());
        for (std::size_t i = 0; i < segs.size(); ++i) big.push_back(segs[i]);
        level_wide(big, lo, hi, c, ge, out, negate);
    }
}

/// Indices x in [lo, hi] (any sign) with E(x) >= c.
std::vector<Span> index_level(const ExponentProfile& p, const Int& lo, const Int& hi, const Int& c) {
    std::vector<Span> out;
    if (lo > hi) return out;
    if (hi >= 1) level(p.forward(), lo > 1 ? Nat(lo) : Nat(1), hi, c, true, out, false);
    if (lo <= 0 && hi >= 0 && 0 >= c) out.push_back({0, 0});
    if (lo <= -1) {
        // E(-m) >= c  <=>  F(m) <= -c
        Nat m_lo = hi < -1 ? Nat(-hi) : Nat(1);
        level(p.backward(), m_lo, Nat(-lo), -c, false, out, true);
    }
    return out;
}

void require_range(const ExponentProfile& p, const Int& lo, const Int& hi) {
    if (hi > p.extent())
        throw DomainError("profile compiled to " + p.extent().str() + ", index " + hi.str() + " requested");
    if (lo < 0 && -lo > p.back_extent())
        throw DomainError("profile compiled back to -" + p.back_extent().str() + ", index " + lo.str() + " requested");
}

}  // namespace

ReturnSets return_time_sets(const ExponentProfile& p, const Int& t, const Int& j, const Nat& horizon) {
    bool uni = p.kind() == ShiftKind::unilateral;
    if (uni && j < 0) throw DomainError("unilateral shifts have no index j < 0");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    ReturnSets rs;
    Int lo_bar = j - horizon;
    if (uni && lo_bar < 0) {
        lo_bar = 0;
        rs.bar_truncated = true;
    }
    require_range(p, lo_bar, j + horizon);
    Int ej = p.at(j);
    Int c = ej + t + 1;

    std::vector<Run> runs;
    for (const auto& [a, b] : index_level(p, j + 1, j + horizon, c)) runs.push_back({a - j, b - j + 1});
    rs.a = RunSet::from_runs(std::move(runs));

    runs.clear();
    if (lo_bar <= j - 1)
        for (const auto& [a, b] : index_level(p, lo_bar, j - 1, c)) runs.push_back({j - b, j - a + 1});
    rs.a_bar = RunSet::from_runs(std::move(runs));
    return rs;
}

Int threshold_exponent(const Rational& m) {
    if (m <= 0) throw DomainError("threshold M must be positive");
    return floor_log2(m);
}

RunSet unilateral_bar_completion(const ReturnSets& s, const Int& j, const Nat& horizon) {
    if (j + 1 > horizon) return s.a_bar;
    return unite(s.a_bar, RunSet::interval(Nat(j + 1), horizon));
}

SalasResult salas_check(const ExponentProfile& p, const Int& t, const Nat& n_range, const Nat& horizon) {
    bool uni = p.kind() == ShiftKind::unilateral;
    RunSet acc = RunSet::interval(1, horizon);
    json per = json::array();
    Int j_lo = uni ? Int(0) : Int(-Int(n_range));
    for (Int j = j_lo; j <= n_range; ++j) {
        ReturnSets rs = return_time_sets(p, t, j, horizon);
        RunSet s = uni ? rs.a : intersect(rs.a, rs.a_bar);
        acc = intersect(acc, s);
        per.push_back({{"j", j.str()}, {"size", s.cardinality().str()}});
        if (acc.empty()) break;
    }
    SalasResult r;
    r.holds = !acc.empty();
    if (r.holds) r.witness = *acc.min();
    r.detail = {{"t", t.str()},
                {"N", n_range.str()},
                {"horizon", horizon.str()},
                {"kind", std::string(to_string(p.kind()))},
                {"per_j", per},
                {"witness", r.witness ? json(r.witness->str()) : json(nullptr)}};
    return r;
}

Int absorption_threshold(const ExponentProfile& p, const Int& t1, const Int& j1, const Int& t2, const Int& j2,
                         const Int& j3) {
    Int jm = std::max(abs(j1), abs(j2));
    if (j3 <= jm) throw DomainError("absorption needs j3 > max(|j1|, |j2|)");
    bool uni = p.kind() == ShiftKind::unilateral;
    if (uni && (j1 < 0 || j2 < 0)) throw DomainError("unilateral shifts have no index j < 0");
    // sup |w| over the compiled range
    Int emax;
    bool first = true;
    auto offer = [&](const Int& e) {
        if (first || e > emax) emax = e;
        first = false;
    };
    for (std::size_t i = 0; i < p.forward().size(); ++i) offer(p.forward()[i].slope);
    for (std::size_t i = 0; i < p.backward().size(); ++i) offer(p.backward()[i].slope);
    // K = 1 + max over m1 <= m2 in [lo, j3] of 2^-(E(m2) - E(m1 - 1))
    Int lo = uni ? Int(1) : Int(-j3);
    Int worst = 0;  // max of E(m1-1) - E(m2)
    bool any = false;
    for (Int m2 = lo; m2 <= j3; ++m2)
        for (Int m1 = lo; m1 <= m2; ++m1) {
            Int d = p.at(m1 - 1) - p.at(m2);
            if (!any || d > worst) worst = d;
            any = true;
        }
    auto pw = [](const Int& e) {
        Rational r = 1;
        Int a = abs(e);
        Rational f = pow2(static_cast<unsigned>(to_u64(a, "exponent")));
        return e >= 0 ? Rational(r * f) : Rational(r / f);
    };
    Rational k = 1 + pw(worst);
    Rational m = pw(emax);
    Rational base = 1 + m, powv = 1;
    for (Int i = 0; i < 2 * j3; ++i) powv *= base;
    Rational bound = k * (pw(t1) + pw(t2)) * powv;
    return floor_log2(bound) + 1;  // 2^t3 > bound
}

}  // namespace ftrans
