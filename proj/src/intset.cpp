#include "ftrans/intset.hpp"

#include <algorithm>
#include <unordered_map>

namespace ftrans {

// --- RunSet ------------------------------------------------------------------

void RunSet::index() {
    before_.clear();
    before_.reserve(runs_.size());
    Nat acc = 0;
    for (const Run& r : runs_) {
        before_.push_back(acc);
        acc += r.hi - r.lo;
    }
}

RunSet RunSet::from_runs(std::vector<Run> runs) {
    for (Run& r : runs)
        if (r.lo < 1) r.lo = 1;
    std::erase_if(runs, [](const Run& r) { return r.hi <= r.lo; });
    auto by_lo = [](const Run& x, const Run& y) { return x.lo < y.lo; };
    if (!std::is_sorted(runs.begin(), runs.end(), by_lo)) std::sort(runs.begin(), runs.end(), by_lo);
    std::vector<Run> out;
    out.reserve(runs.size());
    for (Run& r : runs) {
        if (!out.empty() && r.lo <= out.back().hi) {
            if (r.hi > out.back().hi) out.back().hi = std::move(r.hi);
        } else {
            out.push_back(std::move(r));
        }
    }
    RunSet s;
    s.runs_ = std::move(out);
    s.index();
    return s;
}

RunSet RunSet::from_sorted(std::vector<Run> runs) {
    RunSet s;
    s.runs_ = std::move(runs);
#ifndef NDEBUG
    s.check();
#endif
    s.index();
    return s;
}

RunSet RunSet::interval(const Nat& lo, const Nat& hi_inclusive) {
    return from_runs({Run{lo, hi_inclusive + 1}});
}

RunSet RunSet::from_elements(std::vector<Nat> elements) {
    std::vector<Run> runs;
    runs.reserve(elements.size());
    for (auto& e : elements) runs.push_back(Run{e, e + 1});
    return from_runs(std::move(runs));
}

void RunSet::check() const {
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        const Run& r = runs_[i];
        if (r.lo < 1 || r.hi <= r.lo) throw InvariantViolation("RunSet: empty or non-positive run");
        if (i > 0 && runs_[i - 1].hi >= r.lo)
            throw InvariantViolation("RunSet: runs overlap, touch or are unsorted");
    }
}

Nat RunSet::cardinality() const {
    if (runs_.empty()) return 0;
    return before_.back() + runs_.back().length();
}

std::optional<Nat> RunSet::min() const {
    if (runs_.empty()) return std::nullopt;
    return runs_.front().lo;
}

std::optional<Nat> RunSet::max() const {
    if (runs_.empty()) return std::nullopt;
    return runs_.back().hi - 1;
}

std::size_t RunSet::run_at_or_after(const Nat& x) const {
    auto it = std::upper_bound(runs_.begin(), runs_.end(), x,
                               [](const Nat& v, const Run& r) { return v < r.hi; });
    return static_cast<std::size_t>(it - runs_.begin());
}

bool RunSet::contains(const Nat& x) const {
    std::size_t i = run_at_or_after(x);
    return i < runs_.size() && runs_[i].lo <= x;
}

Nat RunSet::prefix_count(const Nat& n) const {
    if (n < 1) return 0;
    std::size_t i = run_at_or_after(n);  // first run with hi > n
    if (i == runs_.size()) return cardinality();
    const Run& r = runs_[i];
    if (r.lo <= n) return before_[i] + (n - r.lo + 1);
    return before_[i];
}

Nat RunSet::count_in(const Nat& lo, const Nat& hi) const {
    if (hi < lo) return 0;
    return prefix_count(hi) - prefix_count(lo - 1);
}

// --- algebra -------------------------------------------------------------------

namespace {

template <class Keep>
RunSet merge_sweep(const RunSet& a, const RunSet& b, Keep keep) {
    // Sweep over all boundaries; membership flips at each lo/hi.
    const auto& ra = a.runs();
    const auto& rb = b.runs();
    std::vector<Run> out;
    std::size_t i = 0, j = 0;
    bool in_a = false, in_b = false;
    std::optional<Nat> open;
    auto next_point = [&]() -> const Nat* {
        const Nat* pa = i < 2 * ra.size() ? (i % 2 == 0 ? &ra[i / 2].lo : &ra[i / 2].hi) : nullptr;
        const Nat* pb = j < 2 * rb.size() ? (j % 2 == 0 ? &rb[j / 2].lo : &rb[j / 2].hi) : nullptr;
        if (!pa) return pb;
        if (!pb) return pa;
        return *pa <= *pb ? pa : pb;
    };
    while (const Nat* p = next_point()) {
        Nat x = *p;
        while (i < 2 * ra.size() && (i % 2 == 0 ? ra[i / 2].lo : ra[i / 2].hi) == x) {
            in_a = (i % 2 == 0);
            ++i;
        }
        while (j < 2 * rb.size() && (j % 2 == 0 ? rb[j / 2].lo : rb[j / 2].hi) == x) {
            in_b = (j % 2 == 0);
            ++j;
        }
        bool now = keep(in_a, in_b);
        if (now && !open) {
            open = x;
        } else if (!now && open) {
            if (!out.empty() && out.back().hi == *open)
                out.back().hi = x;
            else
                out.push_back(Run{*open, x});
            open.reset();
        }
    }
    return RunSet::from_sorted(std::move(out));
}

}  // namespace

RunSet unite(const RunSet& a, const RunSet& b) {
    return merge_sweep(a, b, [](bool x, bool y) { return x || y; });
}

RunSet intersect(const RunSet& a, const RunSet& b) {
    return merge_sweep(a, b, [](bool x, bool y) { return x && y; });
}

RunSet subtract(const RunSet& a, const RunSet& b) {
    return merge_sweep(a, b, [](bool x, bool y) { return x && !y; });
}

RunSet complement(const RunSet& a, const Nat& horizon) {
    if (horizon < 1) return {};
    return subtract(RunSet::interval(1, horizon), a);
}

RunSet restrict(const RunSet& a, const Nat& horizon) {
    const auto& r = a.runs();
    std::vector<Run> out;
    for (const Run& run : r) {
        if (run.lo > horizon) break;
        out.push_back(Run{run.lo, run.hi > horizon ? Nat(horizon + 1) : run.hi});
    }
    return RunSet::from_sorted(std::move(out));
}

RunSet shift_plus(const RunSet& a, const Nat& i) {
    if (i < 0) throw DomainError("shift_plus: negative offset");
    std::vector<Run> out;
    out.reserve(a.run_count());
    for (const Run& r : a.runs()) out.push_back(Run{r.lo + i, r.hi + i});
    return RunSet::from_sorted(std::move(out));
}

RunSet shift_minus(const RunSet& a, const Nat& i) {
    if (i < 0) throw DomainError("shift_minus: negative offset");
    std::vector<Run> out;
    out.reserve(a.run_count());
    for (const Run& r : a.runs()) {
        if (r.hi - i <= 1) continue;
        Nat lo = r.lo - i;
        out.push_back(Run{lo < 1 ? Nat(1) : lo, r.hi - i});
    }
    return RunSet::from_sorted(std::move(out));
}

RunSet scale(const RunSet& a, const Nat& n) {
    if (n < 1) throw DomainError("scale: factor must be >= 1");
    if (n == 1) return a;
    std::vector<Run> out;
    for (const Run& r : a.runs())
        for (Nat x = r.lo; x < r.hi; ++x) out.push_back(Run{x * n, x * n + 1});
    return RunSet::from_sorted(std::move(out));
}

RunSet contract(const RunSet& a, const Nat& n) {
    if (n < 1) throw DomainError("contract: factor must be >= 1");
    if (n == 1) return a;
    std::vector<Run> out;
    for (const Run& r : a.runs()) {
        Nat lo = ceil_div(r.lo, n);
        Nat hi = ceil_div(r.hi, n);
        if (lo >= hi) continue;
        if (!out.empty() && out.back().hi >= lo)
            out.back().hi = hi;
        else
            out.push_back(Run{lo, hi});
    }
    return RunSet::from_sorted(std::move(out));
}

SetOp parse_set_op(std::string_view name) {
    static const std::pair<std::string_view, SetOp> table[] = {
        {"union", SetOp::unite},           {"intersect", SetOp::intersect},
        {"subtract", SetOp::subtract},     {"complement", SetOp::complement},
        {"restrict", SetOp::restrict},     {"shift_plus", SetOp::shift_plus},
        {"shift_minus", SetOp::shift_minus}, {"scale", SetOp::scale},
        {"contract", SetOp::contract},
    };
    for (auto& [k, v] : table)
        if (k == name) return v;
    throw ConfigError("unknown set operation: " + std::string(name));
}

RunSet set_algebra(SetOp op, const RunSet& a, const std::variant<RunSet, Nat>& arg,
                   const std::optional<Nat>& horizon) {
    auto need_set = [&]() -> const RunSet& {
        if (auto* s = std::get_if<RunSet>(&arg)) return *s;
        throw ConfigError("set operation expects a set argument");
    };
    auto need_nat = [&]() -> const Nat& {
        if (auto* n = std::get_if<Nat>(&arg)) return *n;
        throw ConfigError("set operation expects an integer argument");
    };
    RunSet out;
    switch (op) {
        case SetOp::unite: out = unite(a, need_set()); break;
        case SetOp::intersect: out = intersect(a, need_set()); break;
        case SetOp::subtract: out = subtract(a, need_set()); break;
        case SetOp::complement:
            if (!horizon) throw ConfigError("complement needs a horizon");
            out = complement(a, *horizon);
            break;
        case SetOp::restrict: out = restrict(a, need_nat()); break;
        case SetOp::shift_plus: out = shift_plus(a, need_nat()); break;
        case SetOp::shift_minus: out = shift_minus(a, need_nat()); break;
        case SetOp::scale: out = scale(a, need_nat()); break;
        case SetOp::contract: out = contract(a, need_nat()); break;
    }
    if (horizon) out = restrict(out, *horizon);
    return out;
}

// --- counting --------------------------------------------------------------------

std::optional<Nat> max_gap(const RunSet& a, const Nat& n) {
    const auto& r = a.runs();
    std::optional<Nat> best;
    std::optional<Nat> prev_last;  // last element of the previous run
    for (const Run& run : r) {
        if (run.lo > n) break;
        Nat last = run.hi - 1 < n ? Nat(run.hi - 1) : n;
        if (prev_last) {
            Nat g = run.lo - *prev_last;
            if (!best || g > *best) best = g;
        }
        if (last > run.lo && (!best || *best < 1)) best = Nat(1);
        prev_last = last;
    }
    return best;
}

Nat max_run(const RunSet& a, const Nat& n) {
    Nat best = 0;
    for (const Run& run : a.runs()) {
        if (run.lo > n) break;
        Nat hi = run.hi > n + 1 ? Nat(n + 1) : run.hi;
        if (hi - run.lo > best) best = hi - run.lo;
    }
    return best;
}

namespace {

template <class Better>
WindowExtreme window_extreme(const RunSet& a, const Nat& s, const Nat& k_lo, const Nat& k_hi,
                             Better better) {
    if (s < 1) throw DomainError("window size must be >= 1");
    if (k_lo < 0 || k_hi < k_lo) throw DomainError("window range is empty");
    auto eval = [&](const Nat& k) { return a.prefix_count(k + s) - a.prefix_count(k); };
    WindowExtreme best{eval(k_lo), k_lo};
    auto consider = [&](const Nat& k) {
        if (k < k_lo || k > k_hi) return;
        Nat c = eval(k);
        if (better(c, best.count) || (c == best.count && k < best.k)) best = {std::move(c), k};
    };
    consider(k_hi);
    // f(k) = P(k+s) - P(k) is linear between the points where k+1 or k+s+1
    // crosses a run boundary, so extrema sit on those points or the range ends.
    const auto& r = a.runs();
    std::size_t first = a.run_at_or_after(k_lo);
    std::size_t last = std::min(r.size(), a.run_at_or_after(k_hi + s + 1) + 1);
    for (std::size_t i = first; i < last; ++i) {
        const Run& run = r[i];
        consider(run.lo - 1);
        consider(run.hi - 1);
        consider(run.lo - s - 1);
        consider(run.hi - s - 1);
    }
    return best;
}

}  // namespace

WindowExtreme window_min(const RunSet& a, const Nat& s, const Nat& k_lo, const Nat& k_hi) {
    return window_extreme(a, s, k_lo, k_hi, [](const Nat& x, const Nat& y) { return x < y; });
}

WindowExtreme window_max(const RunSet& a, const Nat& s, const Nat& k_lo, const Nat& k_hi) {
    return window_extreme(a, s, k_lo, k_hi, [](const Nat& x, const Nat& y) { return x > y; });
}

// --- derived sets ----------------------------------------------------------------

RunSet shrink(const RunSet& a, const Nat& n, const Nat& horizon) {
    if (n < 0) throw DomainError("shrink: negative radius");
    std::vector<Run> out;
    for (const Run& run : a.runs()) {
        if (run.lo > horizon) break;
        Nat lo = run.lo == 1 ? Nat(1) : Nat(run.lo + n);
        Nat hi = run.hi - n;
        if (hi > horizon + 1) hi = horizon + 1;
        if (lo < hi) out.push_back(Run{lo, hi});
    }
    return RunSet::from_sorted(std::move(out));
}

Nat difference_multiplicity(const RunSet& a, const Nat& v, const Nat& horizon) {
    if (v < 1) throw DomainError("difference_multiplicity: v must be >= 1");
    RunSet ah = restrict(a, horizon);
    // count |A ∩ (A - v)| by a two-pointer sweep without materializing A - v
    const auto& r = ah.runs();
    Nat total = 0;
    std::size_t j = 0;
    for (const Run& x : r) {
        // runs of A - v: [lo - v, hi - v)
        while (j < r.size() && r[j].hi - v <= x.lo) ++j;
        for (std::size_t k = j; k < r.size(); ++k) {
            Nat lo = r[k].lo - v, hi = r[k].hi - v;
            if (lo >= x.hi) break;
            Nat a_lo = lo > x.lo ? lo : x.lo;
            Nat a_hi = hi < x.hi ? hi : x.hi;
            if (a_lo < a_hi) total += a_hi - a_lo;
        }
    }
    return total;
}

RunSet positive_differences(const RunSet& a, const Nat& source_horizon, const Nat& horizon) {
    RunSet src = restrict(a, source_horizon);
    if (src.cardinality() > 200000)
        throw ConfigError("positive_differences: more than 200000 source elements");
    const auto h = static_cast<std::size_t>(to_u64(horizon, "horizon"));
    std::vector<unsigned long long> elems;
    for (const Run& r : src.runs())
        for (Nat x = r.lo; x < r.hi; ++x) elems.push_back(to_u64(x, "element"));
    std::vector<bool> hit(h + 1, false);
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = i + 1; j < elems.size() && elems[j] - elems[i] <= h; ++j)
            hit[elems[j] - elems[i]] = true;
    std::vector<Run> out;
    for (std::size_t d = 1; d <= h; ++d) {
        if (!hit[d]) continue;
        if (!out.empty() && out.back().hi == d)
            out.back().hi = d + 1;
        else
            out.push_back(Run{Nat(d), Nat(d + 1)});
    }
    return RunSet::from_sorted(std::move(out));
}

// --- serialization -------------------------------------------------------------

nlohmann::json to_json(const RunSet& a) {
    nlohmann::json runs = nlohmann::json::array();
    for (const Run& r : a.runs()) runs.push_back({r.lo.str(), r.hi.str()});
    return {{"runs", runs}};
}

RunSet runset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("runs") || !j["runs"].is_array())
        throw ConfigError("RunSet JSON must be an object with a 'runs' array");
    std::vector<Run> runs;
    for (const auto& pair : j["runs"]) {
        if (!pair.is_array() || pair.size() != 2) throw ConfigError("RunSet run must be [lo, hi]");
        auto field = [](const nlohmann::json& v) {
            if (v.is_string()) return parse_int(v.get<std::string>());
            if (v.is_number_unsigned()) return Int(v.get<unsigned long long>());
            throw ConfigError("RunSet endpoint must be a decimal string");
        };
        Nat lo = field(pair[0]), hi = field(pair[1]);
        if (lo < 1 || hi <= lo) throw ConfigError("RunSet run must satisfy 1 <= lo < hi");
        runs.push_back(Run{lo, hi});
    }
    RunSet s = RunSet::from_runs(runs);
    if (s.run_count() != runs.size())
        throw ConfigError("RunSet runs must be sorted, disjoint and non-adjacent");
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (!(s.runs()[i] == runs[i])) throw ConfigError("RunSet runs must be sorted");
    return s;
}

}  // namespace ftrans
