// Transitivity classes of weighted shifts, judged through the sets A_{M,j} (and Ā_{M,j}).

#include "ftrans/shifts.hpp"

#include <algorithm>
#include <map>

namespace ftrans {

using nlohmann::json;

FamilyParams default_classifier_params() {
    FamilyParams p;
    p.rule = HorizonRule::trend;
    return p;
}

json ClassifyConfig::to_json() const {
    auto ints = [](const std::vector<Int>& v) {
        json a = json::array();
        for (const Int& x : v) a.push_back(x.str());
        return a;
    };
    return {{"horizon", horizon.str()},
            {"extent_cap", extent_cap.str()},
            {"t_grid", ints(t_grid)},
            {"j_grid", ints(j_grid)},
            {"family_params", params.to_json()},
            {"classes", classes}};
}

const std::vector<std::string>& class_names() {
    static const std::vector<std::string> names = {
        "transitive", "mixing",    "weakly_mixing", "topologically_ergodic", "D_upper",   "D_lower",
        "BD_upper",   "D_upper_1", "D_lower_1",     "BD_lower_1",            "delta_star", "ip_star"};
    return names;
}

std::string class_family(std::string_view cls) {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"transitive", "nonempty_tail"},
        {"mixing", "cofinite"},
        {"weakly_mixing", "thick"},
        {"topologically_ergodic", "syndetic"},
        {"D_upper", "D_upper_pos"},
        {"D_lower", "D_lower_pos"},
        {"BD_upper", "BD_upper_pos"},
        {"D_upper_1", "D_upper_1"},
        {"D_lower_1", "D_lower_1"},
        {"BD_lower_1", "BD_lower_1"},
        {"delta_star", "delta_star"},
        {"ip_star", "ip_star"}};
    auto it = table.find(cls);
    if (it == table.end()) throw ConfigError("unknown class: " + std::string(cls));
    return it->second;
}

namespace {

Nat max_abs_j(const ClassifyConfig& cfg) {
    Nat m = 0;
    for (const Int& j : cfg.j_grid) m = std::max<Nat>(m, abs(j));
    return m;
}

/// Grid indices: j_grid as given for unilateral shifts, mirrored for bilateral ones.
std::vector<Int> grid_js(const ClassifyConfig& cfg, ShiftKind kind) {
    std::vector<Int> js;
    for (const Int& j : cfg.j_grid) {
        if (kind == ShiftKind::unilateral && j < 0) throw ConfigError("unilateral shifts need j >= 0");
        js.push_back(j);
        if (kind == ShiftKind::bilateral) js.push_back(-j);
    }
    std::sort(js.begin(), js.end());
    js.erase(std::unique(js.begin(), js.end()), js.end());
    return js;
}

}  // namespace

Nat minimal_horizon(const ClassifyConfig& cfg) {
    if (cfg.t_grid.empty() || cfg.j_grid.empty()) throw ConfigError("t_grid and j_grid must be non-empty");
    Int tmax = *std::max_element(cfg.t_grid.begin(), cfg.t_grid.end());
    Int tm = tmax > 0 ? tmax : Int(0);
    return 16 * (tm + max_abs_j(cfg) + 2);
}

ClassifyFrame classify_frame(const WeightSpec& w, const ClassifyConfig& cfg) {
    Nat need = minimal_horizon(cfg);
    if (cfg.horizon < need)
        throw ConfigError("horizon " + cfg.horizon.str() + " is too small for the (t, j) grid; minimal horizon is " +
                          need.str());
    bool lac = w.repeat == RepeatRule::scheme && construction_info(w.name).lacunary;
    Nat want = lac ? cfg.extent_cap : cfg.horizon;
    Nat margin = max_abs_j(cfg);
    Nat back = w.kind == ShiftKind::bilateral ? Nat(want + margin) : Nat(0);
    ExponentProfile prof = compile_exponent_profile(w, want + margin, back);
    Nat x = cfg.horizon;
    if (lac) {
        // evaluate at the last natural checkpoint inside the cap
        std::optional<Nat> best;
        for (const Nat& c : prof.checkpoints())
            if (c <= cfg.extent_cap) best = c;
        if (!best || *best < need) throw ConfigError("extent cap too small for " + w.name);
        x = *best;
    }
    std::vector<Nat> marks;
    for (const Nat& c : prof.checkpoints())
        if (c <= x && (marks.empty() || c > marks.back())) marks.push_back(c);
    return ClassifyFrame{std::move(prof), x, std::move(marks)};
}

RunSet grid_set(const ClassifyFrame& f, const Int& t, const Int& j) {
    ReturnSets rs = return_time_sets(f.profile, t, j, f.extent);
    if (f.profile.kind() == ShiftKind::unilateral) return rs.a;
    return intersect(rs.a, rs.a_bar);
}

namespace {

std::optional<Verdict> certified(const ClassifyFrame& f, const WeightSpec& w, std::string_view cls) {
    const auto& per = f.profile.periodicity();
    if (w.repeat != RepeatRule::cycle || !per) return std::nullopt;
    Verdict v;
    v.family = std::string(cls);
    v.horizon = f.extent;
    v.witness = {{"period", per->period.str()}, {"drift", per->drift.str()}};
    if (f.profile.kind() == ShiftKind::unilateral && per->drift > 0) {
        v.status = VerdictStatus::certified;
        v.witness["reason"] = "E grows linearly, so every A_{M,j} is cofinite";
    } else {
        v.status = VerdictStatus::fails_at_horizon;
        v.witness["certified_failure"] = true;
        v.witness["reason"] = f.profile.kind() == ShiftKind::unilateral
                                  ? "E is bounded above, so A_{M,j} is empty for large M"
                                  : "E is linear on both sides, so A_{M,j} or its bar twin is finite";
    }
    return v;
}

Verdict nonempty_tail(const RunSet& s, const Nat& x, const FamilyParams& p) {
    HorizonFrame fr = make_frame(x, p);
    Verdict v;
    v.family = "nonempty_tail";
    v.horizon = x;
    v.params = p.to_json();
    v.params["split"] = fr.split.str();
    std::size_t i = s.run_at_or_after(fr.split + 1);
    bool ok = i < s.run_count() && s.runs()[i].lo <= x;
    if (ok) {
        const Nat& lo = s.runs()[i].lo;
        v.witness["element"] = (lo > fr.split ? lo : Nat(fr.split + 1)).str();
    }
    v.status = ok ? VerdictStatus::holds_at_horizon : VerdictStatus::fails_at_horizon;
    return v;
}

Verdict family_on(const RunSet& s, std::string_view family, const Nat& x, FamilyParams p, bool reset_set) {
    if (family == "nonempty_tail") return nonempty_tail(s, x, p);
    if (family == "ip_star") return ip_verdict(s, IpMode::misses_fs, {}, x, p);
    if (family == "delta_star") {
        if (reset_set) {
            // differences inside one run of the complement recur forever by construction;
            // the evidence concerns differences between distinct runs
            HorizonFrame fr = make_frame(x, p);
            RunSet tail = subtract(complement(s, x), RunSet::interval(1, fr.split));
            p.v_min = std::max<Nat>(p.v_min, max_run(tail, x) + 1);
            if (p.v_max < p.v_min) p.v_max = p.v_min;
        }
        return delta_verdict(s, DeltaMode::dual_evidence, {}, x, p);
    }
    return membership_verdict(s, family, x, p);
}

Verdict run_grid(const ClassifyFrame& f, const WeightSpec& w, std::string_view cls, const ClassifyConfig& cfg,
                 const Nat& l) {
    if (l < 1) throw DomainError("power l must be >= 1");
    std::string family = class_family(cls);
    if (auto c = certified(f, w, cls)) return *c;
    bool reset_set = w.repeat == RepeatRule::scheme && construction_info(w.name).exposes_reset_set;
    Nat x = f.extent / l;
    if (x < 2) throw ConfigError("horizon too small after contraction by " + l.str());
    FamilyParams p = cfg.params;
    p.checkpoints.clear();
    for (const Nat& c : f.checkpoints) {
        Nat cl = c / l;
        if (cl >= 1 && (p.checkpoints.empty() || cl > p.checkpoints.back())) p.checkpoints.push_back(cl);
    }
    Verdict v;
    v.family = std::string(cls);
    v.horizon = x;
    v.params = {{"family", family}, {"l", l.str()}, {"config", cfg.to_json()}};
    json grid = json::array();
    bool ok = true;
    for (const Int& t : cfg.t_grid) {
        for (const Int& j : grid_js(cfg, f.profile.kind())) {
            RunSet s = grid_set(f, t, j);
            if (l > 1) s = contract(s, l);
            Verdict sub = family_on(s, family, x, p, reset_set);
            grid.push_back({{"t", t.str()}, {"j", j.str()}, {"verdict", to_json(sub)}});
            if (!sub.holds()) {
                ok = false;
                v.witness["failed_at"] = {{"t", t.str()}, {"j", j.str()}};
                break;
            }
        }
        if (!ok) break;
    }
    v.witness["grid"] = grid;
    v.status = ok ? VerdictStatus::holds_at_horizon : VerdictStatus::fails_at_horizon;
    return v;
}

}  // namespace

Verdict classify_one(const ClassifyFrame& f, const WeightSpec& w, std::string_view cls, const ClassifyConfig& cfg) {
    return run_grid(f, w, cls, cfg, 1);
}

std::vector<Verdict> classify_shift(const WeightSpec& w, const ClassifyConfig& cfg) {
    const auto& wanted = cfg.classes.empty() ? class_names() : cfg.classes;
    for (const auto& c : wanted) class_family(c);  // validate before the heavy work
    ClassifyFrame f = classify_frame(w, cfg);
    std::vector<Verdict> out;
    for (const auto& c : wanted) out.push_back(classify_one(f, w, c, cfg));
    return out;
}

Verdict power_product_check(const WeightSpec& w, const Nat& l, std::string_view cls, const ClassifyConfig& cfg) {
    ClassifyFrame f = classify_frame(w, cfg);
    return run_grid(f, w, cls, cfg, l);
}

const std::vector<HierarchyClaim>& hierarchy_claims() {
    static const std::vector<HierarchyClaim> claims = {
        {"p41_1", "weakly_mixing", true},
        {"p41_1", "D_upper", false},
        {"p41_2", "D_upper_1", true},
        {"p41_2", "D_lower", false},
        {"p41_3", "D_lower_1", true},
        {"p41_3", "topologically_ergodic", false},
        {"bd1_nonmixing", "BD_lower_1", true},
        {"bd1_nonmixing", "mixing", false},
        {"p44_ruler", "topologically_ergodic", true},
        {"p44_ruler", "D_upper_1", false},
        {"p52_ip", "topologically_ergodic", true},
        {"p52_ip", "ip_star", false},
        {"p54_delta", "delta_star", true},
        {"p54_delta", "mixing", false},
        {"p58_rhc", "D_upper_1", false},
    };
    return claims;
}

std::vector<HierarchyRow> hierarchy_report(const ClassifyConfig& cfg) {
    std::vector<HierarchyRow> rows;
    std::map<std::string, std::pair<WeightSpec, ClassifyFrame>> frames;
    for (const HierarchyClaim& c : hierarchy_claims()) {
        auto it = frames.find(c.construction);
        if (it == frames.end()) {
            WeightSpec w = generate_weight(c.construction);
            ClassifyFrame f = classify_frame(w, cfg);
            it = frames.emplace(c.construction, std::make_pair(std::move(w), std::move(f))).first;
        }
        const auto& [w, f] = it->second;
        rows.push_back({c, classify_one(f, w, c.cls, cfg)});
    }
    return rows;
}

}  // namespace ftrans
