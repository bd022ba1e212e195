#include "ftrans/cli.hpp"

#include "ftrans/density.hpp"
#include "ftrans/dynamics.hpp"
#include "ftrans/families.hpp"
#include "ftrans/finite_algebra.hpp"
#include "ftrans/shifts.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ftrans {

using nlohmann::json;

namespace {

/// Raised when a computed result contradicts an asserted mathematical claim.
struct ClaimFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<Int> int_list(const std::string& s) {
    std::vector<Int> out;
    for (const auto& x : split_list(s)) out.push_back(parse_int(x));
    return out;
}

Nat nat_arg(const std::string& s, std::string_view what) {
    Int v = parse_int(s);
    if (v < 0) throw ConfigError(std::string(what) + " must be non-negative");
    return v;
}

std::string read_text(const std::string& path_or_inline) {
    if (!path_or_inline.empty() && (path_or_inline[0] == '{' || path_or_inline[0] == '[')) return path_or_inline;
    std::ifstream in(path_or_inline);
    if (!in) throw ConfigError("cannot read " + path_or_inline);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path_or_inline) {
    try {
        return json::parse(read_text(path_or_inline));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

/// Largest horizon accepted; FTRANS_HORIZON_CAP overrides the default.
Nat horizon_cap() {
    if (const char* env = std::getenv("FTRANS_HORIZON_CAP")) return parse_int(env);
    return Nat(100000000);
}

Nat checked_horizon(const std::string& s) {
    Nat h = nat_arg(s, "horizon");
    Nat cap = horizon_cap();
    if (h > cap) throw ConfigError("horizon " + h.str() + " exceeds the cap " + cap.str() + " (FTRANS_HORIZON_CAP)");
    return h;
}

void write_artifact(const std::string& output, const std::string& text, std::ostream& out) {
    if (output == "-") {
        out << text;
        return;
    }
    namespace fs = std::filesystem;
    fs::path target(output);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + output);
        f << text;
        if (!f) throw ConfigError("write failed: " + output);
    }
    fs::rename(tmp, target);
}

WeightSpec load_weight(const std::string& construction, const std::string& weight, const std::string& params) {
    if (!construction.empty() && !weight.empty()) throw ConfigError("use either --construction or --weight");
    if (!weight.empty()) return WeightSpec::from_json(read_json(weight));
    if (construction.empty()) throw ConfigError("a weight is required: --construction NAME or --weight FILE");
    return generate_weight(construction, params.empty() ? json::object() : read_json(params));
}

// --- option bundles ----------------------------------------------------------------------------

struct ThresholdOpts {
    std::string epsilon, delta, gap_max, n_max, depth, v_max, thick_run, window, tail_fraction, rule;

    void add(CLI::App* app) {
        app->add_option("--epsilon", epsilon, "density-1 slack: ratio >= 1 - epsilon");
        app->add_option("--delta", delta, "positive-density threshold");
        app->add_option("--gap-max", gap_max, "G_max for syndetic / piecewise syndetic");
        app->add_option("--n-max", n_max, "N_max for thickly syndetic");
        app->add_option("--depth", depth, "IP search depth");
        app->add_option("--v-max", v_max, "largest difference for Delta evidence");
        app->add_option("--thick-run", thick_run, "required run length (threshold rule)");
        app->add_option("--window", window, "Banach window size");
        app->add_option("--tail-fraction", tail_fraction, "fraction of checkpoints forming the tail");
        app->add_option("--rule", rule, "horizon rule: threshold | trend");
    }

    FamilyParams apply(FamilyParams p) const {
        if (!epsilon.empty()) p.epsilon = parse_rational(epsilon);
        if (!delta.empty()) p.delta = parse_rational(delta);
        if (!gap_max.empty()) p.gap_max = nat_arg(gap_max, "gap-max");
        if (!n_max.empty()) p.shrink_max = nat_arg(n_max, "n-max");
        if (!depth.empty()) p.ip_depth = static_cast<unsigned>(to_u64(nat_arg(depth, "depth"), "depth"));
        if (!v_max.empty()) p.v_max = nat_arg(v_max, "v-max");
        if (!thick_run.empty()) p.thick_run = nat_arg(thick_run, "thick-run");
        if (!window.empty()) p.window = nat_arg(window, "window");
        if (!tail_fraction.empty()) p.tail_fraction = parse_rational(tail_fraction);
        if (rule == "trend") p.rule = HorizonRule::trend;
        else if (rule == "threshold") p.rule = HorizonRule::threshold;
        else if (!rule.empty()) throw ConfigError("unknown rule: " + rule);
        return p;
    }
};

struct Common {
    std::string output = "-";
    std::string seed = "0";
};

// --- subcommands -----------------------------------------------------------------------------------

std::string cmd_generate(const std::string& construction, const std::string& params) {
    json p = params.empty() ? json::object() : read_json(params);
    return generate_weight(construction, p).to_json().dump(2) + "\n";
}

std::string cmd_classify(const WeightSpec& w, const ClassifyConfig& cfg) {
    json verdicts = json::object();
    for (const Verdict& v : classify_shift(w, cfg)) verdicts[v.family] = to_json(v);
    json summary = json::object();
    for (auto& [k, v] : verdicts.items()) summary[k] = v["status"];
    return json{{"weight", w.to_json()}, {"config", cfg.to_json()}, {"summary", summary}, {"verdicts", verdicts}}
               .dump(2) +
           "\n";
}

/// Evaluation point for `density --blocks n`.
Nat blocks_horizon(const WeightSpec& w, unsigned blocks) {
    if (w.name == "p44_ruler") {
        // peak of the A_{n+1} block that follows B_n: |B_n| + n + 1
        Nat b = 3 * pow2(blocks) - blocks - 3;
        return b + blocks + 1;
    }
    if (w.repeat != RepeatRule::scheme) throw ConfigError("--blocks needs a named construction");
    WeightSpec preview = generate_weight(w.name, json{{"preview_blocks", blocks}});
    Nat x = 0;
    for (const Block& b : preview.program)
        for (const Segment& s : b) x += s.length;
    return x;
}

struct DensityOpts {
    std::string construction, weight, params, set, horizon, blocks, t = "0", j = "0", checkpoints, windows,
        format = "csv", tail_fraction;
};

std::string cmd_density(const DensityOpts& o) {
    RunSet a;
    Nat x;
    std::vector<Nat> cps;
    if (!o.set.empty()) {
        if (o.horizon.empty()) throw ConfigError("--set needs --horizon");
        a = runset_from_json(read_json(o.set));
        x = checked_horizon(o.horizon);
    } else {
        WeightSpec w = load_weight(o.construction, o.weight, o.params);
        if (!o.blocks.empty()) {
            x = blocks_horizon(w, static_cast<unsigned>(to_u64(nat_arg(o.blocks, "blocks"), "blocks")));
        } else if (!o.horizon.empty()) {
            x = checked_horizon(o.horizon);
        } else {
            throw ConfigError("density needs --blocks or --horizon");
        }
        Int j = parse_int(o.j);
        Nat margin = abs(j);
        ExponentProfile p = compile_exponent_profile(w, x + margin, w.kind == ShiftKind::bilateral ? Nat(x + margin) : Nat(0));
        a = return_time_sets(p, parse_int(o.t), j, x).a;
        for (const Nat& c : p.checkpoints())
            if (c <= x && (cps.empty() || c > cps.back())) cps.push_back(c);
    }
    if (!o.checkpoints.empty()) {
        cps.clear();
        for (const auto& s : split_list(o.checkpoints)) cps.push_back(nat_arg(s, "checkpoint"));
    }
    if (cps.empty()) cps = linear_checkpoints(x);
    if (cps.back() != x) cps.push_back(x);
    Rational tf = o.tail_fraction.empty() ? Rational(1, 2) : parse_rational(o.tail_fraction);
    DensityReport rep = asymptotic_density_estimate(a, cps, tf);
    if (!o.windows.empty()) {
        std::vector<Nat> sizes;
        for (const auto& s : split_list(o.windows)) sizes.push_back(nat_arg(s, "window size"));
        rep.banach = banach_density_estimate(a, sizes, x).banach;
    }
    if (o.format == "csv") return density_csv(rep);
    if (o.format == "json") return to_json(rep).dump(2) + "\n";
    throw ConfigError("unknown format: " + o.format);
}

struct FamilyOpts {
    std::string set, family, horizon, transform, k_max = "0", n_max = "0", generators, seed_list, mode;
    bool verify = false;
};

std::string cmd_families(const FamilyOpts& o, const FamilyParams& params) {
    RunSet a = runset_from_json(read_json(o.set));
    Nat x = checked_horizon(o.horizon);
    auto nats = [](const std::string& s) {
        std::vector<Nat> v;
        for (const auto& e : split_list(s)) v.push_back(nat_arg(e, "list element"));
        return v;
    };
    Verdict v;
    if (o.family == "ip" || o.family == "ip_star") {
        IpMode m = o.mode == "contains_FS" || o.mode == "contains" ? IpMode::contains_fs : IpMode::misses_fs;
        v = ip_verdict(a, m, nats(o.generators), x, params);
    } else if (o.family == "delta" || o.family == "delta_star") {
        DeltaMode m = o.mode == "contains_diffset" || o.mode == "contains" ? DeltaMode::contains_diffset
                                                                           : DeltaMode::dual_evidence;
        v = delta_verdict(a, m, nats(o.seed_list), x, params);
    } else if (!o.transform.empty()) {
        v = family_transform(a, o.family, parse_transform(o.transform), nat_arg(o.k_max, "k-max"),
                             nat_arg(o.n_max, "n-max"), x, params);
    } else {
        v = membership_verdict(a, o.family, x, params);
    }
    json j = to_json(v);
    if (o.verify) {
        bool ok = verify_verdict(verdict_from_json(j), a);
        if (!ok) throw InvariantViolation("witness verifier rejected the verdict");
        j["verified"] = true;
    }
    return j.dump(2) + "\n";
}

std::string cmd_lemma(unsigned n) {
    LemmaReport r = verify_lemma23(n);
    std::string text = r.to_json().dump(2) + "\n";
    if (!r.passed()) throw ClaimFailure(text);
    return text;
}

std::string cmd_sandwich(const WeightSpec& w, const std::string& j, const std::string& n, const std::string& r,
                         const std::string& horizon, const std::string& norm) {
    SandwichReport rep =
        return_set_bounds(w, parse_int(j), nat_arg(n, "N"), nat_arg(r, "R"), checked_horizon(horizon), parse_norm(norm));
    std::string text = rep.to_json().dump(2) + "\n";
    if (!rep.sound()) throw ClaimFailure(text);
    return text;
}

std::string cmd_criterion(const WeightSpec& w, const std::string& vec, const std::string& eps,
                          const std::string& horizon, const std::string& norm) {
    DyadicVector x = DyadicVector::from_json(read_json(vec));
    CriterionReport rep = criterion_check(w, x, parse_rational(eps), checked_horizon(horizon), parse_norm(norm));
    std::string text = rep.to_json().dump(2) + "\n";
    if (!rep.passed()) throw ClaimFailure(text);
    return text;
}

std::string cmd_hierarchy(const ClassifyConfig& cfg, const std::string& format) {
    std::vector<HierarchyRow> rows = hierarchy_report(cfg);
    bool all = true;
    std::string text;
    if (format == "csv") {
        text = "construction,class,expected,status,match\n";
        for (const auto& r : rows) {
            text += r.claim.construction + "," + r.claim.cls + "," + (r.claim.expected ? "yes" : "no") + "," +
                    std::string(to_string(r.verdict.status)) + "," + (r.matches() ? "ok" : "MISMATCH") + "\n";
            all = all && r.matches();
        }
    } else if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back({{"construction", r.claim.construction},
                           {"class", r.claim.cls},
                           {"expected", r.claim.expected},
                           {"status", std::string(to_string(r.verdict.status))},
                           {"match", r.matches()},
                           {"verdict", to_json(r.verdict)}});
            all = all && r.matches();
        }
        text = json{{"config", cfg.to_json()}, {"rows", arr}, {"all_match", all}}.dump(2) + "\n";
    } else {
        throw ConfigError("unknown format: " + format);
    }
    if (!all) throw ClaimFailure(text);
    return text;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transitivity classes of weighted shifts via exact integer-set combinatorics", "ftrans"};
    app.require_subcommand(1);
    Common common;
    app.add_option("-o,--output", common.output, "artifact path, '-' for stdout")->capture_default_str();
    app.add_option("--seed", common.seed, "seed echoed into the run configuration");

    std::string construction, weight, params, horizon, t_grid, j_grid, classes, extent_cap, format = "json";
    ThresholdOpts thresholds;

    auto* gen = app.add_subcommand("generate", "emit the WeightSpec of a construction");
    gen->add_option("--construction", construction)->required();
    gen->add_option("--params", params, "JSON object or file");

    auto add_weight = [&](CLI::App* c) {
        c->add_option("--construction", construction);
        c->add_option("--weight", weight, "WeightSpec JSON file or inline object");
        c->add_option("--params", params, "construction parameters (JSON)");
    };
    auto add_grid = [&](CLI::App* c) {
        c->add_option("--horizon", horizon)->default_str("1000000");
        c->add_option("--t-grid", t_grid, "comma-separated t values (M = 2^t)");
        c->add_option("--j-grid", j_grid, "comma-separated j values");
        c->add_option("--extent-cap", extent_cap, "evaluation cap for lacunary constructions");
        thresholds.add(c);
    };

    auto* cls = app.add_subcommand("classify", "classify a weighted shift");
    add_weight(cls);
    add_grid(cls);
    cls->add_option("--classes", classes, "comma-separated class names (default: all)");

    DensityOpts dens;
    auto* den = app.add_subcommand("density", "checkpoint densities of A_{2^t, j} or of a set");
    den->add_option("--construction", dens.construction);
    den->add_option("--weight", dens.weight);
    den->add_option("--params", dens.params);
    den->add_option("--set", dens.set, "RunSet JSON file or inline object");
    den->add_option("--horizon", dens.horizon);
    den->add_option("--blocks", dens.blocks, "evaluate after n blocks (p44_ruler: at |B_n| + n + 1)");
    den->add_option("--t", dens.t)->capture_default_str();
    den->add_option("--j", dens.j)->capture_default_str();
    den->add_option("--checkpoints", dens.checkpoints, "comma-separated checkpoints");
    den->add_option("--window-sizes", dens.windows, "comma-separated Banach window sizes");
    den->add_option("--tail-fraction", dens.tail_fraction);
    den->add_option("--format", dens.format)->capture_default_str();

    FamilyOpts fam;
    auto* fm = app.add_subcommand("families", "family membership verdict for a set");
    fm->add_option("--set", fam.set, "RunSet JSON file or inline object")->required();
    fm->add_option("--family", fam.family, "family name, or ip / delta")->required();
    fm->add_option("--horizon", fam.horizon)->required();
    fm->add_option("--transform", fam.transform, "tilde | plus | bullet");
    fm->add_option("--k-max", fam.k_max);
    fm->add_option("--n-max-transform", fam.n_max, "N_max for the tilde transform");
    fm->add_option("--mode", fam.mode, "ip: contains_FS | misses_FS; delta: contains_diffset | dual_evidence");
    fm->add_option("--generators", fam.generators, "comma-separated IP generators");
    fm->add_option("--seed-list", fam.seed_list, "comma-separated Delta seed");
    fm->add_flag("--verify", fam.verify, "re-check the witness (exit 2 if rejected)");
    thresholds.add(fm);

    unsigned lemma_n = 4;
    auto* alg = app.add_subcommand("algebra", "finite family algebra");
    alg->require_subcommand(1);
    auto* lemma = alg->add_subcommand("verify-lemma23", "exhaustive partition-regularity / dual-filter check");
    lemma->add_option("--n", lemma_n)->capture_default_str();

    std::string j = "0", n = "1", r = "2", norm = "sup", vec, eps = "1/8";
    auto* sim = app.add_subcommand("simulate", "exact simulation of B_w");
    sim->require_subcommand(1);
    auto* sand = sim->add_subcommand("sandwich", "lower ⊆ N(U,V) ⊆ A_{N,j} ∩ Ā_{N,j}");
    add_weight(sand);
    sand->add_option("--j", j)->capture_default_str();
    sand->add_option("--N", n)->capture_default_str();
    sand->add_option("--R", r)->capture_default_str();
    sand->add_option("--horizon", horizon)->default_str("10000");
    sand->add_option("--norm", norm)->capture_default_str();
    auto* crit = sim->add_subcommand("criterion", "A_w-criterion inclusions for a vector");
    add_weight(crit);
    crit->add_option("--vector", vec, "{\"entries\": [[index, value], ...]}")->required();
    crit->add_option("--epsilon", eps)->capture_default_str();
    crit->add_option("--horizon", horizon)->default_str("10000");
    crit->add_option("--norm", norm)->capture_default_str();

    auto* rep = app.add_subcommand("report", "reports");
    rep->require_subcommand(1);
    auto* hier = rep->add_subcommand("hierarchy", "construction x class matrix against the textual claims");
    add_grid(hier);
    hier->add_option("--format", format)->capture_default_str();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    auto classify_config = [&]() {
        ClassifyConfig cfg;
        cfg.horizon = checked_horizon(horizon.empty() ? "1000000" : horizon);
        if (!t_grid.empty()) cfg.t_grid = int_list(t_grid);
        if (!j_grid.empty()) cfg.j_grid = int_list(j_grid);
        if (!extent_cap.empty()) cfg.extent_cap = nat_arg(extent_cap, "extent-cap");
        cfg.params = thresholds.apply(cfg.params);
        cfg.classes = split_list(classes);
        return cfg;
    };

    try {
        std::string text;
        if (*gen) text = cmd_generate(construction, params);
        else if (*cls) text = cmd_classify(load_weight(construction, weight, params), classify_config());
        else if (*den) text = cmd_density(dens);
        else if (*fm) text = cmd_families(fam, thresholds.apply(FamilyParams{}));
        else if (*lemma) text = cmd_lemma(lemma_n);
        else if (*sand) text = cmd_sandwich(load_weight(construction, weight, params), j, n, r, horizon.empty() ? "10000" : horizon, norm);
        else if (*crit) text = cmd_criterion(load_weight(construction, weight, params), vec, eps, horizon.empty() ? "10000" : horizon, norm);
        else if (*hier) text = cmd_hierarchy(classify_config(), format);
        write_artifact(common.output, text, out);
        return exit_ok;
    } catch (const ClaimFailure& e) {
        write_artifact(common.output, e.what(), out);
        err << "error: asserted invariant violated\n";
        return exit_invariant;
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << "\n";
        return exit_invariant;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

}  // namespace ftrans
