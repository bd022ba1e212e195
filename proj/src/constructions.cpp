// Weight programs: the named constructions, WeightSpec serialization and the
// block generators that unroll a program into exponent segments.

#include "weights_internal.hpp"

#include <algorithm>
#include <bit>

namespace ftrans {

using nlohmann::json;
using detail::GenSegment;

std::string_view to_string(ShiftKind k) { return k == ShiftKind::unilateral ? "unilateral" : "bilateral"; }

const std::vector<ConstructionInfo>& constructions() {
    static const std::vector<ConstructionInfo> list = {
        {"p41_1", "ones (10^k of them), then k+1 twos and a reset; weakly mixing, upper density 0", true, false},
        {"p41_2", "ones on [10^(2^(2k+1)), 10^(2^(2k+2))), twos on the next block; D1-upper, not D-lower", true, false},
        {"p41_3", "i ones, 10^(2^(i-2)) twos, reset; lower density 1 with unbounded gaps", true, false},
        {"bd1_nonmixing", "1, then n twos and a reset 2^-n; lower Banach density 1, not mixing", false, false},
        {"p44_ruler", "ruler-sequence concatenation of blocks (2^n, 2^-n); bounded gaps, upper density 2/3", false, false},
        {"p52_ip", "twos with resets on finite sums of 4^n; topologically ergodic, not IP*", false, true},
        {"p54_delta", "twos with resets on b_1=2, b_{i+1}=b_i+i+2; Delta*, not mixing", false, true},
        {"p58_rhc", "twos on S = union of (l10^j - j, l10^j + j), reset right after; upper density of A tends to 0", false, false},
        {"constant", "constant weight 2^exponent (unilateral or bilateral)", false, false},
        {"periodic", "periodic exponent sequence (unilateral or bilateral)", false, false},
    };
    return list;
}

const ConstructionInfo& construction_info(std::string_view name) {
    for (const auto& c : constructions())
        if (c.name == name) return c;
    throw ConfigError("unknown construction: " + std::string(name));
}

// --- JSON ----------------------------------------------------------------------

namespace {

std::string_view repeat_name(RepeatRule r) {
    switch (r) {
        case RepeatRule::none: return "none";
        case RepeatRule::cycle: return "cycle";
        case RepeatRule::scheme: return "scheme";
    }
    return "?";
}

RepeatRule parse_repeat(const std::string& s) {
    if (s == "none") return RepeatRule::none;
    if (s == "cycle") return RepeatRule::cycle;
    if (s == "scheme") return RepeatRule::scheme;
    throw ConfigError("unknown repeat rule: " + s);
}

ShiftKind parse_kind(const std::string& s) {
    if (s == "unilateral") return ShiftKind::unilateral;
    if (s == "bilateral") return ShiftKind::bilateral;
    throw ConfigError("unknown shift kind: " + s);
}

Int json_int(const json& v) {
    if (v.is_string()) return parse_int(v.get<std::string>());
    if (v.is_number_integer()) return Int(v.get<long long>());
    throw ConfigError("expected an integer (decimal string)");
}

}  // namespace

json WeightSpec::to_json() const {
    json prog = json::array();
    for (const Block& b : program) {
        json blk = json::array();
        for (const Segment& s : b) blk.push_back({s.length.str(), s.delta.str()});
        prog.push_back(blk);
    }
    return {{"kind", std::string(ftrans::to_string(kind))},
            {"name", name},
            {"params", params},
            {"program", prog},
            {"repeat", std::string(repeat_name(repeat))},
            {"origin", origin.str()}};
}

WeightSpec WeightSpec::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("WeightSpec must be a JSON object");
    WeightSpec w;
    w.kind = parse_kind(j.value("kind", std::string("unilateral")));
    w.name = j.value("name", std::string("explicit"));
    w.params = j.value("params", json::object());
    w.repeat = parse_repeat(j.value("repeat", std::string("none")));
    if (j.contains("origin")) w.origin = json_int(j["origin"]);
    if (!j.contains("program") || !j["program"].is_array()) throw ConfigError("WeightSpec needs a 'program' array");
    for (const auto& blk : j["program"]) {
        Block b;
        for (const auto& seg : blk) {
            if (!seg.is_array() || seg.size() != 2) throw ConfigError("segment must be [length, delta]");
            Nat len = json_int(seg[0]);
            if (len < 1) throw ConfigError("segment length must be >= 1");
            b.push_back({len, json_int(seg[1])});
        }
        if (b.empty()) throw ConfigError("empty block in program");
        w.program.push_back(std::move(b));
    }
    if (w.repeat == RepeatRule::scheme) {
        construction_info(w.name);  // validates the name
    } else if (w.program.empty()) {
        throw ConfigError("explicit program must not be empty");
    }
    if (w.kind == ShiftKind::unilateral && w.origin != 0) throw ConfigError("origin is only meaningful for bilateral shifts");
    return w;
}

// --- generators ------------------------------------------------------------------

namespace detail {

std::vector<Segment> flatten(const WeightSpec& w) {
    std::vector<Segment> out;
    for (const Block& b : w.program)
        for (const Segment& s : b) {
            if (!out.empty() && out.back().delta == s.delta)
                out.back().length += s.length;
            else
                out.push_back(s);
        }
    return out;
}

namespace {

class ExplicitGenerator final : public BlockGenerator {
public:
    explicit ExplicitGenerator(const WeightSpec& w) : segs_(flatten(w)), cycle_(w.repeat == RepeatRule::cycle) {
        uniform_ = cycle_ && segs_.size() == 1;
        // skip the weights that sit at indices <= 0
        Nat skip = w.origin;
        Nat total = 0;
        for (const auto& s : segs_) total += s.length;
        if (cycle_) skip %= total;
        while (skip > 0 && i_ < segs_.size()) {
            Nat left = segs_[i_].length - used_;
            if (skip >= left) {
                skip -= left;
                advance();
            } else {
                used_ += skip;
                skip = 0;
            }
        }
    }

    std::vector<GenSegment> next(const Nat& remaining) override {
        if (uniform_) return {{remaining < 1 ? Nat(1) : remaining, segs_[0].delta, false}};
        if (i_ >= segs_.size()) return {};
        GenSegment g{segs_[i_].length - used_, segs_[i_].delta, false};
        advance();
        return {g};
    }

private:
    void advance() {
        used_ = 0;
        ++i_;
        if (cycle_ && i_ == segs_.size()) i_ = 0;
    }
    std::vector<Segment> segs_;
    bool cycle_;
    bool uniform_ = false;
    std::size_t i_ = 0;
    Nat used_ = 0;
};

class P41First final : public BlockGenerator {
public:
    explicit P41First(Nat base) : base_(std::move(base)) {}
    std::vector<GenSegment> next(const Nat&) override {
        Nat m = boost::multiprecision::pow(base_, k_);
        Nat up = k_ + 1;
        ++k_;
        return {{m, 0, true}, {up, 1, true}, {1, -Int(up), true}};
    }

private:
    Nat base_;
    unsigned k_ = 0;
};

class P41Second final : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        // A_k = [10^(2^(2k+1)), 10^(2^(2k+2))), B_k = [10^(2^(2k+2)), 10^(2^(2k+3)))
        if (k_ > 12) throw ConfigError("p41_2: block index beyond supported range");
        Nat a0 = pow10(1u << (2 * k_ + 1)), a1 = pow10(1u << (2 * k_ + 2)), b1 = pow10(1u << (2 * k_ + 3));
        Nat m = a1 - a0, n = b1 - a1;
        std::vector<GenSegment> out;
        if (k_ == 0) {
            out.push_back({m, 0, true});
        } else {
            out.push_back({1, -Int(prev_n_), true});
            out.push_back({m - 1, 0, true});
        }
        out.push_back({n, 1, true});
        prev_n_ = n;
        ++k_;
        return out;
    }

private:
    unsigned k_ = 0;
    Nat prev_n_ = 0;
};

class P41Third final : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        ++i_;
        if (i_ > 40) throw ConfigError("p41_3: block index beyond supported range");
        Nat len = i_ == 1 ? Nat(1) : pow10(1u << (i_ - 2));
        return {{Nat(i_), 0, true}, {len, 1, true}, {1, -Int(len), true}};
    }

private:
    unsigned i_ = 0;
};

class BdOne final : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        if (n_ == 0) {
            ++n_;
            return {{1, 0, true}};
        }
        Nat n = n_++;
        return {{n, 1, true}, {1, -Int(n), true}};
    }

private:
    unsigned long long n_ = 0;
};

class Ruler final : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        ++k_;
        unsigned n = static_cast<unsigned>(std::countr_zero(k_)) + 1;
        bool peak = std::has_single_bit(k_);        // A_{m+1} right after B_m: mark its peak
        bool end = std::has_single_bit(k_ + 1);     // last block of B_m
        return {{Nat(n), 1, peak}, {1, -Int(n), end}};
    }

private:
    unsigned long long k_ = 0;
};

/// Twos everywhere except w_b = 2^-(b - b_prev - 1) on an increasing set B.
class ResetOnSet : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        Nat b = next_b();
        Nat climb = b - prev_ - 1;
        prev_ = b;
        std::vector<GenSegment> out;
        if (climb > 0) out.push_back({climb, 1, false});
        out.push_back({1, -Int(climb), true});  // each reset b ∈ B is a checkpoint
        return out;
    }

protected:
    virtual Nat next_b() = 0;
    Nat prev_ = 0;
};

class FourSums final : public ResetOnSet {
    Nat next_b() override {
        ++k_;
        Nat b = 0, p = 4;
        for (unsigned long long k = k_; k; k >>= 1, p *= 4)
            if (k & 1) b += p;
        return b;
    }
    unsigned long long k_ = 0;
};

class Quadratic final : public ResetOnSet {
    Nat next_b() override {
        ++i_;
        cur_ = i_ == 1 ? Nat(2) : Nat(cur_ + i_ + 1);  // b_{i+1} = b_i + i + 2
        return cur_;
    }
    unsigned long long i_ = 0;
    Nat cur_ = 0;
};

/// Climb by one on each run of S, reset right after it, flat elsewhere.
class RhcSet final : public BlockGenerator {
public:
    std::vector<GenSegment> next(const Nat&) override {
        for (;;) {
            if (c_ > 1'000'000'000'000'000'000ull) throw ConfigError("p58_rhc: index beyond supported range");
            unsigned long long c = c_;
            c_ += 10;
            unsigned long long r = 0;
            for (unsigned long long x = c / 10; x % 10 == 0; x /= 10) ++r;  // v10(c) - 1
            unsigned long long lo = c - r, hi = c + r;
            if (!have_) {
                lo_ = lo, hi_ = hi, have_ = true;
                continue;
            }
            if (lo <= hi_ + 1) {
                hi_ = std::max(hi_, hi);
                continue;
            }
            std::vector<GenSegment> out;
            if (lo_ > done_ + 1) out.push_back({Nat(lo_ - done_ - 1), 0, false});
            unsigned long long len = hi_ - lo_ + 1;
            out.push_back({Nat(len), 1, false});
            out.push_back({1, -Int(len), false});
            done_ = hi_ + 1;
            lo_ = lo, hi_ = hi;
            return out;
        }
    }

private:
    unsigned long long c_ = 10, lo_ = 0, hi_ = 0, done_ = 0;
    bool have_ = false;
};

}  // namespace

std::unique_ptr<BlockGenerator> make_generator(const WeightSpec& w) {
    if (w.repeat != RepeatRule::scheme) return std::make_unique<ExplicitGenerator>(w);
    const std::string& n = w.name;
    if (n == "p41_1") return std::make_unique<P41First>(json_int(w.params.value("m_base", json("10"))));
    if (n == "p41_2") return std::make_unique<P41Second>();
    if (n == "p41_3") return std::make_unique<P41Third>();
    if (n == "bd1_nonmixing") return std::make_unique<BdOne>();
    if (n == "p44_ruler") return std::make_unique<Ruler>();
    if (n == "p52_ip") return std::make_unique<FourSums>();
    if (n == "p54_delta") return std::make_unique<Quadratic>();
    if (n == "p58_rhc") return std::make_unique<RhcSet>();
    throw ConfigError("construction has no generator: " + n);
}

}  // namespace detail

WeightSpec generate_weight(std::string_view construction, const json& params) {
    const ConstructionInfo& info = construction_info(construction);
    WeightSpec w;
    w.name = info.name;
    w.params = params.is_object() ? params : json::object();
    if (info.name == "constant" || info.name == "periodic") {
        w.kind = parse_kind(w.params.value("kind", std::string("unilateral")));
        w.params["kind"] = std::string(to_string(w.kind));
        w.repeat = RepeatRule::cycle;
        Block b;
        if (info.name == "constant") {
            Int e = json_int(w.params.value("exponent", json("1")));
            w.params["exponent"] = e.str();
            b.push_back({1, e});
        } else {
            if (!w.params.contains("deltas") || !w.params["deltas"].is_array() || w.params["deltas"].empty())
                throw ConfigError("periodic construction needs a non-empty 'deltas' array");
            for (const auto& d : w.params["deltas"]) {
                Int e = json_int(d);
                if (!b.empty() && b.back().delta == e) b.back().length += 1;
                else b.push_back({1, e});
            }
        }
        w.program.push_back(std::move(b));
        if (w.kind == ShiftKind::bilateral) w.origin = json_int(w.params.value("origin", json("0")));
        return w;
    }
    if (w.params.contains("kind") && w.params["kind"] != "unilateral")
        throw ConfigError(info.name + " is a unilateral construction");
    if (info.name == "p41_1" && !w.params.contains("m_base")) w.params["m_base"] = "10";
    unsigned preview = w.params.value("preview_blocks", 6u);
    w.params["preview_blocks"] = preview;
    w.repeat = RepeatRule::scheme;
    auto gen = detail::make_generator(w);
    for (unsigned i = 0; i < preview; ++i) {
        Block b;
        for (auto& g : gen->next(Nat(1))) b.push_back({g.length, g.delta});
        w.program.push_back(std::move(b));
    }
    return w;
}

}  // namespace ftrans
