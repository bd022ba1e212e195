#include "ftrans/density.hpp"

#include <algorithm>
#include <sstream>

namespace ftrans {

std::size_t tail_size(std::size_t m, const Rational& tail_fraction) {
    if (m == 0) return 0;
    if (tail_fraction <= 0 || tail_fraction > 1) throw ConfigError("tail fraction must lie in (0, 1]");
    Int t = ceil_div(numerator(tail_fraction) * m, denominator(tail_fraction));
    auto k = static_cast<std::size_t>(t);
    return std::clamp<std::size_t>(k, 1, m);
}

DensityReport asymptotic_density_estimate(const RunSet& a, std::span<const Nat> checkpoints,
                                          const Rational& tail_fraction) {
    if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
    DensityReport rep;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const Nat& n = checkpoints[i];
        if (n < 1) throw ConfigError("checkpoints must be positive");
        if (i > 0 && n <= checkpoints[i - 1]) throw ConfigError("checkpoints must be strictly increasing");
        Nat c = a.prefix_count(n);
        rep.checkpoints.push_back({n, c, Rational(c, n)});
    }
    std::size_t t = tail_size(rep.checkpoints.size(), tail_fraction);
    for (std::size_t i = rep.checkpoints.size() - t; i < rep.checkpoints.size(); ++i) {
        const Rational& r = rep.checkpoints[i].ratio;
        if (!rep.lower_estimate || r < *rep.lower_estimate) rep.lower_estimate = r;
        if (!rep.upper_estimate || r > *rep.upper_estimate) rep.upper_estimate = r;
    }
    return rep;
}

DensityReport banach_density_estimate(const RunSet& a, std::span<const Nat> window_sizes,
                                      const Nat& horizon, const std::optional<Nat>& k_lo) {
    DensityReport rep;
    Nat lo = k_lo.value_or(Nat(horizon / 2));
    for (const Nat& s : window_sizes) {
        if (s < 1) throw ConfigError("window sizes must be positive");
        if (lo + s > horizon) throw ConfigError("window size " + s.str() + " exceeds the horizon");
        Nat hi = horizon - s;
        WindowExtreme mn = window_min(a, s, lo, hi);
        WindowExtreme mx = window_max(a, s, lo, hi);
        rep.banach.push_back({s, Rational(mn.count, s), Rational(mx.count, s), mn.k, mx.k});
    }
    return rep;
}

std::string density_csv(const DensityReport& report) {
    std::ostringstream out;
    out << "n,count,ratio_num,ratio_den,ratio_float\n";
    for (const auto& c : report.checkpoints)
        out << c.n << ',' << c.count << ',' << numerator(c.ratio) << ',' << denominator(c.ratio) << ','
            << format_float15(c.ratio) << '\n';
    return out.str();
}

nlohmann::json to_json(const DensityReport& report) {
    nlohmann::json j;
    j["checkpoints"] = nlohmann::json::array();
    for (const auto& c : report.checkpoints)
        j["checkpoints"].push_back({{"n", c.n.str()}, {"count", c.count.str()}, {"ratio", to_string(c.ratio)}});
    j["lower_estimate"] = report.lower_estimate ? nlohmann::json(to_string(*report.lower_estimate)) : nlohmann::json(nullptr);
    j["upper_estimate"] = report.upper_estimate ? nlohmann::json(to_string(*report.upper_estimate)) : nlohmann::json(nullptr);
    j["banach"] = nlohmann::json::array();
    for (const auto& b : report.banach)
        j["banach"].push_back({{"s", b.s.str()},
                               {"lower", to_string(b.lower)},
                               {"upper", to_string(b.upper)},
                               {"k_lower", b.k_lower.str()},
                               {"k_upper", b.k_upper.str()}});
    return j;
}

std::vector<Nat> linear_checkpoints(const Nat& horizon, unsigned points) {
    std::vector<Nat> out;
    for (unsigned k = 1; k <= points; ++k) {
        Nat c = horizon * k / points;
        if (c >= 1 && (out.empty() || c > out.back())) out.push_back(c);
    }
    return out;
}

}  // namespace ftrans
