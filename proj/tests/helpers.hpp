#pragma once

#include "ftrans/intset.hpp"

#include <cstdint>
#include <initializer_list>
#include <utility>
#include <vector>

namespace th {

using ftrans::Nat;
using ftrans::RunSet;

inline RunSet rs(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> runs) {
    std::vector<ftrans::Run> v;
    for (auto [a, b] : runs) v.push_back({a, b});
    return RunSet::from_runs(std::move(v));
}

inline RunSet elems(std::initializer_list<std::uint64_t> xs) {
    std::vector<Nat> v(xs.begin(), xs.end());
    return RunSet::from_elements(std::move(v));
}

inline RunSet multiples(std::uint64_t step, std::uint64_t offset, std::uint64_t h) {
    std::vector<Nat> v;
    for (std::uint64_t x = offset == 0 ? step : offset; x <= h; x += step) v.push_back(x);
    return RunSet::from_elements(std::move(v));
}

inline RunSet evens(std::uint64_t h) { return multiples(2, 0, h); }
inline RunSet odds(std::uint64_t h) { return multiples(2, 1, h); }

}  // namespace th
