#pragma once

#include "ftrans/shifts.hpp"

#include <memory>
#include <vector>

namespace ftrans::detail {

struct GenSegment {
    Nat length;
    Int delta;
    bool mark = false;  // end of this segment is a natural density checkpoint
};

/// Produces the forward weight sequence (indices 1, 2, ...) block by block.
class BlockGenerator {
public:
    virtual ~BlockGenerator() = default;
    /// Next block; empty when the sequence ends. `remaining` is how many more
    /// indices the caller still needs, so uniform tails can be emitted in one piece.
    virtual std::vector<GenSegment> next(const Nat& remaining) = 0;
};

std::unique_ptr<BlockGenerator> make_generator(const WeightSpec& w);

/// Flattened program segments (in program order) for explicit programs.
std::vector<Segment> flatten(const WeightSpec& w);

}  // namespace ftrans::detail
