#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "xraysim/types.hpp"

namespace xraysim {

/// Nearest-rank percentile: value at sorted index ceil(q/100 * n), 1-indexed.
/// q in (0, 100]. The small epsilon shields ceil() from binary representation
/// fuzz when q*n/100 is an exact integer (e.g. q=99, n=1000 -> rank 990).
template <typename T>
T percentile_nearest_rank(std::vector<T> values, double q) {
    if (values.empty())
        throw Error("percentile of empty data");
    const double n = double(values.size());
    auto rank = std::size_t(std::ceil(q * n / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

} // namespace xraysim
