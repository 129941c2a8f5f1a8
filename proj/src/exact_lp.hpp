#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace logicdepth::detail {

/// Solves  min sum_j |u_j|  s.t.  rows[i] . u >= 1  over free rational u,
/// with a two-phase dense simplex and Bland's rule. Exact; nullopt iff the
/// system is infeasible.
std::optional<std::vector<mpq_class>> min_l1_margin_solution(
    const std::vector<std::vector<int>>& rows, std::size_t cols);

}  // namespace logicdepth::detail
