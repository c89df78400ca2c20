#pragma once

#include <cstddef>
#include <functional>

namespace acs::parallel {

/// Worker count used by grid sweeps. Like Eigen::setNbThreads, this is a
/// process-wide setting; results never depend on it.
void set_threads(int n);
int threads();

/// Calls body(begin, end) on disjoint contiguous sub-ranges of [0, n).
void for_range(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of term(i) over [0, n). Terms are grouped in fixed-size chunks that are
/// summed in index order, so the result is bitwise identical for any worker count.
double sum(std::size_t n, const std::function<double(std::size_t)>& term);

/// Maximum of term(i) over [0, n); 0 for an empty range.
double max(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace acs::parallel
