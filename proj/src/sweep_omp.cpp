#include <exception>
#include <vector>

#include "ctrl_dos/analysis.hpp"

namespace ctrl_dos {

SweepResult sweep(const CanonicalSystem& sys, const JammerProfile& j, double sigma,
                  const std::vector<double>& grid, const SweepOptions& opts) {
  check_grid(grid, sys.order());
  const auto count = static_cast<long>(grid.size());
  std::vector<DecayReport> reports(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < count; ++k) {
    try {
      reports[static_cast<std::size_t>(k)] = analyze_lambda(sys, j, sigma, grid[k], opts);
    } catch (...) {
      failures[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }

  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  SweepResult out;
  out.reports = std::move(reports);
  out.lambda_bar = find_lambda_bar(out.reports);
  return out;
}

}  // namespace ctrl_dos
