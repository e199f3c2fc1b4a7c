// Small numeric and I/O helpers shared across modules.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace foliation {

struct LinFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  int n = 0;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Wilson 95% score interval for k successes out of n.
std::pair<double, double> wilson_ci_95(std::int64_t k, std::int64_t n);

// Adaptive Gauss-Kronrod (15-point) integration; returns value, writes the
// error estimate when requested.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, int max_depth = 18, double* err = nullptr);

// Shortest text round-trip is not enough for the CSV contract; 17 significant
// digits reload losslessly into double.
std::string format_g17(double v);

// Write-to-temp then rename, so readers never observe partial files.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Worker count: FOLIATION_THREADS when set (clamped to [1, 64]), otherwise
// hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) over contiguous index chunks, one thread per
// chunk. Results must be written to disjoint slots; output is then identical
// for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace foliation
