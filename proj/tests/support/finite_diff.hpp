#pragma once
#include <functional>
#include <vector>

// Central finite differences, the independent oracle for gradient checks.
// Kept free of any tape machinery on purpose: f is evaluated on plain buffers.
namespace testsupport {

inline std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline double rel_err(double got, double want) {
  const double denom = std::max(1.0, std::abs(want));
  return std::abs(got - want) / denom;
}

inline double max_rel_err(const std::vector<double>& got, const std::vector<double>& want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    worst = std::max(worst, rel_err(got[i], want[i]));
  return worst;
}

}  // namespace testsupport
