#include "qot/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "qot/error.hpp"

namespace qot {

std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> d,
                                                      std::span<const double> off) {
  const std::size_t n = d.size();
  if (n == 0) return d;
  if (off.size() + 1 != n) throw InvalidInput("tridiagonal off-diagonal must have length n-1");

  // e[i] couples i and i+1; e[n-1] is a zero sentinel.
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      // Find the first negligible off-diagonal at or after l.
      for (m = l; m + 1 < n; ++m) {
        const double scale = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * scale) break;
      }
      if (m == l) break;
      if (++sweeps > kMaxSweeps) throw std::runtime_error("tridiagonal QL failed to converge");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        const double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          // Deflation inside the chase: recover and restart this block.
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> lower_bidiagonal_singular_values(std::span<const double> diag,
                                                     std::span<const double> sub) {
  const std::size_t cols = diag.size();
  if (cols == 0) return {};
  if (sub.size() != cols && sub.size() + 1 != cols)
    throw InvalidInput("bidiagonal sub-diagonal must have length cols or cols-1");

  // Gram matrix B^T B is tridiagonal: column j touches rows j and j+1.
  std::vector<double> gram_diag(cols);
  std::vector<double> gram_off(cols - 1);
  for (std::size_t j = 0; j < cols; ++j) {
    const double below = j < sub.size() ? sub[j] : 0.0;
    gram_diag[j] = diag[j] * diag[j] + below * below;
    if (j + 1 < cols) gram_off[j] = below * diag[j + 1];
  }

  auto lambdas = symmetric_tridiagonal_eigenvalues(std::move(gram_diag), gram_off);
  std::vector<double> sigma(lambdas.size());
  std::transform(lambdas.rbegin(), lambdas.rend(), sigma.begin(),
                 [](double l) { return std::sqrt(std::max(l, 0.0)); });
  return sigma;
}

}  // namespace qot
