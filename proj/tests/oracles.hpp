#pragma once

// Test-only reference values, independent of the library's numerical paths.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace qot::oracle {

// The Golub-Kahan form of an all-ones bidiagonal block is the adjacency
// matrix of a path graph with L = rows + cols vertices, whose spectrum is
// 2cos(k*pi/(L+1)). The positive half gives the singular values.
inline std::vector<double> ones_bidiagonal_singular_values(int rows, int cols) {
  const int path_len = rows + cols;
  std::vector<double> sigma;
  for (int k = 1; k <= cols; ++k) sigma.push_back(2.0 * std::cos(k * std::numbers::pi / (path_len + 1)));
  return sigma;
}

// D(n, delta) for the full window from the closed form above.
inline double closed_form_trace_distance(int n, int delta) {
  double sum = 0.0;
  for (int r = 1; r <= delta; ++r) {
    const int m = (n - r) / delta + 1;
    for (double s : ones_bidiagonal_singular_values(m, m)) sum += s;
  }
  return sum / (2.0 * n - delta);
}

// Dense n x n block C of rho_0 - rho_1 (rows: path A slots, cols: path B slots),
// unnormalized: C[s][s] = 1, C[s+delta][s] = 1.
inline Eigen::MatrixXd offdiagonal_block(int n, int delta) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    c(s, s) = 1.0;
    if (s + delta < n) c(s + delta, s) = 1.0;
  }
  return c;
}

inline constexpr double kGoldenRatio = std::numbers::phi;

// Hand expansion for n=2, delta=1: rho_0 - rho_1 = (1/3)[[0, C], [C^T, 0]] with
// C = [[1,0],[1,1]], singular values phi and 1/phi, so the spectrum is
// {+-phi/3, +-1/(3 phi)} and D = (phi + 1/phi)/3 = sqrt(5)/3.
inline Eigen::MatrixXd hand_difference_n2() {
  Eigen::MatrixXd m(4, 4);
  m << 0, 0, 1, 0,
       0, 0, 1, 1,
       1, 1, 0, 0,
       0, 1, 0, 0;
  return m / 3.0;
}

inline std::vector<double> hand_spectrum_n2() {
  return {-kGoldenRatio / 3.0, -1.0 / (3.0 * kGoldenRatio), 1.0 / (3.0 * kGoldenRatio), kGoldenRatio / 3.0};
}

// n=1, delta=1: rho_0 = |+><+| on {A1, B1}, rho_1 = |-><-|, difference [[0,1],[1,0]].
inline Eigen::MatrixXd hand_rho_n1(int b) {
  const double s = b == 0 ? 1.0 : -1.0;
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5 * s,
       0.5 * s, 0.5;
  return m;
}

inline std::vector<double> hand_spectrum_n1() { return {-1.0, 1.0}; }

}  // namespace qot::oracle
