#pragma once

#include <span>
#include <vector>

namespace qot {

/// Eigenvalues of the symmetric tridiagonal matrix with main diagonal `diag`
/// and off-diagonal `off` (off[i] couples rows i and i+1), ascending.
///
/// Implicit QL with Wilkinson shifts, eigenvalues only.
std::vector<double> symmetric_tridiagonal_eigenvalues(std::vector<double> diag,
                                                      std::span<const double> off);

/// Singular values of a lower-bidiagonal block B with B[j][j] = diag[j] and
/// B[j+1][j] = sub[j], descending.
///
/// The block is square when sub.size() == diag.size() - 1 and has one extra
/// row when sub.size() == diag.size().
std::vector<double> lower_bidiagonal_singular_values(std::span<const double> diag,
                                                     std::span<const double> sub);

}  // namespace qot
