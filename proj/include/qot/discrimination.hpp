#pragma once

// Density matrices of the photon a dishonest receiver intercepts, their trace
// distance, and the Helstrom cheating bounds derived from it.

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

#include "qot/timebin.hpp"

namespace qot {

/// Which emission slots enter the mixture.
///
/// Full: tau_A = 0 pairs use t_s in [1, n], tau_A = delta pairs use
/// t_s in [1, n - delta] (2n - delta pure terms). Restricted: both use
/// t_s in [1, n - delta] as the sender actually draws it (2(n - delta) terms).
enum class SlotWindow { Full, Restricted };

const char* to_string(SlotWindow w);

/// Number of equally weighted (tau_A, t_s) pairs in the mixture.
int mixture_terms(const ProtocolGeometry& g, SlotWindow window);

class DensityMatrix {
 public:
  /// Throws InvalidInput on wrong dimension, non-Hermitian input, or trace != 1.
  DensityMatrix(ProtocolGeometry g, Eigen::MatrixXcd entries);

  const ProtocolGeometry& geometry() const { return geometry_; }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  double hermiticity_error() const;
  Complex trace() const { return entries_.trace(); }
  double min_eigenvalue() const;

 private:
  ProtocolGeometry geometry_;
  Eigen::MatrixXcd entries_;
};

/// State of the photon entering the receiver for secret bit b, averaged over
/// the sender's delay and emission slot.
DensityMatrix build_rho(const ProtocolGeometry& g, int b, SlotWindow window = SlotWindow::Full);

/// rho_0 - rho_1 assembled from its sparse pattern (real, symmetric).
Eigen::MatrixXd build_difference(const ProtocolGeometry& g,
                                 SlotWindow window = SlotWindow::Full);

/// Half the trace norm of a Hermitian matrix, via a full eigendecomposition.
double half_trace_norm(const Eigen::MatrixXcd& hermitian);

/// Dense reference route: D = 1/2 sum |lambda_k(rho0 - rho1)|.
double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1);

/// Fast route on the off-diagonal n x n block only.
///
/// The difference matrix is [[0, C], [C^T, 0]] / terms, so D = sum sigma(C) / terms.
/// C splits into `delta` independent lower-bidiagonal chains of ones (slots
/// congruent mod delta), each handled by the tridiagonal solver.
double trace_distance_structured(const ProtocolGeometry& g,
                                 SlotWindow window = SlotWindow::Full);

struct HelstromReport {
  int n = 0;
  int delta = 0;
  double trace_distance = 0.0;
  double p_unambiguous = 0.0;    // p = D
  double u = 0.0;                // p - 1/2
  double r_bar_ambiguous = 0.0;  // (D + 1) / 2

  static HelstromReport from_distance(int n, int delta, double d);
};

HelstromReport helstrom_report(const ProtocolGeometry& g);

/// Single JSON object with keys n, delta, D, p, u, R_bar.
void write_json(std::ostream& os, const HelstromReport& report);

struct CurvePoint {
  int n;
  double trace_distance;
};

struct TraceDistanceCurve {
  int delta = 1;
  std::vector<CurvePoint> points;
};

/// CSV with header `n,delta,trace_distance`.
void write_csv(std::ostream& os, const TraceDistanceCurve& curve);

/// D(n) for each n, evaluated in parallel. n_values must be strictly increasing.
TraceDistanceCurve sweep_trace_distance(std::span<const int> n_values, int delta,
                                        SlotWindow window = SlotWindow::Full);

/// Single-threaded reference for sweep_trace_distance.
TraceDistanceCurve sweep_trace_distance_serial(std::span<const int> n_values, int delta,
                                               SlotWindow window = SlotWindow::Full);

}  // namespace qot
