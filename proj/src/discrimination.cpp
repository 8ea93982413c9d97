#include "qot/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"

#include "qot/tridiagonal.hpp"

namespace qot {

namespace {

void require_window(const ProtocolGeometry& g, SlotWindow window) {
  if (window == SlotWindow::Restricted && g.delta() >= g.n())
    throw InvalidInput("restricted slot window needs delta < n");
}

// Visits every (A-slot, B-slot) pair carrying a pure term of the mixture.
template <class Fn>
void for_each_term(const ProtocolGeometry& g, SlotWindow window, Fn&& fn) {
  const int n = g.n();
  const int delta = g.delta();
  const int undelayed_last = window == SlotWindow::Full ? n : n - delta;
  for (int t_s = 1; t_s <= undelayed_last; ++t_s) fn(t_s, t_s);
  for (int t_s = 1; t_s <= n - delta; ++t_s) fn(t_s + delta, t_s);
}

void validate_sweep(std::span<const int> n_values, int delta, SlotWindow window) {
  if (n_values.empty()) throw InvalidInput("trace-distance sweep needs at least one n");
  if (delta < 1) throw InvalidInput("delta must be >= 1");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (i > 0 && n_values[i] <= n_values[i - 1])
      throw InvalidInput("sweep n values must be strictly increasing");
    ProtocolGeometry g(n_values[i], delta);
    require_window(g, window);
  }
}

}  // namespace

const char* to_string(SlotWindow w) { return w == SlotWindow::Full ? "full" : "restricted"; }

int mixture_terms(const ProtocolGeometry& g, SlotWindow window) {
  require_window(g, window);
  return window == SlotWindow::Full ? 2 * g.n() - g.delta() : 2 * (g.n() - g.delta());
}

DensityMatrix::DensityMatrix(ProtocolGeometry g, Eigen::MatrixXcd entries)
    : geometry_(g), entries_(std::move(entries)) {
  const auto dim = static_cast<Eigen::Index>(g.dimension());
  if (entries_.rows() != dim || entries_.cols() != dim)
    throw InvalidInput("density matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  if (hermiticity_error() > kExactTol) throw InvalidInput("density matrix is not Hermitian");
  if (std::abs(trace() - Complex{1.0, 0.0}) > kExactTol)
    throw InvalidInput("density matrix trace differs from 1");
}

double DensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix build_rho(const ProtocolGeometry& g, int b, SlotWindow window) {
  if (b != 0 && b != 1) throw InvalidInput("secret bit must be 0 or 1");
  const double weight = 1.0 / (2.0 * mixture_terms(g, window));
  const double sign_a = b == 0 ? 1.0 : -1.0;
  const auto n = static_cast<Eigen::Index>(g.n());

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for_each_term(g, window, [&](int slot_a, int slot_b) {
    // |v> = sign_a |slot_a>_A + |slot_b>_B; accumulate weight |v><v|.
    const Eigen::Index ia = slot_a - 1;
    const Eigen::Index ib = n + slot_b - 1;
    rho(ia, ia) += weight;
    rho(ib, ib) += weight;
    rho(ia, ib) += sign_a * weight;
    rho(ib, ia) += sign_a * weight;
  });
  return DensityMatrix(g, std::move(rho));
}

Eigen::MatrixXd build_difference(const ProtocolGeometry& g, SlotWindow window) {
  const double weight = 1.0 / mixture_terms(g, window);
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for_each_term(g, window, [&](int slot_a, int slot_b) {
    diff(slot_a - 1, n + slot_b - 1) += weight;
    diff(n + slot_b - 1, slot_a - 1) += weight;
  });
  return diff;
}

double half_trace_norm(const Eigen::MatrixXcd& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw InvalidInput("trace norm needs a square matrix");
  if (hermitian.size() == 0) return 0.0;
  // Everything built here is real, so prefer the real solver.
  if (hermitian.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hermitian.real(), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho0, const DensityMatrix& rho1) {
  if (rho0.entries().rows() != rho1.entries().rows())
    throw InvalidInput("trace distance needs density matrices of equal dimension");
  return std::clamp(half_trace_norm(rho0.entries() - rho1.entries()), 0.0, 1.0);
}

double trace_distance_structured(const ProtocolGeometry& g, SlotWindow window) {
  const int n = g.n();
  const int delta = g.delta();
  const int terms = mixture_terms(g, window);

  double sigma_sum = 0.0;
  std::vector<double> diag;
  std::vector<double> sub;
  for (int residue = 1; residue <= delta; ++residue) {
    // Chain rows: residue, residue+delta, ... <= n.
    const int rows = (n - residue) / delta + 1;
    const int cols = window == SlotWindow::Full ? rows : rows - 1;
    if (cols <= 0) continue;
    diag.assign(static_cast<std::size_t>(cols), 1.0);
    sub.assign(static_cast<std::size_t>(rows - 1), 1.0);
    for (double s : lower_bidiagonal_singular_values(diag, sub)) sigma_sum += s;
  }
  return std::clamp(sigma_sum / terms, 0.0, 1.0);
}

HelstromReport HelstromReport::from_distance(int n, int delta, double d) {
  HelstromReport r;
  r.n = n;
  r.delta = delta;
  r.trace_distance = d;
  r.p_unambiguous = d;
  r.u = d - 0.5;
  r.r_bar_ambiguous = (d + 1.0) / 2.0;
  return r;
}

HelstromReport helstrom_report(const ProtocolGeometry& g) {
  return HelstromReport::from_distance(g.n(), g.delta(), trace_distance_structured(g));
}

void write_json(std::ostream& os, const HelstromReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["delta"] = report.delta;
  j["D"] = report.trace_distance;
  j["p"] = report.p_unambiguous;
  j["u"] = report.u;
  j["R_bar"] = report.r_bar_ambiguous;
  os << j.dump(2) << '\n';
}

void write_csv(std::ostream& os, const TraceDistanceCurve& curve) {
  os << "n,delta,trace_distance\n";
  const auto prec = os.precision(17);
  for (const auto& p : curve.points) os << p.n << ',' << curve.delta << ',' << p.trace_distance << '\n';
  os.precision(prec);
}

TraceDistanceCurve sweep_trace_distance(std::span<const int> n_values, int delta, SlotWindow window) {
  validate_sweep(n_values, delta, window);
  TraceDistanceCurve curve{delta, std::vector<CurvePoint>(n_values.size())};
  const auto count = static_cast<long>(n_values.size());
  // Cost grows ~n^2 per point; dynamic scheduling keeps the large-n tail balanced.
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    const int n = n_values[static_cast<std::size_t>(i)];
    curve.points[static_cast<std::size_t>(i)] = {
        n, trace_distance_structured(ProtocolGeometry(n, delta), window)};
  }
  return curve;
}

TraceDistanceCurve sweep_trace_distance_serial(std::span<const int> n_values, int delta,
                                               SlotWindow window) {
  validate_sweep(n_values, delta, window);
  TraceDistanceCurve curve{delta, {}};
  curve.points.reserve(n_values.size());
  for (int n : n_values)
    curve.points.push_back({n, trace_distance_structured(ProtocolGeometry(n, delta), window)});
  return curve;
}

}  // namespace qot
