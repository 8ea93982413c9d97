#pragma once

// Single-photon time-bin state on the two arms of a Mach-Zehnder
// interferometer, discretized into n equal time slots.
//
// Basis ordering: path A slot s -> index s-1, path B slot s -> index n+s-1
// (0-based storage of the 1-based |s>, |s+n> labelling).

#include <complex>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qot/error.hpp"

namespace qot {

using Complex = std::complex<double>;

inline constexpr double kExactTol = 1e-12;
inline constexpr double kSpectralTol = 1e-10;

/// Slot count n and delay offset delta (both in slots).
///
/// delta == n is allowed for degenerate analysis cases; the protocol itself
/// requires delta < n (see require_protocol_window).
class ProtocolGeometry {
 public:
  ProtocolGeometry(int n, int delta);

  int n() const { return n_; }
  int delta() const { return delta_; }
  int dimension() const { return 2 * n_; }

  /// Throws InvalidInput unless 1 <= delta <= n-1.
  void require_protocol_window() const;

  bool operator==(const ProtocolGeometry&) const = default;

 private:
  int n_;
  int delta_;
};

enum class Path { A, B };

const char* to_string(Path p);

struct ModeIndex {
  Path path;
  int slot;  // 1-based

  /// 0-based basis index.
  std::size_t basis_index(const ProtocolGeometry& g) const;
  static ModeIndex from_basis_index(const ProtocolGeometry& g, std::size_t idx);

  bool operator==(const ModeIndex&) const = default;
};

class TimeBinState {
 public:
  /// All amplitudes zero; fill via set().
  explicit TimeBinState(ProtocolGeometry g);
  TimeBinState(ProtocolGeometry g, std::vector<Complex> amplitudes);

  const ProtocolGeometry& geometry() const { return geometry_; }
  std::span<const Complex> amplitudes() const { return amps_; }

  Complex amplitude(Path p, int slot) const;
  void set(Path p, int slot, Complex value);

  double norm_squared() const;
  bool is_normalized(double tol = kExactTol) const;

  bool lossy() const { return lossy_; }
  void mark_lossy() { lossy_ = true; }

  /// Same amplitudes embedded in a window with `extra` trailing slots.
  TimeBinState extended(int extra) const;

  /// CSV rows `path,slot,re,im` for nonzero amplitudes, with header.
  void write_csv(std::ostream& os) const;

 private:
  ProtocolGeometry geometry_;
  std::vector<Complex> amps_;
  bool lossy_ = false;
};

enum class Detector { D0 = 0, D1 = 1 };

struct Outcome {
  Detector detector;
  int slot;
  double probability;
};

struct DetectionEvent {
  enum class Kind { Click, NoClick, MultiClick };

  Kind kind = Kind::NoClick;
  Detector detector = Detector::D0;  // meaningful for Click only
  int slot = 0;                      // meaningful for Click only

  static DetectionEvent click(Detector d, int slot) { return {Kind::Click, d, slot}; }
  static DetectionEvent no_click() { return {Kind::NoClick, Detector::D0, 0}; }
  static DetectionEvent multi_click() { return {Kind::MultiClick, Detector::D0, 0}; }

  bool is_click() const { return kind == Kind::Click; }
  bool operator==(const DetectionEvent&) const = default;
};

/// Photon after the source beam splitter: equal superposition on both arms at t_s.
TimeBinState make_source_state(const ProtocolGeometry& g, int t_s);

/// Moves the amplitudes of `path` forward by tau slots.
TimeBinState apply_delay(const TimeBinState& state, Path path, int tau);

TimeBinState apply_phase(const TimeBinState& state, Path path, double theta);

/// Detector statistics behind the output beam splitter.
///
/// P(D_i, t) = |<psi_i(t)|psi>|^2 with psi_0(t) = (|t>_A + |t>_B)/sqrt2 and
/// psi_1(t) = (|t>_A - |t>_B)/sqrt2. Entries below 1e-15 are dropped.
std::vector<Outcome> outcome_distribution(const TimeBinState& state);

/// Samples one click from outcome_distribution.
DetectionEvent measure_detectors(const TimeBinState& state, std::mt19937_64& rng);

}  // namespace qot
