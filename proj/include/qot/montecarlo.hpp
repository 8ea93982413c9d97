#pragma once

// Batch experiment harness: many independent seeded protocol runs reduced to
// the statistics the security claims are stated in.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qot/protocol.hpp"

namespace qot {

struct BitPolicy {
  enum class Kind { Fixed, UniformRandom };
  Kind kind = Kind::UniformRandom;
  int bit = 0;

  static BitPolicy fixed(int b) { return {Kind::Fixed, b}; }
  static BitPolicy uniform() { return {Kind::UniformRandom, 0}; }
};

struct ExperimentSpec {
  std::int64_t trials = 100000;
  std::uint64_t seed = 12345;
  ProtocolGeometry geometry{1000, 1};
  AdversaryConfig adversary;
  NoiseModel noise;
  BitPolicy b_policy;
  SlotWindow window = SlotWindow::Restricted;

  void validate() const;
};

/// Per-run facts the reductions need.
struct TrialRecord {
  int b = 0;
  int tau_a = 0;
  int tau_b = 0;
  int theta_a_bit = 0;
  int theta_b_bit = 0;
  int t_s = 0;
  DetectionEvent detection;
  RunOutcome outcome;
  bool alice_guess = false;
  std::size_t bob_to_alice_messages = 0;
};

TrialRecord run_trial(const ExperimentSpec& spec, std::int64_t index);

struct ExperimentStats {
  std::int64_t trials = 0;
  std::int64_t aborted = 0;
  std::int64_t conclusive = 0;
  std::int64_t inconclusive = 0;
  std::int64_t wrong_conclusive = 0;
  std::int64_t match_clicks = 0;             // single clicks with tau_A == tau_B
  std::int64_t match_detector_violations = 0;  // detector != theta_A/pi xor theta_B/pi
  std::int64_t bob_to_alice_messages = 0;

  double p_conclusive = 0.0;  // among non-aborted runs
  double p_conclusive_band = 0.0;  // 3 sigma binomial half-width
  double reliability_conclusive = 0.0;
  double avg_reliability = 0.0;  // inconclusive runs score 1/2
  double guess_reliability = 0.0;  // inconclusive runs with a guess; NaN if none
  double v_hat = 0.0;
  double u_hat = 0.0;
  double abort_rate = 0.0;
  double mismatch_mi_bits = 0.0;  // I(detector; b) given tau_A != tau_B; NaN if < 1000 samples
  double mismatch_joint_mi_bits = 0.0;  // I((detector, arrival offset); b), same conditioning
};

/// Reduction shared by the serial and parallel paths (order-independent counts).
ExperimentStats reduce_trials(std::span<const TrialRecord> records);

/// Trials fan out over OpenMP threads; seeds depend only on (seed, index).
ExperimentStats run_experiment(const ExperimentSpec& spec);

ExperimentStats run_experiment_serial(const ExperimentSpec& spec);

/// Plug-in mutual information with Miller-Madow correction, in bits, clamped at 0.
///
/// Throws InvalidInput for fewer than 1000 samples.
double mutual_information_bits(std::span<const std::pair<int, int>> samples);

struct NoisePoint {
  double p_loss;
  double p_dark;
  ExperimentStats stats;
};

/// Full grid p_loss x p_dark over `base`, same seed at every point.
std::vector<NoisePoint> noise_sensitivity(const ExperimentSpec& base, std::span<const double> p_loss,
                                          std::span<const double> p_dark);

void write_json(std::ostream& os, const ExperimentStats& stats);

/// CSV `p_loss,p_dark,abort_rate,p_conclusive,avg_reliability`.
void write_csv(std::ostream& os, std::span<const NoisePoint> grid);

/// Two-proportion z statistic (pooled variance).
double two_proportion_z(double p1, std::int64_t n1, double p2, std::int64_t n2);

}  // namespace qot
