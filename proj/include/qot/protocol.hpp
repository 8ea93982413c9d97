#pragma once

// Sender/receiver state machines for the single-photon all-or-nothing
// oblivious transfer, run over an in-process one-way channel.
//
// Time is measured in abstract ticks. Slot s of the transmission window
// [t1, t2] occupies tick s, so t1 = 1 and t2 = n; the delay announcement is
// due at t2 + T.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "qot/discrimination.hpp"
#include "qot/timebin.hpp"

namespace qot {

using Tick = double;

struct AliceParams {
  int b = 0;
  int tau_a = 0;
  double theta_a = 0.0;  // b * pi
  int t_s = 1;

  /// Builds params with theta_a = b*pi; validates the slot window.
  static AliceParams make(const ProtocolGeometry& g, int b, int tau_a, int t_s,
                          SlotWindow window = SlotWindow::Restricted);
};

struct BobParams {
  int tau_b = 0;
  int phase_bit = 0;  // theta_B = phase_bit * pi

  double theta_b() const;
};

struct NoiseModel {
  double p_loss = 0.0;
  double p_dark = 0.0;

  void validate() const;
  bool noiseless() const { return p_loss == 0.0 && p_dark == 0.0; }
};

enum class BobStrategy { Honest, StoreAndWait, ImmediateGuess };

const char* to_string(BobStrategy s);
BobStrategy parse_strategy(const std::string& name);

struct AdversaryConfig {
  BobStrategy bob_strategy = BobStrategy::Honest;
  Tick memory_lifetime = 0.0;  // StoreAndWait only; counted from t2
  Tick announce_delay = 100.0;  // T

  void validate() const;
};

struct RunOutcome {
  enum class Kind { Conclusive, Inconclusive, Abort };

  Kind kind = Kind::Inconclusive;
  std::optional<int> bit;  // b' when conclusive, Bob's guess when inconclusive
  std::string reason;      // Abort only

  static RunOutcome conclusive(int b) { return {Kind::Conclusive, b, {}}; }
  static RunOutcome inconclusive(std::optional<int> guess = std::nullopt) {
    return {Kind::Inconclusive, guess, {}};
  }
  static RunOutcome abort(std::string why) { return {Kind::Abort, std::nullopt, std::move(why)}; }

  bool operator==(const RunOutcome&) const = default;
};

const char* to_string(RunOutcome::Kind k);

enum class Party { Alice, Bob };

enum class EventType { BobConfigured, PhotonSent, Detection, AnnouncementDue, TauAnnounced, Concluded };

const char* to_string(EventType e);

struct Event {
  EventType type;
  Tick t = 0.0;
  std::optional<Detector> detector{};
  std::optional<int> slot{};
  std::optional<int> tau_a{};
  std::optional<int> tau_b{};
  std::optional<double> theta_a{};
  std::optional<double> theta_b{};
  std::optional<std::string> outcome{};
  std::optional<std::string> reason{};
  std::optional<int> b_prime{};

  /// Party whose action produced the event.
  Party actor() const;
  /// Sender of the message the event carries, if it carries one.
  std::optional<Party> message_from() const;

  bool operator==(const Event&) const = default;
};

/// Ordered record of one protocol run.
class Transcript {
 public:
  /// Appends an event; throws std::logic_error on ordering violations
  /// (time going backwards, or TauAnnounced before AnnouncementDue).
  void append(Event e);

  const std::vector<Event>& events() const { return events_; }

  std::size_t message_count(Party from) const;

  /// Events Alice took part in or received.
  std::vector<Event> alice_view() const;

  const Event* find(EventType type) const;
  bool complete() const;

  /// Outcome recorded by the final Concluded event.
  RunOutcome outcome() const;
  AliceParams alice_params() const;
  std::optional<BobParams> bob_params() const;
  std::optional<DetectionEvent> detection() const;

  /// True when the detection event precedes TauAnnounced.
  bool detection_precedes_announcement() const;

  /// JSON Lines, one event per line.
  void write_jsonl(std::ostream& os) const;
  static Transcript read_jsonl(std::istream& is);

 private:
  std::vector<Event> events_;
};

/// Step-function memory: perfect until the deadline, then fully erased.
class QuantumMemory {
 public:
  QuantumMemory(TimeBinState stored, Tick deadline) : stored_(std::move(stored)), deadline_(deadline) {}

  Tick deadline() const { return deadline_; }
  /// nullopt once the deadline has passed (maximally mixed, no information left).
  std::optional<TimeBinState> retrieve(Tick now) const;

 private:
  TimeBinState stored_;
  Tick deadline_;
};

/// Random delay and emission slot for bit b; Restricted draws t_s from
/// [1, n-delta], Full draws (tau_A, t_s) uniformly over the 2n-delta
/// pairs of the analysed mixture.
AliceParams draw_alice_params(std::mt19937_64& rng, int b, const ProtocolGeometry& g,
                              SlotWindow window = SlotWindow::Restricted);

/// Photon as it leaves the sender's interferometer arm.
TimeBinState alice_state(const ProtocolGeometry& g, const AliceParams& params);

struct Prepared {
  AliceParams params;
  TimeBinState state;
};

Prepared alice_prepare(std::mt19937_64& rng, int b, const ProtocolGeometry& g,
                       SlotWindow window = SlotWindow::Restricted);

BobParams draw_bob_params(std::mt19937_64& rng, const ProtocolGeometry& g);

struct Reception {
  DetectionEvent event;
  /// The receiver's delay pushed amplitude past t2; the window was extended.
  bool outside_window = false;
};

/// Receiver optics plus detectors, with channel noise.
///
/// Loss yields NoClick. Otherwise a dark count on top of the photon yields
/// MultiClick. Two uniforms are always consumed for the noise draws so the
/// stream position does not depend on the noise parameters.
Reception bob_receive(const TimeBinState& state, const BobParams& params, const NoiseModel& noise,
                      std::mt19937_64& rng);

/// Receiver's decision once tau_A is known.
RunOutcome bob_conclude(const DetectionEvent& event, int tau_a, const BobParams& params);

/// Honest receiver: configure, detect, then conclude. Concluding before a
/// detection is recorded throws std::logic_error.
class Receiver {
 public:
  explicit Receiver(BobParams params) : params_(params) {}

  const BobParams& params() const { return params_; }
  void record_detection(const DetectionEvent& e);
  bool has_detection() const { return detection_.has_value(); }
  RunOutcome conclude(int announced_tau_a) const;

 private:
  BobParams params_;
  std::optional<DetectionEvent> detection_;
};

/// Independent generator streams for one run.
struct RunSeeds {
  std::uint64_t alice;
  std::uint64_t bob;

  static RunSeeds derive(std::uint64_t run_seed);
};

/// Bit that is Bob's concern: did he get b?
bool bob_got_bit(const Transcript& t);

/// Dishonest sender's estimate of bob_got_bit from her own view only.
bool alice_guess_attack(const Transcript& transcript, std::mt19937_64& rng);

/// Negative control: reads the receiver's private events.
bool oracle_guess(const Transcript& transcript);

Transcript run_protocol(std::uint64_t run_seed, int b, const ProtocolGeometry& g,
                        const AdversaryConfig& adversary, const NoiseModel& noise,
                        SlotWindow window = SlotWindow::Restricted);

/// Deterministic variant: sender choices fixed by `alice`.
Transcript run_protocol_with(const AliceParams& alice, std::uint64_t bob_seed, const ProtocolGeometry& g,
                             const AdversaryConfig& adversary, const NoiseModel& noise);

/// Config document: {"adversary": {...}, "noise": {...}}; missing keys keep defaults.
void from_json(const nlohmann::json& j, AdversaryConfig& a);
void from_json(const nlohmann::json& j, NoiseModel& n);
void to_json(nlohmann::json& j, const AdversaryConfig& a);
void to_json(nlohmann::json& j, const NoiseModel& n);

}  // namespace qot
