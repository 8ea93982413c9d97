#include "qot/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "qot/seeding.hpp"

namespace qot {

namespace {

constexpr double kPi = std::numbers::pi;

int phase_bit_of(double theta) { return std::abs(theta - kPi) < 1e-9 ? 1 : 0; }

const char* detection_kind(const DetectionEvent& e) {
  switch (e.kind) {
    case DetectionEvent::Kind::Click: return "click";
    case DetectionEvent::Kind::NoClick: return "no_click";
    case DetectionEvent::Kind::MultiClick: return "multi_click";
  }
  return "";
}

EventType parse_event_type(const std::string& s) {
  for (auto e : {EventType::BobConfigured, EventType::PhotonSent, EventType::Detection,
                 EventType::AnnouncementDue, EventType::TauAnnounced, EventType::Concluded})
    if (s == to_string(e)) return e;
  throw InvalidInput("unknown transcript event '" + s + "'");
}

Event detection_event(Tick t, const Reception& rec) {
  Event e{.type = EventType::Detection, .t = t};
  e.outcome = detection_kind(rec.event);
  if (rec.event.is_click()) {
    e.detector = rec.event.detector;
    e.slot = rec.event.slot;
  }
  if (rec.outside_window) e.reason = "outside_window";
  return e;
}

Event concluded_event(Tick t, const RunOutcome& o) {
  Event e{.type = EventType::Concluded, .t = t};
  e.outcome = to_string(o.kind);
  e.b_prime = o.bit;
  if (o.kind == RunOutcome::Kind::Abort) e.reason = o.reason;
  return e;
}

Event bob_configured_event(Tick t, const BobParams& p) {
  Event e{.type = EventType::BobConfigured, .t = t};
  e.tau_b = p.tau_b;
  e.theta_b = p.theta_b();
  return e;
}

Event photon_sent_event(const AliceParams& a) {
  Event e{.type = EventType::PhotonSent, .t = static_cast<Tick>(a.t_s)};
  e.slot = a.t_s;
  e.tau_a = a.tau_a;
  e.theta_a = a.theta_a;
  return e;
}

}  // namespace

AliceParams AliceParams::make(const ProtocolGeometry& g, int b, int tau_a, int t_s, SlotWindow window) {
  g.require_protocol_window();
  if (b != 0 && b != 1) throw InvalidInput("secret bit must be 0 or 1");
  if (tau_a != 0 && tau_a != g.delta()) throw InvalidInput("tau_A must be 0 or delta");
  const int last = (window == SlotWindow::Full && tau_a == 0) ? g.n() : g.n() - g.delta();
  if (t_s < 1 || t_s > last)
    throw InvalidInput("emission slot " + std::to_string(t_s) + " outside [1, " + std::to_string(last) + "]");
  return {b, tau_a, b * kPi, t_s};
}

double BobParams::theta_b() const { return phase_bit * kPi; }

void NoiseModel::validate() const {
  if (!(p_loss >= 0.0 && p_loss <= 1.0)) throw InvalidInput("p_loss must lie in [0, 1]");
  if (!(p_dark >= 0.0 && p_dark <= 1.0)) throw InvalidInput("p_dark must lie in [0, 1]");
}

const char* to_string(BobStrategy s) {
  switch (s) {
    case BobStrategy::Honest: return "honest";
    case BobStrategy::StoreAndWait: return "store_and_wait";
    case BobStrategy::ImmediateGuess: return "immediate_guess";
  }
  return "";
}

BobStrategy parse_strategy(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  for (auto s : {BobStrategy::Honest, BobStrategy::StoreAndWait, BobStrategy::ImmediateGuess})
    if (key == to_string(s)) return s;
  throw InvalidInput("unknown receiver strategy '" + name + "'");
}

void AdversaryConfig::validate() const {
  if (!(announce_delay > 0.0)) throw InvalidInput("announce_delay must be > 0");
  if (!(memory_lifetime >= 0.0)) throw InvalidInput("memory_lifetime must be >= 0");
}

const char* to_string(RunOutcome::Kind k) {
  switch (k) {
    case RunOutcome::Kind::Conclusive: return "conclusive";
    case RunOutcome::Kind::Inconclusive: return "inconclusive";
    case RunOutcome::Kind::Abort: return "abort";
  }
  return "";
}

const char* to_string(EventType e) {
  switch (e) {
    case EventType::BobConfigured: return "bob_configured";
    case EventType::PhotonSent: return "photon_sent";
    case EventType::Detection: return "detection";
    case EventType::AnnouncementDue: return "announcement_due";
    case EventType::TauAnnounced: return "tau_announced";
    case EventType::Concluded: return "concluded";
  }
  return "";
}

Party Event::actor() const {
  switch (type) {
    case EventType::PhotonSent:
    case EventType::AnnouncementDue:
    case EventType::TauAnnounced: return Party::Alice;
    default: return Party::Bob;
  }
}

std::optional<Party> Event::message_from() const {
  if (type == EventType::PhotonSent || type == EventType::TauAnnounced) return Party::Alice;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Transcript

void Transcript::append(Event e) {
  if (!events_.empty()) {
    if (events_.back().type == EventType::Concluded)
      throw std::logic_error("transcript already concluded");
    if (e.t < events_.back().t) throw std::logic_error("transcript events must be time-ordered");
  }
  if (e.type == EventType::TauAnnounced && find(EventType::AnnouncementDue) == nullptr)
    throw std::logic_error("tau_A announced before the announcement time t2 + T");
  events_.push_back(std::move(e));
}

std::size_t Transcript::message_count(Party from) const {
  return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const Event& e) {
    return e.message_from() == from;
  }));
}

std::vector<Event> Transcript::alice_view() const {
  std::vector<Event> view;
  for (const auto& e : events_)
    if (e.actor() == Party::Alice || e.message_from() == Party::Bob) view.push_back(e);
  return view;
}

const Event* Transcript::find(EventType type) const {
  auto it = std::find_if(events_.begin(), events_.end(), [&](const Event& e) { return e.type == type; });
  return it == events_.end() ? nullptr : &*it;
}

bool Transcript::complete() const { return !events_.empty() && events_.back().type == EventType::Concluded; }

RunOutcome Transcript::outcome() const {
  const Event* e = find(EventType::Concluded);
  if (e == nullptr || !e->outcome) throw std::logic_error("transcript has no conclusion");
  if (*e->outcome == "conclusive") return RunOutcome::conclusive(e->b_prime.value());
  if (*e->outcome == "inconclusive") return RunOutcome::inconclusive(e->b_prime);
  return RunOutcome::abort(e->reason.value_or(""));
}

AliceParams Transcript::alice_params() const {
  const Event* e = find(EventType::PhotonSent);
  if (e == nullptr) throw std::logic_error("transcript has no photon_sent event");
  const double theta = e->theta_a.value_or(0.0);
  return {phase_bit_of(theta), e->tau_a.value_or(0), theta, e->slot.value_or(0)};
}

std::optional<BobParams> Transcript::bob_params() const {
  const Event* e = find(EventType::BobConfigured);
  if (e == nullptr) return std::nullopt;
  return BobParams{e->tau_b.value_or(0), phase_bit_of(e->theta_b.value_or(0.0))};
}

std::optional<DetectionEvent> Transcript::detection() const {
  const Event* e = find(EventType::Detection);
  if (e == nullptr) return std::nullopt;
  const std::string kind = e->outcome.value_or("");
  if (kind == "click") return DetectionEvent::click(e->detector.value(), e->slot.value());
  if (kind == "multi_click") return DetectionEvent::multi_click();
  return DetectionEvent::no_click();
}

bool Transcript::detection_precedes_announcement() const {
  std::optional<std::size_t> det, ann;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].type == EventType::Detection && !det) det = i;
    if (events_[i].type == EventType::TauAnnounced && !ann) ann = i;
  }
  return det && (!ann || *det < *ann);
}

void Transcript::write_jsonl(std::ostream& os) const {
  for (const auto& e : events_) {
    nlohmann::ordered_json j;
    j["event"] = to_string(e.type);
    j["t"] = e.t;
    if (e.detector) j["detector"] = static_cast<int>(*e.detector);
    if (e.slot) j["slot"] = *e.slot;
    if (e.tau_a) j["tau_a"] = *e.tau_a;
    if (e.tau_b) j["tau_b"] = *e.tau_b;
    if (e.theta_a) j["theta_a"] = *e.theta_a;
    if (e.theta_b) j["theta_b"] = *e.theta_b;
    if (e.outcome) j["outcome"] = *e.outcome;
    if (e.reason) j["reason"] = *e.reason;
    if (e.b_prime) j["b_prime"] = *e.b_prime;
    os << j.dump() << '\n';
  }
}

Transcript Transcript::read_jsonl(std::istream& is) {
  Transcript t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Event e{.type = parse_event_type(j.at("event").get<std::string>()), .t = j.at("t").get<double>()};
    if (j.contains("detector")) e.detector = j["detector"].get<int>() == 0 ? Detector::D0 : Detector::D1;
    if (j.contains("slot")) e.slot = j["slot"].get<int>();
    if (j.contains("tau_a")) e.tau_a = j["tau_a"].get<int>();
    if (j.contains("tau_b")) e.tau_b = j["tau_b"].get<int>();
    if (j.contains("theta_a")) e.theta_a = j["theta_a"].get<double>();
    if (j.contains("theta_b")) e.theta_b = j["theta_b"].get<double>();
    if (j.contains("outcome")) e.outcome = j["outcome"].get<std::string>();
    if (j.contains("reason")) e.reason = j["reason"].get<std::string>();
    if (j.contains("b_prime")) e.b_prime = j["b_prime"].get<int>();
    t.append(std::move(e));
  }
  return t;
}

std::optional<TimeBinState> QuantumMemory::retrieve(Tick now) const {
  if (now > deadline_) return std::nullopt;
  return stored_;
}

// ---------------------------------------------------------------------------
// Sender

AliceParams draw_alice_params(std::mt19937_64& rng, int b, const ProtocolGeometry& g, SlotWindow window) {
  g.require_protocol_window();
  const int n = g.n();
  const int delta = g.delta();
  if (window == SlotWindow::Restricted) {
    const int tau_a = std::bernoulli_distribution(0.5)(rng) ? delta : 0;
    const int t_s = std::uniform_int_distribution<int>(1, n - delta)(rng);
    return AliceParams::make(g, b, tau_a, t_s, window);
  }
  const int k = std::uniform_int_distribution<int>(0, 2 * n - delta - 1)(rng);
  return k < n ? AliceParams::make(g, b, 0, k + 1, window)
               : AliceParams::make(g, b, delta, k - n + 1, window);
}

TimeBinState alice_state(const ProtocolGeometry& g, const AliceParams& params) {
  auto state = make_source_state(g, params.t_s);
  state = apply_delay(state, Path::A, params.tau_a);
  return apply_phase(state, Path::A, params.theta_a);
}

Prepared alice_prepare(std::mt19937_64& rng, int b, const ProtocolGeometry& g, SlotWindow window) {
  auto params = draw_alice_params(rng, b, g, window);
  return {params, alice_state(g, params)};
}

// ---------------------------------------------------------------------------
// Receiver

BobParams draw_bob_params(std::mt19937_64& rng, const ProtocolGeometry& g) {
  std::bernoulli_distribution coin(0.5);
  const int tau_b = coin(rng) ? g.delta() : 0;
  const int phase = coin(rng) ? 1 : 0;
  return {tau_b, phase};
}

Reception bob_receive(const TimeBinState& state, const BobParams& params, const NoiseModel& noise,
                      std::mt19937_64& rng) {
  noise.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u_loss = unit(rng);
  const double u_dark = unit(rng);
  if (u_loss < noise.p_loss) return {DetectionEvent::no_click(), false};

  const int n = state.geometry().n();
  TimeBinState local = state;
  if (params.tau_b > 0) {
    bool overflow = false;
    for (int s = std::max(1, n - params.tau_b + 1); s <= n; ++s)
      overflow = overflow || local.amplitude(Path::B, s) != Complex{};
    // A photon already in flight cannot be refused; extend the bookkeeping window.
    if (overflow) local = local.extended(params.tau_b);
  }
  local = apply_delay(local, Path::B, params.tau_b);
  local = apply_phase(local, Path::B, params.theta_b());

  const DetectionEvent click = measure_detectors(local, rng);
  if (u_dark < noise.p_dark) return {DetectionEvent::multi_click(), false};
  return {click, click.slot > n};
}

RunOutcome bob_conclude(const DetectionEvent& event, int tau_a, const BobParams& params) {
  switch (event.kind) {
    case DetectionEvent::Kind::NoClick: return RunOutcome::abort("no_click");
    case DetectionEvent::Kind::MultiClick: return RunOutcome::abort("multiple_clicks");
    case DetectionEvent::Kind::Click: break;
  }
  if (tau_a != params.tau_b) return RunOutcome::inconclusive();
  return RunOutcome::conclusive(static_cast<int>(event.detector) ^ params.phase_bit);
}

void Receiver::record_detection(const DetectionEvent& e) {
  if (detection_) throw std::logic_error("receiver already recorded a detection");
  detection_ = e;
}

RunOutcome Receiver::conclude(int announced_tau_a) const {
  if (!detection_) throw std::logic_error("receiver cannot conclude before a detection is recorded");
  return bob_conclude(*detection_, announced_tau_a, params_);
}

RunSeeds RunSeeds::derive(std::uint64_t run_seed) {
  return {splitmix64(run_seed ^ 0xa11ce0000000a11cULL), splitmix64(run_seed ^ 0x0000b0b00000b0b0ULL)};
}

// ---------------------------------------------------------------------------
// Guessing

bool bob_got_bit(const Transcript& t) { return t.outcome().kind == RunOutcome::Kind::Conclusive; }

bool alice_guess_attack(const Transcript& transcript, std::mt19937_64& rng) {
  // Her view carries no receiver-originated message, so a fair coin is optimal.
  const auto view = transcript.alice_view();
  const bool heard_from_bob = std::any_of(view.begin(), view.end(), [](const Event& e) {
    return e.message_from() == Party::Bob;
  });
  if (heard_from_bob) throw std::logic_error("receiver sent a message to the sender");
  return std::bernoulli_distribution(0.5)(rng);
}

bool oracle_guess(const Transcript& transcript) {
  const auto bob = transcript.bob_params();
  const auto det = transcript.detection();
  if (!bob || !det || !det->is_click()) return false;
  return bob->tau_b == transcript.alice_params().tau_a;
}

// ---------------------------------------------------------------------------
// Full run

Transcript run_protocol_with(const AliceParams& alice, std::uint64_t bob_seed, const ProtocolGeometry& g,
                             const AdversaryConfig& adversary, const NoiseModel& noise) {
  g.require_protocol_window();
  adversary.validate();
  noise.validate();

  std::mt19937_64 bob_rng(bob_seed);
  const Tick t2 = g.n();
  const TimeBinState photon = alice_state(g, alice);
  Transcript tr;

  auto announce = [&](Tick at) {
    Event due{.type = EventType::AnnouncementDue, .t = at};
    tr.append(due);
    Event tau{.type = EventType::TauAnnounced, .t = at};
    tau.tau_a = alice.tau_a;
    tr.append(tau);
  };

  if (adversary.bob_strategy == BobStrategy::StoreAndWait) {
    tr.append(photon_sent_event(alice));
    const QuantumMemory memory(photon, t2 + adversary.memory_lifetime);
    const Tick announce_at = t2 + adversary.announce_delay;

    if (auto stored = memory.retrieve(announce_at)) {
      // Memory outlives the announcement: match tau_A and measure.
      announce(announce_at);
      const BobParams bp{alice.tau_a, std::bernoulli_distribution(0.5)(bob_rng) ? 1 : 0};
      tr.append(bob_configured_event(announce_at, bp));
      const auto rec = bob_receive(*stored, bp, noise, bob_rng);
      tr.append(detection_event(announce_at, rec));
      tr.append(concluded_event(announce_at, bob_conclude(rec.event, alice.tau_a, bp)));
      return tr;
    }

    // Measure at the last instant the memory still holds the photon.
    const Tick measure_at = memory.deadline();
    const BobParams bp = draw_bob_params(bob_rng, g);
    tr.append(bob_configured_event(measure_at, bp));
    const auto rec = bob_receive(*memory.retrieve(measure_at), bp, noise, bob_rng);
    tr.append(detection_event(measure_at, rec));
    announce(announce_at);
    tr.append(concluded_event(announce_at, bob_conclude(rec.event, alice.tau_a, bp)));
    return tr;
  }

  const BobParams bp = draw_bob_params(bob_rng, g);
  Receiver receiver(bp);
  tr.append(bob_configured_event(0.0, bp));
  tr.append(photon_sent_event(alice));

  const auto rec = bob_receive(photon, bp, noise, bob_rng);
  receiver.record_detection(rec.event);
  const Tick detected_at = rec.event.is_click() ? static_cast<Tick>(rec.event.slot) : t2;
  tr.append(detection_event(detected_at, rec));

  // A click pushed past t2 by the receiver's delay still precedes the announcement.
  const Tick announce_at = std::max(t2 + adversary.announce_delay, detected_at);
  announce(announce_at);

  RunOutcome outcome = receiver.conclude(alice.tau_a);
  if (adversary.bob_strategy == BobStrategy::ImmediateGuess &&
      outcome.kind == RunOutcome::Kind::Inconclusive && rec.event.is_click())
    outcome = RunOutcome::inconclusive(static_cast<int>(rec.event.detector) ^ bp.phase_bit);
  tr.append(concluded_event(announce_at, outcome));
  return tr;
}

Transcript run_protocol(std::uint64_t run_seed, int b, const ProtocolGeometry& g,
                        const AdversaryConfig& adversary, const NoiseModel& noise, SlotWindow window) {
  const auto seeds = RunSeeds::derive(run_seed);
  std::mt19937_64 alice_rng(seeds.alice);
  const auto alice = draw_alice_params(alice_rng, b, g, window);
  return run_protocol_with(alice, seeds.bob, g, adversary, noise);
}

// ---------------------------------------------------------------------------
// Config documents

void from_json(const nlohmann::json& j, AdversaryConfig& a) {
  if (j.contains("bob_strategy")) a.bob_strategy = parse_strategy(j["bob_strategy"].get<std::string>());
  if (j.contains("memory_lifetime")) a.memory_lifetime = j["memory_lifetime"].get<double>();
  if (j.contains("announce_delay")) a.announce_delay = j["announce_delay"].get<double>();
  a.validate();
}

void from_json(const nlohmann::json& j, NoiseModel& n) {
  if (j.contains("p_loss")) n.p_loss = j["p_loss"].get<double>();
  if (j.contains("p_dark")) n.p_dark = j["p_dark"].get<double>();
  n.validate();
}

void to_json(nlohmann::json& j, const AdversaryConfig& a) {
  j = nlohmann::json{{"bob_strategy", to_string(a.bob_strategy)},
                     {"memory_lifetime", a.memory_lifetime},
                     {"announce_delay", a.announce_delay}};
}

void to_json(nlohmann::json& j, const NoiseModel& n) {
  j = nlohmann::json{{"p_loss", n.p_loss}, {"p_dark", n.p_dark}};
}

}  // namespace qot
