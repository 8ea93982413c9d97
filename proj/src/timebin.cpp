#include "qot/timebin.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace qot {

namespace {

constexpr double kProbabilityFloor = 1e-15;

}  // namespace

ProtocolGeometry::ProtocolGeometry(int n, int delta) : n_(n), delta_(delta) {
  if (n < 1) throw InvalidInput("slot count n must be >= 1, got " + std::to_string(n));
  if (delta < 1 || delta > n)
    throw InvalidInput("delay delta must lie in [1, n], got " + std::to_string(delta));
}

void ProtocolGeometry::require_protocol_window() const {
  if (delta_ >= n_)
    throw InvalidInput("protocol needs delta < n (t_s range [1, n-delta] is empty for n=" +
                       std::to_string(n_) + ", delta=" + std::to_string(delta_) + ")");
}

const char* to_string(Path p) { return p == Path::A ? "A" : "B"; }

std::size_t ModeIndex::basis_index(const ProtocolGeometry& g) const {
  if (slot < 1 || slot > g.n())
    throw InvalidInput("slot " + std::to_string(slot) + " outside [1, " + std::to_string(g.n()) + "]");
  const auto base = static_cast<std::size_t>(slot - 1);
  return path == Path::A ? base : base + static_cast<std::size_t>(g.n());
}

ModeIndex ModeIndex::from_basis_index(const ProtocolGeometry& g, std::size_t idx) {
  const auto n = static_cast<std::size_t>(g.n());
  if (idx >= 2 * n) throw InvalidInput("basis index out of range");
  if (idx < n) return {Path::A, static_cast<int>(idx) + 1};
  return {Path::B, static_cast<int>(idx - n) + 1};
}

TimeBinState::TimeBinState(ProtocolGeometry g)
    : geometry_(g), amps_(static_cast<std::size_t>(g.dimension())) {}

TimeBinState::TimeBinState(ProtocolGeometry g, std::vector<Complex> amplitudes)
    : geometry_(g), amps_(std::move(amplitudes)) {
  if (amps_.size() != static_cast<std::size_t>(g.dimension()))
    throw InvalidInput("amplitude vector length " + std::to_string(amps_.size()) +
                       " does not match 2n = " + std::to_string(g.dimension()));
}

Complex TimeBinState::amplitude(Path p, int slot) const {
  return amps_[ModeIndex{p, slot}.basis_index(geometry_)];
}

void TimeBinState::set(Path p, int slot, Complex value) {
  amps_[ModeIndex{p, slot}.basis_index(geometry_)] = value;
}

double TimeBinState::norm_squared() const {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return acc;
}

bool TimeBinState::is_normalized(double tol) const {
  return std::abs(norm_squared() - 1.0) <= tol;
}

TimeBinState TimeBinState::extended(int extra) const {
  if (extra < 0) throw InvalidInput("window extension must be non-negative");
  const int n = geometry_.n();
  TimeBinState out(ProtocolGeometry(n + extra, geometry_.delta()));
  for (int s = 1; s <= n; ++s) {
    out.set(Path::A, s, amplitude(Path::A, s));
    out.set(Path::B, s, amplitude(Path::B, s));
  }
  out.lossy_ = lossy_;
  return out;
}

void TimeBinState::write_csv(std::ostream& os) const {
  os << "path,slot,re,im\n";
  const auto prec = os.precision(17);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (amps_[i] == Complex{}) continue;
    const auto mode = ModeIndex::from_basis_index(geometry_, i);
    os << to_string(mode.path) << ',' << mode.slot << ',' << amps_[i].real() << ','
       << amps_[i].imag() << '\n';
  }
  os.precision(prec);
}

TimeBinState make_source_state(const ProtocolGeometry& g, int t_s) {
  if (t_s < 1 || t_s > g.n())
    throw InvalidInput("emission slot t_s=" + std::to_string(t_s) + " outside [1, " +
                       std::to_string(g.n()) + "]");
  TimeBinState state(g);
  const double amp = 1.0 / std::numbers::sqrt2;
  state.set(Path::A, t_s, amp);
  state.set(Path::B, t_s, amp);
  return state;
}

TimeBinState apply_delay(const TimeBinState& state, Path path, int tau) {
  if (tau < 0) throw InvalidInput("delay must be non-negative");
  if (tau == 0) return state;
  const auto& g = state.geometry();
  const int n = g.n();
  for (int s = n - tau + 1; s <= n; ++s) {
    if (s >= 1 && state.amplitude(path, s) != Complex{})
      throw WindowOverflow("delay of " + std::to_string(tau) + " slots on path " + to_string(path) +
                           " moves slot " + std::to_string(s) + " past n=" + std::to_string(n));
  }
  TimeBinState out = state;
  for (int s = n; s >= 1; --s) {
    const Complex moved = s - tau >= 1 ? state.amplitude(path, s - tau) : Complex{};
    out.set(path, s, moved);
  }
  return out;
}

TimeBinState apply_phase(const TimeBinState& state, Path path, double theta) {
  const Complex factor{std::cos(theta), std::sin(theta)};
  TimeBinState out = state;
  for (int s = 1; s <= state.geometry().n(); ++s) out.set(path, s, state.amplitude(path, s) * factor);
  return out;
}

std::vector<Outcome> outcome_distribution(const TimeBinState& state) {
  if (!state.is_normalized())
    throw InvalidInput("outcome_distribution needs a normalized state, |psi|^2 = " +
                       std::to_string(state.norm_squared()));
  std::vector<Outcome> out;
  for (int t = 1; t <= state.geometry().n(); ++t) {
    const Complex a = state.amplitude(Path::A, t);
    const Complex b = state.amplitude(Path::B, t);
    const double p0 = 0.5 * std::norm(a + b);
    const double p1 = 0.5 * std::norm(a - b);
    if (p0 > kProbabilityFloor) out.push_back({Detector::D0, t, p0});
    if (p1 > kProbabilityFloor) out.push_back({Detector::D1, t, p1});
  }
  return out;
}

DetectionEvent measure_detectors(const TimeBinState& state, std::mt19937_64& rng) {
  const auto dist = outcome_distribution(state);
  double total = 0.0;
  for (const auto& o : dist) total += o.probability;
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (const auto& o : dist) {
    acc += o.probability;
    if (u < acc) return DetectionEvent::click(o.detector, o.slot);
  }
  // u landed on the rounding sliver at the top of the cumulative sum.
  return DetectionEvent::click(dist.back().detector, dist.back().slot);
}

}  // namespace qot
