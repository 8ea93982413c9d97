#include "qot/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "qot/seeding.hpp"

namespace qot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

// Entropy in nats with the Miller-Madow (occupied bins - 1) / 2N correction.
template <class Key>
double corrected_entropy(const std::map<Key, std::int64_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h + static_cast<double>(counts.size() - 1) / (2.0 * total);
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  geometry.require_protocol_window();
  adversary.validate();
  noise.validate();
  if (b_policy.kind == BitPolicy::Kind::Fixed && b_policy.bit != 0 && b_policy.bit != 1)
    throw InvalidInput("fixed secret bit must be 0 or 1");
}

TrialRecord run_trial(const ExperimentSpec& spec, std::int64_t index) {
  const std::uint64_t run_seed = trial_seed(spec.seed, static_cast<std::uint64_t>(index));
  int b = spec.b_policy.bit;
  if (spec.b_policy.kind == BitPolicy::Kind::UniformRandom) {
    std::mt19937_64 bit_rng(splitmix64(run_seed ^ 0xb17b17b17b17b17bULL));
    b = std::bernoulli_distribution(0.5)(bit_rng) ? 1 : 0;
  }

  const Transcript tr = run_protocol(run_seed, b, spec.geometry, spec.adversary, spec.noise, spec.window);

  TrialRecord rec;
  const AliceParams alice = tr.alice_params();
  rec.b = b;
  rec.tau_a = alice.tau_a;
  rec.theta_a_bit = alice.b;
  rec.t_s = alice.t_s;
  if (auto bob = tr.bob_params()) {
    rec.tau_b = bob->tau_b;
    rec.theta_b_bit = bob->phase_bit;
  }
  rec.detection = tr.detection().value_or(DetectionEvent::no_click());
  rec.outcome = tr.outcome();

  std::mt19937_64 guess_rng(splitmix64(run_seed ^ 0x6e55e55e55e55e55ULL));
  rec.alice_guess = alice_guess_attack(tr, guess_rng);
  rec.bob_to_alice_messages = tr.message_count(Party::Bob);
  return rec;
}

ExperimentStats reduce_trials(std::span<const TrialRecord> records) {
  ExperimentStats s;
  s.trials = static_cast<std::int64_t>(records.size());

  std::int64_t correct_conclusive = 0;
  std::int64_t guesses = 0;
  std::int64_t correct_guesses = 0;
  std::int64_t alice_correct = 0;
  std::vector<std::pair<int, int>> mismatch_detector;
  std::vector<std::pair<int, int>> mismatch_joint;

  for (const auto& r : records) {
    s.bob_to_alice_messages += static_cast<std::int64_t>(r.bob_to_alice_messages);
    const bool got_bit = r.outcome.kind == RunOutcome::Kind::Conclusive;
    if (r.alice_guess == got_bit) ++alice_correct;

    switch (r.outcome.kind) {
      case RunOutcome::Kind::Abort: ++s.aborted; break;
      case RunOutcome::Kind::Conclusive:
        ++s.conclusive;
        if (r.outcome.bit == r.b) ++correct_conclusive;
        else ++s.wrong_conclusive;
        break;
      case RunOutcome::Kind::Inconclusive:
        ++s.inconclusive;
        if (r.outcome.bit) {
          ++guesses;
          if (*r.outcome.bit == r.b) ++correct_guesses;
        }
        break;
    }

    if (!r.detection.is_click()) continue;
    const int detector = static_cast<int>(r.detection.detector);
    if (r.tau_a == r.tau_b) {
      ++s.match_clicks;
      if (detector != (r.theta_a_bit ^ r.theta_b_bit)) ++s.match_detector_violations;
    } else {
      mismatch_detector.emplace_back(detector, r.b);
      mismatch_joint.emplace_back(detector + 2 * (r.detection.slot - r.t_s), r.b);
    }
  }

  const std::int64_t kept = s.trials - s.aborted;
  s.abort_rate = ratio(s.aborted, s.trials);
  s.p_conclusive = ratio(s.conclusive, kept);
  s.p_conclusive_band =
      kept == 0 ? kNaN : 3.0 * std::sqrt(s.p_conclusive * (1.0 - s.p_conclusive) / static_cast<double>(kept));
  s.reliability_conclusive = ratio(correct_conclusive, s.conclusive);
  s.avg_reliability = kept == 0 ? kNaN
                                : (static_cast<double>(correct_conclusive) + 0.5 * static_cast<double>(s.inconclusive)) /
                                      static_cast<double>(kept);
  s.guess_reliability = ratio(correct_guesses, guesses);
  s.u_hat = s.p_conclusive - 0.5;
  s.v_hat = ratio(alice_correct, s.trials) - 0.5;
  s.mismatch_mi_bits = mismatch_detector.size() >= 1000 ? mutual_information_bits(mismatch_detector) : kNaN;
  s.mismatch_joint_mi_bits = mismatch_joint.size() >= 1000 ? mutual_information_bits(mismatch_joint) : kNaN;
  return s;
}

ExperimentStats run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TrialRecord> records(static_cast<std::size_t>(spec.trials));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < spec.trials; ++i) records[static_cast<std::size_t>(i)] = run_trial(spec, i);
  return reduce_trials(records);
}

ExperimentStats run_experiment_serial(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(spec.trials));
  for (std::int64_t i = 0; i < spec.trials; ++i) records.push_back(run_trial(spec, i));
  return reduce_trials(records);
}

double mutual_information_bits(std::span<const std::pair<int, int>> samples) {
  if (samples.size() < 1000)
    throw InvalidInput("mutual information estimate needs >= 1000 samples, got " +
                       std::to_string(samples.size()));
  std::map<int, std::int64_t> xs, ys;
  std::map<std::pair<int, int>, std::int64_t> joint;
  for (const auto& [x, y] : samples) {
    ++xs[x];
    ++ys[y];
    ++joint[{x, y}];
  }
  const double total = static_cast<double>(samples.size());
  const double nats = corrected_entropy(xs, total) + corrected_entropy(ys, total) - corrected_entropy(joint, total);
  return std::max(0.0, nats / std::log(2.0));
}

std::vector<NoisePoint> noise_sensitivity(const ExperimentSpec& base, std::span<const double> p_loss,
                                          std::span<const double> p_dark) {
  if (p_loss.empty() || p_dark.empty()) throw InvalidInput("noise grid must be non-empty");
  std::vector<NoisePoint> grid;
  for (double loss : p_loss) {
    for (double dark : p_dark) {
      ExperimentSpec spec = base;
      spec.noise = {loss, dark};
      grid.push_back({loss, dark, run_experiment(spec)});
    }
  }
  return grid;
}

void write_json(std::ostream& os, const ExperimentStats& s) {
  nlohmann::ordered_json j;
  j["trials"] = s.trials;
  j["p_conclusive"] = number_or_null(s.p_conclusive);
  j["p_conclusive_band"] = number_or_null(s.p_conclusive_band);
  j["reliability_conclusive"] = number_or_null(s.reliability_conclusive);
  j["avg_reliability"] = number_or_null(s.avg_reliability);
  j["guess_reliability"] = number_or_null(s.guess_reliability);
  j["v_hat"] = number_or_null(s.v_hat);
  j["u_hat"] = number_or_null(s.u_hat);
  j["abort_rate"] = number_or_null(s.abort_rate);
  j["mismatch_mi_bits"] = number_or_null(s.mismatch_mi_bits);
  j["mismatch_joint_mi_bits"] = number_or_null(s.mismatch_joint_mi_bits);
  j["counts"] = {{"aborted", s.aborted},
                 {"conclusive", s.conclusive},
                 {"inconclusive", s.inconclusive},
                 {"wrong_conclusive", s.wrong_conclusive},
                 {"match_clicks", s.match_clicks},
                 {"match_detector_violations", s.match_detector_violations},
                 {"bob_to_alice_messages", s.bob_to_alice_messages}};
  os << j.dump(2) << '\n';
}

void write_csv(std::ostream& os, std::span<const NoisePoint> grid) {
  os << "p_loss,p_dark,abort_rate,p_conclusive,avg_reliability\n";
  const auto prec = os.precision(17);
  for (const auto& g : grid)
    os << g.p_loss << ',' << g.p_dark << ',' << g.stats.abort_rate << ',' << g.stats.p_conclusive << ','
       << g.stats.avg_reliability << '\n';
  os.precision(prec);
}

double two_proportion_z(double p1, std::int64_t n1, double p2, std::int64_t n2) {
  if (n1 < 1 || n2 < 1) throw InvalidInput("two-proportion test needs non-empty samples");
  const double pooled = (p1 * static_cast<double>(n1) + p2 * static_cast<double>(n2)) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return p1 == p2 ? 0.0 : std::numeric_limits<double>::infinity();
  return (p1 - p2) / se;
}

}  // namespace qot
