#include "qot/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "qot/discrimination.hpp"
#include "qot/montecarlo.hpp"
#include "qot/protocol.hpp"

namespace qot::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string n_text;
  int delta = 1;
  std::string b = "0";
  std::optional<std::uint64_t> seed;
  std::int64_t trials = 100000;
  std::string adversary = "honest";
  std::string lifetime;
  double announce_delay = 100.0;
  std::string p_loss = "0";
  std::string p_dark = "0";
  std::string format;
  std::string out;
  std::string window;
  std::string config;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

int to_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw UsageError("not an integer: '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw UsageError("not a number: '" + s + "'");
  }
}

SlotWindow parse_window(const std::string& s, SlotWindow fallback) {
  if (s.empty()) return fallback;
  if (s == "full") return SlotWindow::Full;
  if (s == "restricted") return SlotWindow::Restricted;
  throw UsageError("--window must be 'full' or 'restricted'");
}

std::string require_format(const std::string& given, std::initializer_list<const char*> allowed) {
  if (given.empty()) return *allowed.begin();
  for (const char* a : allowed)
    if (given == a) return given;
  std::string msg = "--format must be one of:";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg);
}

std::uint64_t resolve_seed(const Options& o, const EnvLookup& env) {
  if (o.seed) return *o.seed;
  if (auto v = env("QOT_SEED")) {
    std::uint64_t s = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), s);
    if (ec != std::errc{} || ptr != v->data() + v->size()) throw UsageError("QOT_SEED is not an unsigned integer");
    return s;
  }
  return kDefaultSeed;
}

ProtocolGeometry protocol_geometry(const Options& o) {
  const int n = o.n_text.empty() ? 1000 : to_int(o.n_text);
  if (o.delta < 1) throw UsageError("--delta must be >= 1");
  if (n <= o.delta)
    throw UsageError("need n > delta: the emission range [1, n-delta] is empty for n=" + std::to_string(n) +
                     ", delta=" + std::to_string(o.delta));
  return ProtocolGeometry(n, o.delta);
}

void load_config(const Options& o, AdversaryConfig& adv, NoiseModel& noise) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw UsageError("cannot open config file '" + o.config + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.contains("adversary")) adv = doc["adversary"].get<AdversaryConfig>();
  if (doc.contains("noise")) noise = doc["noise"].get<NoiseModel>();
}

struct ScenarioFlags {
  bool adversary = false;
  bool lifetime = false;
  bool announce_delay = false;
  bool p_loss = false;
  bool p_dark = false;
};

AdversaryConfig build_adversary(const Options& o, const ScenarioFlags& given, AdversaryConfig adv) {
  if (given.announce_delay) adv.announce_delay = o.announce_delay;
  if (given.adversary) adv.bob_strategy = parse_strategy(o.adversary);
  if (given.lifetime) adv.memory_lifetime = parse_lifetime(o.lifetime, adv.announce_delay);
  if (given.lifetime && !given.adversary) adv.bob_strategy = BobStrategy::StoreAndWait;
  adv.validate();
  return adv;
}

template <class Fn>
void emit(const Options& o, std::ostream& out, Fn&& write) {
  if (o.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + o.out + "'");
  write(file);
}

int cmd_run(const Options& o, const ScenarioFlags& given, std::ostream& out, const EnvLookup& env) {
  require_format(o.format, {"jsonl"});
  const auto g = protocol_geometry(o);
  if (o.b != "0" && o.b != "1") throw UsageError("--b must be 0 or 1");
  AdversaryConfig adv;
  NoiseModel noise;
  load_config(o, adv, noise);
  adv = build_adversary(o, given, adv);
  if (given.p_loss) noise.p_loss = to_double(o.p_loss);
  if (given.p_dark) noise.p_dark = to_double(o.p_dark);
  noise.validate();

  const auto tr = run_protocol(resolve_seed(o, env), to_int(o.b), g, adv, noise,
                               parse_window(o.window, SlotWindow::Restricted));
  emit(o, out, [&](std::ostream& os) { tr.write_jsonl(os); });
  return 0;
}

int cmd_montecarlo(const Options& o, const ScenarioFlags& given, std::ostream& out, const EnvLookup& env) {
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  ExperimentSpec spec;
  spec.trials = o.trials;
  spec.seed = resolve_seed(o, env);
  spec.geometry = protocol_geometry(o);
  spec.window = parse_window(o.window, SlotWindow::Restricted);
  if (o.b == "random") spec.b_policy = BitPolicy::uniform();
  else if (o.b == "0" || o.b == "1") spec.b_policy = BitPolicy::fixed(to_int(o.b));
  else throw UsageError("--b must be 0, 1 or random");

  NoiseModel noise;
  load_config(o, spec.adversary, noise);
  spec.adversary = build_adversary(o, given, spec.adversary);

  std::vector<double> losses{noise.p_loss};
  std::vector<double> darks{noise.p_dark};
  if (given.p_loss) losses = parse_double_list(o.p_loss);
  if (given.p_dark) darks = parse_double_list(o.p_dark);
  for (double p : losses) NoiseModel{p, 0.0}.validate();
  for (double p : darks) NoiseModel{0.0, p}.validate();

  const bool grid = losses.size() > 1 || darks.size() > 1;
  const auto format = require_format(o.format, grid ? std::initializer_list<const char*>{"csv"}
                                                    : std::initializer_list<const char*>{"json", "csv"});
  if (format == "csv") {
    const auto points = noise_sensitivity(spec, losses, darks);
    emit(o, out, [&](std::ostream& os) { write_csv(os, points); });
    return 0;
  }
  spec.noise = {losses.front(), darks.front()};
  const auto stats = run_experiment(spec);
  emit(o, out, [&](std::ostream& os) { write_json(os, stats); });
  return 0;
}

int cmd_tracedist(const Options& o, std::ostream& out) {
  require_format(o.format, {"csv"});
  if (o.n_text.empty()) throw UsageError("--n is required");
  const auto ns = parse_int_list(o.n_text);
  const auto window = parse_window(o.window, SlotWindow::Full);
  for (int n : ns) {
    if (n < o.delta || (window == SlotWindow::Restricted && n == o.delta))
      throw UsageError("n=" + std::to_string(n) + " is too small for delta=" + std::to_string(o.delta));
  }
  const auto curve = sweep_trace_distance(ns, o.delta, window);
  emit(o, out, [&](std::ostream& os) { write_csv(os, curve); });
  return 0;
}

int cmd_helstrom(const Options& o, std::ostream& out) {
  require_format(o.format, {"json"});
  if (o.n_text.empty()) throw UsageError("--n is required");
  const int n = to_int(o.n_text);
  const auto window = parse_window(o.window, SlotWindow::Full);
  if (o.delta < 1 || n < o.delta || (window == SlotWindow::Restricted && n == o.delta))
    throw UsageError("need n >= delta >= 1 (n > delta for the restricted window)");
  const ProtocolGeometry g(n, o.delta);
  const auto report = HelstromReport::from_distance(n, o.delta, trace_distance_structured(g, window));
  emit(o, out, [&](std::ostream& os) { write_json(os, report); });
  return 0;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      values.push_back(to_int(part));
      continue;
    }
    const int lo = to_int(part.substr(0, dots));
    const int hi = to_int(part.substr(dots + 2));
    if (hi < lo) throw UsageError("empty range '" + part + "'");
    for (int v = lo; v <= hi; ++v) values.push_back(v);
  }
  if (values.empty()) throw UsageError("empty list");
  return values;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) values.push_back(to_double(part));
  if (values.empty()) throw UsageError("empty list");
  return values;
}

double parse_lifetime(const std::string& text, double announce_delay) {
  if (!text.empty() && (text.back() == 'T' || text.back() == 't')) {
    const std::string factor = text.substr(0, text.size() - 1);
    return (factor.empty() ? 1.0 : to_double(factor)) * announce_delay;
  }
  return to_double(text);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Single-photon time-bin oblivious transfer: simulator and security analyzer", "qot"};
  app.require_subcommand(1);

  Options o;
  ScenarioFlags given;

  auto* run_cmd = app.add_subcommand("run", "Run the protocol once and write its transcript as JSON Lines");
  auto* mc_cmd = app.add_subcommand("montecarlo", "Repeat seeded runs and report statistics");
  auto* td_cmd = app.add_subcommand("tracedist", "Trace distance D(n) as CSV");
  auto* hs_cmd = app.add_subcommand("helstrom", "Helstrom cheating bounds as JSON");

  for (auto* sub : {run_cmd, mc_cmd, td_cmd, hs_cmd}) {
    sub->add_option("--n", o.n_text, sub == td_cmd ? "Slot counts, e.g. 1,2,5 or 1..1000" : "Slot count n");
    sub->add_option("--delta", o.delta, "Delay offset in slots")->capture_default_str();
    sub->add_option("--format", o.format, "Output format");
    sub->add_option("--out", o.out, "Output file (default stdout)");
    sub->add_option("--window", o.window, "Emission-slot convention: full or restricted");
  }
  for (auto* sub : {run_cmd, mc_cmd}) {
    sub->add_option("--b", o.b, sub == mc_cmd ? "Secret bit: 0, 1 or random" : "Secret bit")
        ->default_str(sub == mc_cmd ? "random" : "0");
    sub->add_option("--seed", o.seed, "RNG seed (else $QOT_SEED, else 12345)");
    sub->add_option("--adversary", o.adversary, "honest | store-and-wait | immediate-guess");
    sub->add_option("--lifetime", o.lifetime, "Receiver memory lifetime after t2: ticks or multiple of T (2T)");
    sub->add_option("--announce-delay", o.announce_delay, "T: delay of the tau_A announcement after t2");
    sub->add_option("--p-loss", o.p_loss, "Photon loss probability (comma list for a grid)");
    sub->add_option("--p-dark", o.p_dark, "Extra-click probability (comma list for a grid)");
    sub->add_option("--config", o.config, "JSON document with 'adversary' and 'noise' objects");
  }
  mc_cmd->add_option("--trials", o.trials, "Number of runs")->capture_default_str();
  o.b = "0";

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  if (mc_cmd->parsed() && mc_cmd->count("--b") == 0) o.b = "random";
  auto* active = app.get_subcommands().front();
  auto seen = [active](const std::string& name) {
    const CLI::Option* opt = active->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  given.adversary = seen("--adversary");
  given.lifetime = seen("--lifetime");
  given.announce_delay = seen("--announce-delay");
  given.p_loss = seen("--p-loss");
  given.p_dark = seen("--p-dark");

  try {
    if (run_cmd->parsed()) return cmd_run(o, given, out, env);
    if (mc_cmd->parsed()) return cmd_montecarlo(o, given, out, env);
    if (td_cmd->parsed()) return cmd_tracedist(o, out);
    return cmd_helstrom(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad config document: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qot::cli
