// Command-line front end: check, solve, simulate, stability, diagnose.
// Exit codes: 0 pass, 1 analytic failure, 2 usage or configuration error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tshobam/analysis.hpp"
#include "tshobam/config.hpp"
#include "tshobam/report.hpp"
#include "tshobam/simulate.hpp"

namespace fs = std::filesystem;
using namespace tshobam;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
  bool strict = false;
};

struct DiagnoseOptions {
  std::string channel = "x1";
  double p = 1.0;
  double l = 1.0;
  std::string nu = "1";
  bool bounded_weight = false;
  std::string r_list = "1,2,5,10";
  std::optional<double> t0;
};

// Loaded configuration plus everything every command needs.
struct Session {
  ExperimentConfig cfg;
  TimeScale ts = TimeScale::continuum();
  CoefficientBounds bounds;
  std::uint64_t seed = 1;
  fs::path out;

  NetworkSpec& net() { return cfg.network; }
};

Session open(const Globals& g) {
  Session s;
  s.cfg = load_config(g.config);
  s.ts = g.resolution ? s.cfg.timescale.with_resolution(*g.resolution) : s.cfg.timescale;
  const AnalysisConfig& a = s.cfg.analysis;
  s.bounds = scan_bounds(s.cfg.network, s.ts, a.window_lo, a.window_hi,
                         a.density.value_or(s.ts.resolution()));
  s.cfg.network.delays.theta = s.bounds.theta();
  s.seed = g.seed.value_or(s.cfg.run.seed);
  s.out = g.out;
  fs::create_directories(s.out);
  return s;
}

void save_json(const Session& s, const std::string& name, const json& doc) {
  std::ofstream os(s.out / name);
  write_json(os, doc);
}

template <class F>
void save(const Session& s, const std::string& name, F&& writer) {
  std::ofstream os(s.out / name);
  writer(os);
}

InitialHistory base_history(const Session& s) {
  if (s.cfg.run.initial) return *s.cfg.run.initial;
  return random_history(s.cfg.network.n, s.cfg.network.m, s.seed, s.cfg.run.amplitude);
}

Trajectory run(const Session& s, const InitialHistory& init) {
  const NetworkSpec& net = s.cfg.network;
  const Trajectory start = initial_trajectory(s.ts, init, net.delays.theta);
  return simulate(s.ts, net, start, s.cfg.run.horizon);
}

std::string join(const std::vector<std::string>& notes) {
  std::string out;
  for (const auto& n : notes) out += (out.empty() ? "" : "; ") + n;
  return out;
}

int cmd_check(const Globals& g) {
  Session s = open(g);
  const HypothesisReport rep = check_hypotheses(s.net(), s.ts, s.bounds);
  json doc = {{"manifest", manifest(s.cfg, "check", s.bounds)}, {"report", to_json(rep)}};
  save_json(s, "check.json", doc);

  std::cout << "lhs_r = " << rep.lhs_r << " (r = " << rep.r << ")\n";
  std::cout << "kappa = " << rep.kappa << "\n";
  const std::pair<const char*, const HypothesisFlag*> flags[] = {
      {"H1", &rep.h1}, {"H2", &rep.h2}, {"H3", &rep.h3}, {"H4", &rep.h4}};
  for (const auto& [name, f] : flags) {
    std::cout << name << ": " << (f->pass ? "pass" : "FAIL");
    if (!f->notes.empty()) std::cout << "  (" << join(f->notes) << ")";
    std::cout << "\n";
  }
  const bool ok = rep.h1.pass && rep.h2.pass && rep.h3.pass && (!g.strict || rep.h4.pass);
  return ok ? 0 : 1;
}

int cmd_solve(const Globals& g) {
  Session s = open(g);
  const HypothesisReport rep = check_hypotheses(s.net(), s.ts, s.bounds);
  const AnalysisConfig& a = s.cfg.analysis;
  PicardOptions opts;
  opts.t_lo = a.solve_lo;
  opts.t_hi = a.solve_hi;
  opts.tol = a.tol;
  opts.max_iter = a.max_iter;
  opts.tail_tol = a.tail_tol;
  json doc = {{"manifest", manifest(s.cfg, "solve", s.bounds)}, {"kappa", rep.kappa}};
  try {
    const PicardResult res = picard_solve(s.ts, s.net(), rep, opts);
    doc["picard"] = to_json(res);
    save_json(s, "solve.json", doc);
    save(s, "solution.csv", [&](std::ostream& os) { write_csv(os, res.solution); });
    std::cout << "converged in " << res.differences.size() << " iterations, kappa = " << rep.kappa
              << "\n";
    return 0;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoContraction && e.kind() != ErrorKind::MaxIterExceeded) throw;
    doc["error"] = e.what();
    save_json(s, "solve.json", doc);
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_simulate(const Globals& g) {
  Session s = open(g);
  json doc = {{"manifest", manifest(s.cfg, "simulate", s.bounds)}, {"seed", s.seed}};
  try {
    const Trajectory tr = run(s, base_history(s));
    save(s, "trajectory.csv", [&](std::ostream& os) { write_csv(os, tr); });
    const double sup_x = tr.x.cwiseAbs().maxCoeff();
    const double sup_y = tr.y.cwiseAbs().maxCoeff();
    doc["points"] = tr.size();
    doc["sup_abs_x"] = sup_x;
    doc["sup_abs_y"] = sup_y;
    save_json(s, "simulate.json", doc);
    std::cout << tr.size() << " points, sup|x| = " << sup_x << ", sup|y| = " << sup_y << "\n";
    return 0;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonFinite) throw;
    doc["error"] = e.what();
    save_json(s, "simulate.json", doc);
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int cmd_stability(const Globals& g) {
  Session s = open(g);
  const AnalysisConfig& a = s.cfg.analysis;
  json doc = {{"manifest", manifest(s.cfg, "stability", s.bounds)}, {"seed", s.seed}};
  StabilityCertificate cert;
  try {
    cert = decay_certificate(s.bounds, s.net().activation, s.net().r, s.ts, a.safety_fraction, a.beta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotStable && e.kind() != ErrorKind::BracketFailure) throw;
    doc["error"] = e.what();
    save_json(s, "stability.json", doc);
    std::cerr << e.what() << "\n";
    return 1;
  }
  doc["certificate"] = to_json(cert);

  // Two independent random histories; an explicit one is compared with a perturbed copy.
  const InitialHistory base = base_history(s);
  const InitialHistory other =
      s.cfg.run.initial
          ? perturbed_history(base, s.seed + 1, s.cfg.run.amplitude)
          : random_history(s.cfg.network.n, s.cfg.network.m, s.seed + 1, s.cfg.run.amplitude);
  const Trajectory ta = run(s, base);
  const Trajectory tb = run(s, other);
  const EnvelopeReport env = envelope_check(ta, tb, cert, s.ts, a.t0);
  doc["envelope"] = to_json(env);
  save(s, "envelope.csv", [&](std::ostream& os) { write_envelope_csv(os, env); });

  const LyapunovFunctional V(ta, tb, s.net(), s.ts, s.bounds, a.symmetrize);
  std::vector<LyapunovTerms> terms;
  for (const auto& p : ta.grid) {
    if (p.t >= a.t0 - TimeScale::tolerance(a.t0)) terms.push_back(V.at(p.t));
  }
  std::vector<double> dini;
  std::size_t rising = 0;
  const double slack = terms.empty() ? 0.0 : 1e-6 * terms.front().V;
  for (std::size_t k = 0; k + 1 < terms.size(); ++k) {
    dini.push_back((terms[k + 1].V - terms[k].V) / (terms[k + 1].t - terms[k].t));
    if (terms[k + 1].V - terms[k].V > slack) ++rising;
  }
  const double steps = static_cast<double>(std::max<std::size_t>(dini.size(), 1));
  doc["lyapunov"] = {{"V_t0", terms.empty() ? 0.0 : terms.front().V},
                     {"V_end", terms.empty() ? 0.0 : terms.back().V},
                     {"fraction_non_increasing", 1.0 - static_cast<double>(rising) / steps},
                     {"symmetrize", a.symmetrize}};
  save(s, "lyapunov.csv", [&](std::ostream& os) { write_lyapunov_csv(os, terms, dini); });
  save_json(s, "stability.json", doc);

  std::cout << "gamma = " << cert.gamma << ", K = " << cert.K << "\n";
  std::cout << "envelope satisfied at " << 100.0 * env.fraction_satisfied
            << "% of points, fitted rate " << env.fitted_rate << "\n";
  for (const auto& w : cert.warnings) std::cout << "warning: " << w << "\n";
  return env.fraction_satisfied < 1.0 ? 1 : 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigError, "bad number '" + item + "' in --r-list");
    }
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, "--r-list is empty");
  return out;
}

ChannelRef pick_channel(const Trajectory& tr, const std::string& name) {
  const std::pair<const char*, Channel> prefixes[] = {
      {"dx", Channel::DX}, {"dy", Channel::DY}, {"x", Channel::X}, {"y", Channel::Y}};
  for (const auto& [prefix, ch] : prefixes) {
    const std::string p = prefix;
    if (name.rfind(p, 0) != 0) continue;
    const std::string rest = name.substr(p.size());
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit)) break;
    const std::size_t q = std::stoul(rest);
    if (q == 0 || q > static_cast<std::size_t>(tr.channel(ch).rows())) break;
    return {&tr, ch, q - 1};
  }
  throw Error(ErrorKind::ConfigError, "unknown channel '" + name + "'");
}

int cmd_diagnose(const Globals& g, const DiagnoseOptions& d) {
  Session s = open(g);
  const std::vector<double> r_list = parse_list(d.r_list);
  const double r_max = *std::max_element(r_list.begin(), r_list.end());
  WeightFunction nu;
  nu.expr = parse(d.nu);
  nu.kind = d.bounded_weight ? WeightKind::BoundedAdmissible : WeightKind::General;

  Trajectory tr;
  double t0 = 0.0;
  const std::string expr_prefix = "expr:";
  ChannelRef ref;
  if (d.channel.rfind(expr_prefix, 0) == 0) {
    t0 = d.t0.value_or(0.0);
    const Expr f = parse(d.channel.substr(expr_prefix.size()));
    tr = sample_function(s.ts, f, t0 - r_max, t0 + r_max);
    ref = {&tr, Channel::X, 0};
  } else {
    tr = run(s, base_history(s));
    t0 = d.t0.value_or(0.5 * (tr.lower_bound() + tr.upper_bound()));
    ref = pick_channel(tr, d.channel);
  }
  StepanovParams sp{d.p, d.l};
  const double norm = stepanov_norm(ref, sp, s.ts, tr.lower_bound(), tr.upper_bound());
  const auto profile = wpaa0_profile(ref, nu, s.ts, t0, r_list);
  bool decreasing = true;
  for (std::size_t k = 1; k < profile.size(); ++k) {
    decreasing = decreasing && profile[k].second < profile[k - 1].second;
  }

  json prof = json::array();
  for (const auto& [r, w] : profile) prof.push_back({r, w});
  json doc = {{"manifest", manifest(s.cfg, "diagnose", s.bounds)},
              {"channel", d.channel},
              {"stepanov", {{"p", d.p}, {"l", d.l}, {"norm", norm},
                            {"window", {tr.lower_bound(), tr.upper_bound()}}}},
              {"t0", t0},
              {"weight", d.nu},
              {"profile", prof},
              {"decreasing", decreasing}};
  save_json(s, "diagnose.json", doc);
  save(s, "wpaa0.csv", [&](std::ostream& os) { write_profile_csv(os, profile); });
  std::cout << "Stepanov norm = " << norm << "\n";
  for (const auto& [r, w] : profile) std::cout << "r = " << r << "  w_r = " << w << "\n";
  std::cout << (decreasing ? "profile decreasing" : "profile not decreasing") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-scale HOBAM network laboratory"};
  app.require_subcommand(1);
  Globals g;
  DiagnoseOptions d;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", g.config, "network configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", g.out, "output directory");
    sub->add_option("--seed", g.seed, "seed for random initial histories");
    sub->add_option("--resolution", g.resolution, "sampling step inside dense pieces")
        ->check(CLI::PositiveNumber);
  };
  auto* check = app.add_subcommand("check", "numeric hypothesis checks");
  common(check);
  check->add_flag("--strict", g.strict, "also require the delay-derivative hypothesis");
  auto* solve = app.add_subcommand("solve", "Picard iteration of the fixed-point map");
  common(solve);
  auto* sim = app.add_subcommand("simulate", "march the network forward");
  common(sim);
  auto* stab = app.add_subcommand("stability", "decay certificate, envelope and Lyapunov series");
  common(stab);
  auto* diag = app.add_subcommand("diagnose", "Stepanov norm and weighted ergodic profile");
  common(diag);
  diag->add_option("--channel", d.channel, "x1.., y1.., dx1.., dy1.. or expr:<expression>");
  diag->add_option("--p", d.p, "Stepanov exponent")->check(CLI::Range(1.0, 1e9));
  diag->add_option("--l", d.l, "Stepanov window length")->check(CLI::PositiveNumber);
  diag->add_option("--nu", d.nu, "weight expression");
  diag->add_flag("--bounded-weight", d.bounded_weight, "mark the weight as bounded admissible");
  diag->add_option("--r-list", d.r_list, "comma-separated increasing radii");
  diag->add_option("--t0", d.t0, "centre of the ergodic windows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(g);
    if (solve->parsed()) return cmd_solve(g);
    if (sim->parsed()) return cmd_simulate(g);
    if (stab->parsed()) return cmd_stability(g);
    return cmd_diagnose(g, d);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::SyntaxError ||
                   e.kind() == ErrorKind::UnknownIdentifier
               ? 2
               : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
