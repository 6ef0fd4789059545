#include "tshobam/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace tshobam {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigError, path + ": " + what);
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t q) {
  return path + "[" + std::to_string(q) + "]";
}

void only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) fail(at(path, item.key()), "unknown key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj.at(key), at(path, key)) : fallback;
}

bool flag_or(const json& obj, const char* key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) fail(at(path, key), "expected true or false");
  return obj.at(key).get<bool>();
}

Expr expr(const json& v, const std::string& path) {
  if (v.is_number()) return Expr::constant(v.get<double>());
  if (!v.is_string()) fail(path, "expected an expression string or a number");
  try {
    return parse(v.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::vector<Expr> vec(const json& v, const std::string& path, std::size_t size) {
  if (!v.is_array()) fail(path, "expected an array of " + std::to_string(size) + " entries");
  if (v.size() != size) {
    fail(path, "expected " + std::to_string(size) + " entries, found " + std::to_string(v.size()));
  }
  std::vector<Expr> out;
  for (std::size_t q = 0; q < size; ++q) out.push_back(expr(v[q], at(path, q)));
  return out;
}

ExprMatrix mat(const json& v, const std::string& path, std::size_t rows, std::size_t cols) {
  if (!v.is_array() || v.size() != rows) {
    fail(path, "expected " + std::to_string(rows) + " rows");
  }
  ExprMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = vec(v[r], at(path, r), cols);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = row[c];
  }
  return out;
}

std::size_t dimension(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail(at(path, key), "missing");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) fail(at(path, key), "expected a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

TimeScale read_timescale(const json& obj, const std::string& path) {
  only(obj, path, {"kind", "step", "anchor", "on_length", "gap_length", "resolution"});
  if (!obj.contains("kind") || !obj.at("kind").is_string()) fail(at(path, "kind"), "missing");
  const std::string kind = obj.at("kind").get<std::string>();
  const double res = number_or(obj, "resolution", path, 1e-3);
  const double anchor = number_or(obj, "anchor", path, 0.0);
  if (kind == "continuum") return TimeScale::continuum(res);
  if (kind == "uniform_grid") {
    if (!obj.contains("step")) fail(at(path, "step"), "missing");
    return TimeScale::uniform_grid(number(obj.at("step"), at(path, "step")), anchor);
  }
  if (kind == "periodic_union") {
    if (!obj.contains("on_length") || !obj.contains("gap_length")) {
      fail(path, "periodic_union needs on_length and gap_length");
    }
    return TimeScale::periodic_union(number(obj.at("on_length"), at(path, "on_length")),
                                     number(obj.at("gap_length"), at(path, "gap_length")), anchor,
                                     res);
  }
  fail(at(path, "kind"), "unknown time scale kind '" + kind + "'");
}

void read_activation(const json& obj, const std::string& path, ActivationSpec& act) {
  only(obj, path, {"f", "lipschitz"});
  const std::size_t w = act.size();
  if (obj.contains("f")) {
    const json& f = obj.at("f");
    act.f = f.is_array() ? vec(f, at(path, "f"), w) : std::vector<Expr>(w, expr(f, at(path, "f")));
  }
  if (obj.contains("lipschitz")) {
    const json& L = obj.at("lipschitz");
    const std::string p = at(path, "lipschitz");
    if (L.is_array()) {
      if (L.size() != w) fail(p, "expected " + std::to_string(w) + " entries");
      act.lipschitz.clear();
      for (std::size_t q = 0; q < w; ++q) act.lipschitz.push_back(number(L[q], at(p, q)));
    } else {
      act.lipschitz.assign(w, number(L, p));
    }
  }
}

NetworkSpec read_network(const json& obj, const std::string& path) {
  only(obj, path, {"n", "m", "alpha", "c", "D", "D_tau", "D_bar", "D_tilde", "E", "E_tau",
                   "E_bar", "E_tilde", "T", "T_bar", "I", "J", "activation", "r"});
  const std::size_t n = dimension(obj, "n", path);
  const std::size_t m = dimension(obj, "m", path);
  NetworkSpec net = NetworkSpec::zeros(n, m);
  if (obj.contains("alpha")) net.alpha = vec(obj.at("alpha"), at(path, "alpha"), n);
  if (obj.contains("c")) net.c = vec(obj.at("c"), at(path, "c"), m);
  if (obj.contains("I")) net.I = vec(obj.at("I"), at(path, "I"), n);
  if (obj.contains("J")) net.J = vec(obj.at("J"), at(path, "J"), m);
  const std::pair<const char*, ExprMatrix*> families[] = {
      {"D", &net.D},         {"D_tau", &net.D_tau},     {"D_bar", &net.D_bar},
      {"D_tilde", &net.D_tilde}, {"E", &net.E},         {"E_tau", &net.E_tau},
      {"E_bar", &net.E_bar}, {"E_tilde", &net.E_tilde},
  };
  for (const auto& [key, target] : families) {
    if (obj.contains(key)) *target = mat(obj.at(key), at(path, key), n, m);
  }
  auto tensor = [&](const char* key, std::size_t slices, std::size_t side) {
    const json& v = obj.at(key);
    const std::string p = at(path, key);
    if (!v.is_array() || v.size() != slices) fail(p, "expected " + std::to_string(slices) + " slices");
    std::vector<ExprMatrix> out;
    for (std::size_t s = 0; s < slices; ++s) out.push_back(mat(v[s], at(p, s), side, side));
    return out;
  };
  if (obj.contains("T")) net.T = tensor("T", n, m);
  if (obj.contains("T_bar")) net.T_bar = tensor("T_bar", m, n);
  if (obj.contains("activation")) {
    read_activation(obj.at("activation"), at(path, "activation"), net.activation);
  }
  net.r = number_or(obj, "r", path, net.r);
  return net;
}

void read_delays(const json& obj, const std::string& path, NetworkSpec& net) {
  only(obj, path, {"eta", "varsigma", "tau", "sigma", "xi", "chi", "projection"});
  DelaySpec& d = net.delays;
  if (obj.contains("eta")) d.leakage_x = vec(obj.at("eta"), at(path, "eta"), net.n);
  if (obj.contains("varsigma")) d.leakage_y = vec(obj.at("varsigma"), at(path, "varsigma"), net.m);
  if (obj.contains("tau")) d.discrete = mat(obj.at("tau"), at(path, "tau"), net.n, net.m);
  if (obj.contains("sigma")) d.distributed = mat(obj.at("sigma"), at(path, "sigma"), net.n, net.m);
  if (obj.contains("xi")) {
    d.derivative_distributed = mat(obj.at("xi"), at(path, "xi"), net.n, net.m);
  }
  if (obj.contains("chi")) d.second_order = vec(obj.at("chi"), at(path, "chi"), net.width());
  if (obj.contains("projection")) {
    const json& p = obj.at("projection");
    const std::string value = p.is_string() ? p.get<std::string>() : "";
    if (value == "forward") {
      d.projection = DelayProjection::Forward;
    } else if (value == "backward") {
      d.projection = DelayProjection::Backward;
    } else {
      fail(at(path, "projection"), "expected \"forward\" or \"backward\"");
    }
  }
}

AnalysisConfig read_analysis(const json& obj, const std::string& path) {
  only(obj, path, {"window", "density", "tol", "max_iter", "tail_tol", "solve_window",
                   "safety_fraction", "beta", "t0", "symmetrize"});
  AnalysisConfig a;
  auto pair = [&](const char* key, double& lo, double& hi) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = at(path, key);
    if (!v.is_array() || v.size() != 2) fail(p, "expected [lo, hi]");
    lo = number(v[0], at(p, 0));
    hi = number(v[1], at(p, 1));
    if (!(hi > lo)) fail(p, "expected lo < hi");
  };
  pair("window", a.window_lo, a.window_hi);
  pair("solve_window", a.solve_lo, a.solve_hi);
  if (obj.contains("density")) a.density = number(obj.at("density"), at(path, "density"));
  a.tol = number_or(obj, "tol", path, a.tol);
  if (obj.contains("max_iter")) {
    const json& v = obj.at("max_iter");
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      fail(at(path, "max_iter"), "expected a positive integer");
    }
    a.max_iter = static_cast<int>(v.get<long long>());
  }
  a.tail_tol = number_or(obj, "tail_tol", path, a.tail_tol);
  a.safety_fraction = number_or(obj, "safety_fraction", path, a.safety_fraction);
  if (obj.contains("beta") && !obj.at("beta").is_null()) {
    a.beta = number(obj.at("beta"), at(path, "beta"));
  }
  a.t0 = number_or(obj, "t0", path, a.t0);
  a.symmetrize = flag_or(obj, "symmetrize", path, a.symmetrize);
  return a;
}

RunConfig read_run(const json& obj, const std::string& path, const NetworkSpec& net) {
  only(obj, path, {"horizon", "initial", "derive_init_delta", "seed", "amplitude"});
  RunConfig run;
  run.horizon = number_or(obj, "horizon", path, run.horizon);
  run.derive_init_delta = flag_or(obj, "derive_init_delta", path, run.derive_init_delta);
  run.amplitude = number_or(obj, "amplitude", path, run.amplitude);
  if (obj.contains("seed")) {
    const json& v = obj.at("seed");
    if (!v.is_number_unsigned()) fail(at(path, "seed"), "expected a non-negative integer");
    run.seed = v.get<std::uint64_t>();
  }
  if (obj.contains("initial")) {
    const json& init = obj.at("initial");
    const std::string p = at(path, "initial");
    only(init, p, {"x", "y", "dx", "dy"});
    if (!init.contains("x") || !init.contains("y")) fail(p, "x and y are required");
    InitialHistory h;
    h.x = vec(init.at("x"), at(p, "x"), net.n);
    h.y = vec(init.at("y"), at(p, "y"), net.m);
    h.derive_delta = run.derive_init_delta;
    if (!h.derive_delta) {
      if (!init.contains("dx") || !init.contains("dy")) {
        fail(p, "dx and dy are required when derive_init_delta is false");
      }
      h.dx = vec(init.at("dx"), at(p, "dx"), net.n);
      h.dy = vec(init.at("dy"), at(p, "dy"), net.m);
    }
    run.initial = std::move(h);
  }
  if (!(run.horizon > 0.0)) fail(at(path, "horizon"), "expected a positive horizon");
  return run;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("$: ") + e.what());
  }
  const std::string root = "$";
  only(doc, root, {"timescale", "network", "delays", "analysis", "run"});
  if (!doc.contains("network")) fail(at(root, "network"), "missing");

  ExperimentConfig cfg;
  cfg.hash = fnv1a_hex(text);
  try {
    if (doc.contains("timescale")) cfg.timescale = read_timescale(doc.at("timescale"), at(root, "timescale"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    fail(at(root, "timescale"), e.what());
  }
  cfg.network = read_network(doc.at("network"), at(root, "network"));
  if (doc.contains("delays")) read_delays(doc.at("delays"), at(root, "delays"), cfg.network);
  if (doc.contains("analysis")) cfg.analysis = read_analysis(doc.at("analysis"), at(root, "analysis"));
  if (doc.contains("run")) cfg.run = read_run(doc.at("run"), at(root, "run"), cfg.network);
  cfg.network.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace tshobam
