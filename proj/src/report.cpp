#include "tshobam/report.hpp"

#include <cstdio>

namespace tshobam {

namespace {

using nlohmann::json;

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index q = 0; q < v.size(); ++q) out.push_back(v(q));
  return out;
}

json mat(const Eigen::MatrixXd& a) {
  json out = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) out.push_back(vec(a.row(r).transpose()));
  return out;
}

json flag(const HypothesisFlag& f) { return {{"pass", f.pass}, {"notes", f.notes}}; }

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json manifest(const ExperimentConfig& cfg, const std::string& command,
              const CoefficientBounds& bounds) {
  return {{"command", command},
          {"config_hash", cfg.hash},
          {"scan_window", {bounds.window_lo, bounds.window_hi}},
          {"scan_density", bounds.density},
          {"tool_version", kToolVersion}};
}

json to_json(const CoefficientBounds& b) {
  json T = json::array();
  for (const auto& s : b.T) T.push_back(mat(s));
  json T_bar = json::array();
  for (const auto& s : b.T_bar) T_bar.push_back(mat(s));
  return {{"alpha_sup", vec(b.alpha_sup)}, {"alpha_inf", vec(b.alpha_inf)},
          {"c_sup", vec(b.c_sup)},         {"c_inf", vec(b.c_inf)},
          {"D", mat(b.D)},                 {"D_tau", mat(b.D_tau)},
          {"D_bar", mat(b.D_bar)},         {"D_tilde", mat(b.D_tilde)},
          {"E", mat(b.E)},                 {"E_tau", mat(b.E_tau)},
          {"E_bar", mat(b.E_bar)},         {"E_tilde", mat(b.E_tilde)},
          {"T", T},                        {"T_bar", T_bar},
          {"I", vec(b.I)},                 {"J", vec(b.J)},
          {"eta", vec(b.eta)},             {"varsigma", vec(b.varsigma)},
          {"chi", vec(b.chi)},             {"tau", mat(b.tau)},
          {"sigma", mat(b.sigma)},         {"xi", mat(b.xi)},
          {"theta", b.theta()},            {"min_raw_delay", b.min_raw_delay}};
}

json to_json(const HypothesisReport& rep) {
  return {{"bounds", to_json(rep.bounds)},
          {"r", rep.r},
          {"M", vec(rep.constants.M)},
          {"M_bar", vec(rep.constants.M_bar)},
          {"N", vec(rep.constants.N)},
          {"N_bar", vec(rep.constants.N_bar)},
          {"lhs_r", rep.lhs_r},
          {"lhs_1", rep.lhs_1},
          {"kappa", rep.kappa},
          {"h1", flag(rep.h1)},
          {"h2", flag(rep.h2)},
          {"h3", flag(rep.h3)},
          {"h4", flag(rep.h4)},
          {"h4_sigma_margin", mat(rep.h4_sigma_margin)},
          {"h4_xi_margin", mat(rep.h4_xi_margin)}};
}

json to_json(const StabilityCertificate& c) {
  return {{"gamma", c.gamma},
          {"a", c.a},
          {"K", c.K},
          {"safety_fraction", c.safety_fraction},
          {"sup_graininess", c.sup_graininess},
          {"root_G", vec(c.root_G)},
          {"root_H", vec(c.root_H)},
          {"root_G_bar", vec(c.root_G_bar)},
          {"root_H_bar", vec(c.root_H_bar)},
          {"K_star", vec(c.K_star)},
          {"P_star", vec(c.P_star)},
          {"beta_x", vec(c.beta_x)},
          {"beta_y", vec(c.beta_y)},
          {"warnings", c.warnings}};
}

json to_json(const PicardResult& res) {
  json ratios = json::array();
  for (std::size_t k = 1; k < res.differences.size(); ++k) {
    const double prev = res.differences[k - 1];
    ratios.push_back(prev > 0.0 ? res.differences[k] / prev : 0.0);
  }
  return {{"converged", res.converged},
          {"iterations", res.differences.size()},
          {"differences", res.differences},
          {"ratios", ratios},
          {"kappa", res.kappa},
          {"cutoff", res.cutoff},
          {"grid_start", res.solution.size() ? res.solution.lower_bound() : 0.0},
          {"grid_end", res.solution.size() ? res.solution.upper_bound() : 0.0}};
}

json to_json(const EnvelopeReport& env) {
  return {{"t0", env.t0},
          {"initial_distance", env.initial_distance},
          {"points", env.t.size()},
          {"fraction_satisfied", env.fraction_satisfied},
          {"fitted_rate", env.fitted_rate}};
}

void write_envelope_csv(std::ostream& os, const EnvelopeReport& env) {
  os << "t,d,bound\n";
  for (std::size_t k = 0; k < env.t.size(); ++k) {
    os << g17(env.t[k]) << ',' << g17(env.d[k]) << ',' << g17(env.bound[k]) << '\n';
  }
}

void write_lyapunov_csv(std::ostream& os, const std::vector<LyapunovTerms>& terms,
                        const std::vector<double>& dini) {
  os << "t,V,V1,V2,V3,V4,V5,dini\n";
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const LyapunovTerms& v = terms[k];
    os << g17(v.t) << ',' << g17(v.V) << ',' << g17(v.V1) << ',' << g17(v.V2) << ','
       << g17(v.V3) << ',' << g17(v.V4) << ',' << g17(v.V5) << ','
       << (k < dini.size() ? g17(dini[k]) : std::string()) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const std::vector<std::pair<double, double>>& profile) {
  os << "r,w_r\n";
  for (const auto& [r, w] : profile) os << g17(r) << ',' << g17(w) << '\n';
}

void write_json(std::ostream& os, const json& doc) { os << doc.dump(2) << '\n'; }

}  // namespace tshobam
