#include "isac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace isac {

Geometry GeometryConfig::to_geometry() const {
  Geometry g;
  g.bs_pos = Eigen::Vector2d::Zero();
  if (has_target_override) {
    g.target_pos = target_override;
  } else {
    const double c = d_t2b / std::sqrt(2.0);
    g.target_pos = Eigen::Vector2d(c, c);
  }
  g.cluster_center = cluster_center;
  g.cluster_radius = cluster_radius;
  g.d_over_lambda = d_over_lambda;
  return g;
}

std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::P: return "P";
    case SweepVar::P_tot: return "P_tot";
    case SweepVar::K: return "K";
    case SweepVar::N_b: return "N_b";
    case SweepVar::d_t2u: return "d_t2u";
    case SweepVar::T_p: return "T_p";
  }
  return "?";
}

std::string to_string(Baseline b) {
  switch (b) {
    case Baseline::ORB: return "ORB";
    case Baseline::ZF: return "ZF";
    case Baseline::MRC: return "MRC";
    case Baseline::FPA: return "FPA";
    case Baseline::OPA: return "OPA";
    case Baseline::COMM_ONLY: return "COMM_ONLY";
  }
  return "?";
}

SweepVar sweep_var_from_string(const std::string& s) {
  if (s == "P") return SweepVar::P;
  if (s == "P_tot") return SweepVar::P_tot;
  if (s == "K") return SweepVar::K;
  if (s == "N_b") return SweepVar::N_b;
  if (s == "d_t2u") return SweepVar::d_t2u;
  if (s == "T_p") return SweepVar::T_p;
  throw IoError("config: unknown sweep variable '" + s + "'");
}

Baseline baseline_from_string(const std::string& s) {
  if (s == "ORB") return Baseline::ORB;
  if (s == "ZF") return Baseline::ZF;
  if (s == "MRC") return Baseline::MRC;
  if (s == "FPA") return Baseline::FPA;
  if (s == "OPA") return Baseline::OPA;
  if (s == "COMM_ONLY") return Baseline::COMM_ONLY;
  throw IoError("config: unknown baseline '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw OutOfDomainError("experiment: trials must be >= 1");
  if (values.empty()) throw OutOfDomainError("experiment: empty sweep list");
  for (size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw OutOfDomainError("experiment: sweep values must strictly increase");
    }
  }
}

bool ExperimentSpec::has(Baseline b) const {
  return std::find(baselines.begin(), baselines.end(), b) != baselines.end();
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw IoError("config: bad numeric value for '" + key + "': " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw IoError("config: '" + key + "' must be integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw IoError("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

FullConfig parse_config_text(const std::string& text) {
  FullConfig cfg;
  bool tp_given = false;

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw IoError("config: bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("config: expected key = value at line " +
                    std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (section == "system") {
      if (key == "K") cfg.sys.K = to_int(key, val);
      else if (key == "N_b") cfg.sys.N_b = to_int(key, val);
      else if (key == "T") cfg.sys.T = to_int(key, val);
      else if (key == "T_p") { cfg.sys.T_p = to_int(key, val); tp_given = true; }
      else if (key == "P_dbm") cfg.sys.P = dbm_to_watt(to_double(key, val));
      else if (key == "sigma2_dbm") cfg.sys.sigma2 = dbm_to_watt(to_double(key, val));
      else if (key == "P_FA") cfg.sys.P_FA = to_double(key, val);
      else if (key == "P_D_th") cfg.sys.P_D_th = to_double(key, val);
      else if (key == "R_th") {
        const auto parts = split_list(val);
        cfg.sys.R_th.resize(static_cast<Eigen::Index>(parts.size()));
        for (size_t i = 0; i < parts.size(); ++i) {
          cfg.sys.R_th[static_cast<Eigen::Index>(i)] = to_double(key, parts[i]);
        }
      }
      else if (key == "eps") cfg.sys.eps = to_double(key, val);
      else if (key == "xi0") cfg.sys.xi0 = to_double(key, val);
      else if (key == "delta0") cfg.sys.delta0 = to_double(key, val);
      else if (key == "eta") cfg.sys.eta = to_double(key, val);
      else if (key == "wp") cfg.sys.wp = to_double(key, val);
      else if (key == "pdd_literal_xi_growth") cfg.sys.pdd_literal_xi_growth = to_bool(key, val);
      else if (key == "rh_corr") cfg.sys.rh_corr = to_double(key, val);
      else throw IoError("config: unknown [system] key '" + key + "'");
    } else if (section == "geometry") {
      if (key == "d_t2b") cfg.geom.d_t2b = to_double(key, val);
      else if (key == "cluster_x") cfg.geom.cluster_center.x() = to_double(key, val);
      else if (key == "cluster_y") cfg.geom.cluster_center.y() = to_double(key, val);
      else if (key == "cluster_radius") cfg.geom.cluster_radius = to_double(key, val);
      else if (key == "d_over_lambda") cfg.geom.d_over_lambda = to_double(key, val);
      else throw IoError("config: unknown [geometry] key '" + key + "'");
    } else if (section == "pathloss") {
      if (key == "alpha_u2b") cfg.pl.alpha_u2b = to_double(key, val);
      else if (key == "alpha_u2t") cfg.pl.alpha_u2t = to_double(key, val);
      else if (key == "alpha_t2b") cfg.pl.alpha_t2b = to_double(key, val);
      else if (key == "alpha_rcs") cfg.pl.alpha_rcs = to_double(key, val);
      else if (key == "d0") cfg.pl.d0 = to_double(key, val);
      else if (key == "sigma_g2") cfg.pl.sigma_g2 = to_double(key, val);
      else throw IoError("config: unknown [pathloss] key '" + key + "'");
    } else if (section == "experiment") {
      if (key == "name") cfg.exp.name = val;
      else if (key == "sweep") cfg.exp.sweep = sweep_var_from_string(val);
      else if (key == "sweep_values") {
        cfg.exp.values.clear();
        for (const auto& p : split_list(val)) {
          cfg.exp.values.push_back(to_double(key, p));
        }
      }
      else if (key == "trials") cfg.exp.trials = to_int(key, val);
      else if (key == "seed") cfg.exp.seed = static_cast<std::uint64_t>(
          std::stoull(val));
      else if (key == "baselines") {
        cfg.exp.baselines.clear();
        for (const auto& p : split_list(val)) {
          cfg.exp.baselines.push_back(baseline_from_string(p));
        }
      }
      else if (key == "outputs") cfg.exp.outputs = val;
      else throw IoError("config: unknown [experiment] key '" + key + "'");
    } else {
      throw IoError("config: key outside a known section at line " +
                    std::to_string(lineno));
    }
  }

  if (!tp_given) cfg.sys.T_p = cfg.sys.K + 1;
  cfg.sys.validate();
  cfg.exp.validate();
  return cfg;
}

FullConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace isac
