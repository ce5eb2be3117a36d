#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

/// Deployment knobs as configured; the full Geometry (with the target at
/// azimuth 45 degrees from broadside) is derived on demand. Sweeps that move
/// the target install an explicit position instead.
struct GeometryConfig {
  double d_t2b = 50.0;
  Eigen::Vector2d cluster_center{100.0, 0.0};
  double cluster_radius = 100.0;
  double d_over_lambda = 0.5;

  bool has_target_override = false;
  Eigen::Vector2d target_override{0.0, 0.0};

  Geometry to_geometry() const;
};

enum class SweepVar { P, P_tot, K, N_b, d_t2u, T_p };
enum class Baseline { ORB, ZF, MRC, FPA, OPA, COMM_ONLY };

std::string to_string(SweepVar v);
std::string to_string(Baseline b);
SweepVar sweep_var_from_string(const std::string& s);
Baseline baseline_from_string(const std::string& s);

struct ExperimentSpec {
  std::string name = "experiment";
  SweepVar sweep = SweepVar::P;
  std::vector<double> values{0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<Baseline> baselines{Baseline::ORB, Baseline::ZF, Baseline::MRC,
                                  Baseline::FPA, Baseline::OPA,
                                  Baseline::COMM_ONLY};
  std::string outputs = "out";

  void validate() const;  // trials >= 1, strictly increasing values
  bool has(Baseline b) const;
};

struct FullConfig {
  SystemConfig sys;
  GeometryConfig geom;
  PathLossParams pl;
  ExperimentSpec exp;
};

/// Flat INI-style key-value file with [system], [geometry], [pathloss] and
/// [experiment] sections. Unknown keys are rejected. Power keys are in dBm
/// and converted here; everything downstream is linear.
FullConfig load_config(const std::string& path);

FullConfig parse_config_text(const std::string& text);

}  // namespace isac
