#pragma once

#include "isac/types.hpp"

namespace isac {

/// Pilot and data transmit powers (watts). The per-user energy budget is
/// T_p * p_p[k] + T_d * p_d[k] <= P * T.
struct PowerAllocation {
  RVector p_p;
  RVector p_d;

  static PowerAllocation equal(int k, double p) {
    return {RVector::Constant(k, p), RVector::Constant(k, p)};
  }

  double budget_slack(int k, double p, int t, int t_p) const {
    return p * t - t_p * p_p[k] - (t - t_p) * p_d[k];
  }
};

}  // namespace isac
