#pragma once

#include "nsch/simulation.hpp"

#include <string>
#include <vector>

namespace nsch {

/// Epsilon-continuation plan: one scenario run across a strictly decreasing
/// regularization schedule on a shared grid and time step, so member
/// differences measure only the effect of eps.
struct SweepPlan {
  RunConfig scenario;
  std::vector<Scalar> eps_schedule;
  int max_threads = 0;  // 0: hardware limit, capped by NSCH_THREADS
};

struct SweepMember {
  Scalar eps = 0.0;
  bool failed = false;
  std::string error;
  TimeseriesSummary norms;
  Scalar defect_time_max = 0.0;       // max over steps of the phase defect
  Scalar defect_time_integral = 0.0;  // trapezoid over [0, T]
  Scalar fpp_seam = 0.0;              // F''(1 - eps)
  Scalar defect_scaled = 0.0;         // time integral times F''(1-eps)^2
  Scalar gradc_l2p4 = 0.0;            // || grad c ||_{L^2(0,T; L^{2 p4})}, reported only
};

struct SweepReport {
  std::vector<SweepMember> members;
  /// ||c_{eps_{i+1}} - c_{eps_i}||_{L^2((0,T) x Omega)} between consecutive
  /// members; a heuristic Cauchy tail, not a convergence proof.
  std::vector<Scalar> consecutive_c_l2;
};

SweepReport run_sweep(const SweepPlan& plan);

/// Per-member rows plus the consecutive-difference column.
void write_sweep_csv(const std::string& path, const SweepReport& report);

/// Members also write full trajectories under dir/member_<index>/.
SweepReport run_sweep_with_output(const SweepPlan& plan, const std::string& dir);

}  // namespace nsch
