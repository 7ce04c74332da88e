#include "nsch/sweep.hpp"

#include "nsch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

namespace nsch {

namespace {

int thread_budget(int requested, std::size_t members) {
  int n = requested > 0 ? requested : int(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("NSCH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, std::min<int>(n, int(members)));
}

Scalar lp_norm_cells(const Array& v, Scalar p, Scalar vol) {
  return std::pow((v.abs().pow(p)).sum() * vol, 1.0 / p);
}

void analyze_member(const Trajectory& traj, const RunConfig& cfg, SweepMember& m) {
  const Scalar T = traj.dt * Scalar(traj.records.size() - 1);
  m.norms = timeseries_norms(traj.records, T);

  Scalar integral = 0.0, maxd = 0.0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const Scalar w = (k == 0 || k + 1 == traj.records.size()) ? 0.5 * traj.dt : traj.dt;
    integral += w * traj.records[k].phase_defect;
    maxd = std::max(maxd, traj.records[k].phase_defect);
  }
  m.defect_time_integral = integral;
  m.defect_time_max = maxd;
  m.fpp_seam = flory_huggins_second(1.0 - m.eps, cfg.theta);
  m.defect_scaled = integral * m.fpp_seam * m.fpp_seam;

  // || grad c ||_{L^2(0,T; L^{2 p4})} with p4 = 3 gamma / (gamma + 3)
  const Scalar p4 = 3.0 * cfg.gamma / (cfg.gamma + 3.0);
  const Scalar vol = traj.grid.cell_volume();
  Scalar acc = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto gc = face_to_cell(gradient(traj.states[k].c));
    Array mag = gc[0] * gc[0];
    if (traj.grid.dim() == 2) mag += gc[1] * gc[1];
    mag = mag.sqrt();
    const Scalar norm = lp_norm_cells(mag, 2.0 * p4, vol);
    const Scalar w = (k == 0 || k + 1 == traj.states.size()) ? 0.5 * traj.dt : traj.dt;
    acc += w * norm * norm;
  }
  m.gradc_l2p4 = std::sqrt(acc);
}

Scalar c_difference_l2(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) throw Error("sweep: member lengths differ");
  const Scalar vol = a.grid.cell_volume();
  Scalar acc = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    const Scalar w = (k == 0 || k + 1 == a.states.size()) ? 0.5 * a.dt : a.dt;
    acc += w * (a.states[k].c.values - b.states[k].c.values).square().sum() * vol;
  }
  return std::sqrt(acc);
}

SweepReport run_sweep_impl(const SweepPlan& plan, const std::string* out_dir) {
  if (plan.eps_schedule.empty()) throw Error("sweep: empty schedule");
  for (std::size_t i = 0; i < plan.eps_schedule.size(); ++i) {
    const Scalar e = plan.eps_schedule[i];
    if (!(e > 0.0 && e < 0.5)) throw Error("sweep: schedule entries must lie in (0, 1/2)");
    if (i > 0 && !(e < plan.eps_schedule[i - 1]))
      throw Error("sweep: schedule must be strictly decreasing");
  }

  const std::size_t n = plan.eps_schedule.size();
  std::vector<Trajectory> trajs(n);
  std::vector<SweepMember> members(n);
  for (std::size_t i = 0; i < n; ++i) members[i].eps = plan.eps_schedule[i];

  const int budget = thread_budget(plan.max_threads, n);
  std::size_t next = 0;
  while (next < n) {
    const std::size_t batch = std::min<std::size_t>(std::size_t(budget), n - next);
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < batch; ++j) {
      const std::size_t i = next + j;
      pool.emplace_back([&, i]() {
        try {
          RunConfig cfg = plan.scenario;
          cfg.eps = plan.eps_schedule[i];
          trajs[i] = run_trajectory(cfg, true);
          analyze_member(trajs[i], cfg, members[i]);
        } catch (const std::exception& e) {
          members[i].failed = true;
          members[i].error = e.what();
        }
      });
    }
    for (auto& t : pool) t.join();
    next += batch;
  }

  SweepReport rep;
  rep.members = std::move(members);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (rep.members[i].failed || rep.members[i + 1].failed) {
      rep.consecutive_c_l2.push_back(std::nan(""));
      continue;
    }
    rep.consecutive_c_l2.push_back(c_difference_l2(trajs[i], trajs[i + 1]));
  }

  if (out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(*out_dir);
    for (std::size_t i = 0; i < n; ++i) {
      if (rep.members[i].failed) continue;
      char sub[32];
      std::snprintf(sub, sizeof sub, "/member_%02d", int(i));
      write_trajectory(*out_dir + sub, trajs[i]);
    }
    write_sweep_csv(*out_dir + "/sweep_report.csv", rep);
  }
  return rep;
}

}  // namespace

SweepReport run_sweep(const SweepPlan& plan) { return run_sweep_impl(plan, nullptr); }

SweepReport run_sweep_with_output(const SweepPlan& plan, const std::string& dir) {
  return run_sweep_impl(plan, &dir);
}

void write_sweep_csv(const std::string& path, const SweepReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "eps[-],failed[#],ne1_l2[-],ne1_abs_l2[-],mu_l2w12[-],sqrt_rho_fprime_l2[-],"
         "defect_time_max[-],defect_time_integral[-],fpp_seam[-],defect_scaled[-],"
         "gradc_l2p4[-],c_delta_to_next[-]\n";
  char buf[400];
  for (std::size_t i = 0; i < rep.members.size(); ++i) {
    const auto& m = rep.members[i];
    const Scalar delta = (i < rep.consecutive_c_l2.size()) ? rep.consecutive_c_l2[i]
                                                           : std::nan("");
    std::snprintf(buf, sizeof buf,
                  "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  m.eps, m.failed ? 1 : 0, m.norms.ne1_l2, m.norms.ne1_abs_l2,
                  m.norms.mu_l2w12, m.norms.sqrt_rho_fprime_l2, m.defect_time_max,
                  m.defect_time_integral, m.fpp_seam, m.defect_scaled, m.gradc_l2p4, delta);
    out << buf;
  }
}

}  // namespace nsch
