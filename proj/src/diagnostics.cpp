#include "nsch/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nsch {

Scalar total_energy_eps(const State& s, const PhysicalParams& params,
                        const RegularizedPotential& reg) {
  const Grid& g = s.rho.grid;
  const VectorField u = s.velocity();
  Scalar E = 0.5 * face_inner(s.momentum, u);
  const Scalar vol = g.cell_volume();
  for (Index i = 0; i < g.cell_count(); ++i) {
    const Scalar r = s.rho.values[i];
    const Scalar c = s.c.values[i];
    E += (elastic_energy(r, params.gamma()) + r * reg.value(c) -
          0.5 * params.theta0() * r * c * c) *
         vol;
  }
  const VectorField gc = gradient(s.c);
  E += 0.5 * face_inner(gc, gc);
  return E;
}

Scalar viscous_dissipation(const VectorField& u, const ScalarField& c,
                           const ViscosityProfile& prof) {
  const Grid& g = u.grid;
  const TensorField gu = velocity_gradient(u);
  const int d = g.dim();
  Scalar total = 0.0;
  Scalar a[4] = {0, 0, 0, 0};
  for (Index i = 0; i < g.cell_count(); ++i) {
    for (int p = 0; p < d * d; ++p) a[p] = gu.entry[std::size_t(p)][i];
    total += stress_contraction(prof.eta(c.values[i]), prof.lambda(c.values[i]), d, a);
  }
  return total * g.cell_volume();
}

Scalar mu_dissipation(const ScalarField& mu) {
  const VectorField gm = gradient(mu);
  return face_inner(gm, gm);
}

Scalar pressure_exponent(Scalar gamma) { return std::min(5.0 / 3.0 - 1.0 / gamma, 1.5); }

DiagnosticsRecord record(const State& s, const PhysicalParams& params,
                         const RegularizedPotential& reg, Scalar M_r) {
  const Grid& g = s.rho.grid;
  const Scalar vol = g.cell_volume();
  DiagnosticsRecord r;
  r.time = s.time;
  r.M = s.rho.values.sum() * vol;
  r.M_c = (s.rho.values * s.c.values).sum() * vol;
  r.E_eps = total_energy_eps(s, params, reg);

  Scalar ne1 = 0, ne1_abs = 0, fp2 = 0, defect = 0, pq = 0;
  const Scalar q = pressure_exponent(params.gamma());
  for (Index i = 0; i < g.cell_count(); ++i) {
    const Scalar rho = s.rho.values[i];
    const Scalar c = s.c.values[i];
    const Scalar fp = reg.prime(c);
    ne1 += rho * fp * (c - M_r);
    ne1_abs += rho * std::abs(fp);
    fp2 += rho * fp * fp;
    const Scalar exc = std::abs(c) - 1.0;
    if (exc > 0.0) defect += rho * exc * exc;
    pq += std::pow(std::pow(rho, params.gamma()), q);
  }
  r.ne1 = ne1 * vol;
  r.ne1_abs = ne1_abs * vol;
  r.rho_fprime_sq = fp2 * vol;
  r.phase_defect = defect * vol;
  r.pressure_norm = std::pow(pq * vol, 1.0 / q);
  r.mu_h1 = std::sqrt(s.mu.values.square().sum() * vol + mu_dissipation(s.mu));
  r.c_min = s.c.values.minCoeff();
  r.c_max = s.c.values.maxCoeff();
  r.rho_min = s.rho.values.minCoeff();
  r.rho_max = s.rho.values.maxCoeff();
  return r;
}

TimeseriesSummary timeseries_norms(const std::vector<DiagnosticsRecord>& records, Scalar T) {
  if (records.size() < 2) throw Error("timeseries_norms: need at least two records");
  const std::size_t n = records.size();
  const Scalar dt = T / Scalar(n - 1);
  TimeseriesSummary s;
  Scalar a = 0, b = 0, c = 0, d = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Scalar w = (k == 0 || k + 1 == n) ? 0.5 * dt : dt;
    a += w * records[k].ne1 * records[k].ne1;
    b += w * records[k].ne1_abs * records[k].ne1_abs;
    c += w * records[k].mu_h1 * records[k].mu_h1;
    d += w * records[k].rho_fprime_sq;
  }
  s.ne1_l2 = std::sqrt(a);
  s.ne1_abs_l2 = std::sqrt(b);
  s.mu_l2w12 = std::sqrt(c);
  s.sqrt_rho_fprime_l2 = std::sqrt(d);
  return s;
}

namespace {

std::string fmt(Scalar v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string diagnostics_csv_header() {
  return "time[-],M[-],M_c[-],E_eps[-],visc_dissipation[-],mu_dissipation[-],"
         "ne1[-],ne1_abs[-],mu_h1[-],rho_fprime_sq[-],phase_defect[-],pressure_norm[-],"
         "c_min[-],c_max[-],rho_min[-],rho_max[-],"
         "newton_iterations[#],newton_residual[-],phase_linear_iterations[#],"
         "phase_linear_residual[-],viscous_iterations[#],viscous_residual[-],"
         "energy_margin[-],energy_ok[#],tol_energy[-]";
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
  std::ostringstream os;
  os << fmt(r.time) << ',' << fmt(r.M) << ',' << fmt(r.M_c) << ',' << fmt(r.E_eps) << ','
     << fmt(r.visc_dissipation) << ',' << fmt(r.mu_dissipation) << ',' << fmt(r.ne1) << ','
     << fmt(r.ne1_abs) << ',' << fmt(r.mu_h1) << ',' << fmt(r.rho_fprime_sq) << ','
     << fmt(r.phase_defect) << ',' << fmt(r.pressure_norm) << ',' << fmt(r.c_min) << ','
     << fmt(r.c_max) << ',' << fmt(r.rho_min) << ',' << fmt(r.rho_max) << ','
     << r.newton_iterations << ',' << fmt(r.newton_residual) << ','
     << r.phase_linear_iterations << ',' << fmt(r.phase_linear_residual) << ','
     << r.viscous_iterations << ',' << fmt(r.viscous_residual) << ','
     << fmt(r.energy_margin) << ',' << r.energy_ok << ',' << fmt(r.tol_energy);
  return os.str();
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << diagnostics_csv_header() << '\n';
  for (const auto& r : records) out << diagnostics_csv_row(r) << '\n';
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("empty diagnostics file '" + path + "'");
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<Scalar> v;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() < 25) throw Error("malformed diagnostics row in '" + path + "'");
    DiagnosticsRecord r;
    r.time = v[0]; r.M = v[1]; r.M_c = v[2]; r.E_eps = v[3];
    r.visc_dissipation = v[4]; r.mu_dissipation = v[5];
    r.ne1 = v[6]; r.ne1_abs = v[7]; r.mu_h1 = v[8]; r.rho_fprime_sq = v[9];
    r.phase_defect = v[10]; r.pressure_norm = v[11];
    r.c_min = v[12]; r.c_max = v[13]; r.rho_min = v[14]; r.rho_max = v[15];
    r.newton_iterations = int(v[16]); r.newton_residual = v[17];
    r.phase_linear_iterations = int(v[18]); r.phase_linear_residual = v[19];
    r.viscous_iterations = int(v[20]); r.viscous_residual = v[21];
    r.energy_margin = v[22]; r.energy_ok = int(v[23]); r.tol_energy = v[24];
    out.push_back(r);
  }
  return out;
}

}  // namespace nsch
