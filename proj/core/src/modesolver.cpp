#include "fewg/modesolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fewg/constants.hpp"
#include "fewg/errors.hpp"

extern "C" {
void dnaupd_(int* ido, const char* bmat, int* n, const char* which, int* nev,
             double* tol, double* resid, int* ncv, double* v, int* ldv,
             int* iparam, int* ipntr, double* workd, double* workl,
             int* lworkl, int* info, std::size_t bmat_len, std::size_t which_len);
void dneupd_(int* rvec, const char* howmny, int* select, double* dr, double* di,
             double* z, int* ldz, double* sigmar, double* sigmai, double* workev,
             const char* bmat, int* n, const char* which, int* nev, double* tol,
             double* resid, int* ncv, double* v, int* ldv, int* iparam,
             int* ipntr, double* workd, double* workl, int* lworkl, int* info,
             std::size_t howmny_len, std::size_t bmat_len, std::size_t which_len);
}

namespace fewg {

namespace {

std::atomic<std::uint64_t> g_eigensolves{0};
// The reverse-communication driver keeps internal SAVE state.
std::mutex g_arpack_mutex;

using SpMat = Eigen::SparseMatrix<double>;

struct Eigenpair {
  double lambda = 0.0;
  double imag_ratio = 0.0;
  Eigen::VectorXd vec;
};

double interp_bilinear(const Grid2D& g, const std::vector<float>& f, double x,
                       double y) {
  const double fx = std::clamp((x - g.x0) / g.dx - 0.5, 0.0, g.nx - 1.0);
  const double fy = std::clamp((y - g.y0) / g.dy - 0.5, 0.0, g.ny - 1.0);
  const int i0 = std::min(static_cast<int>(fx), std::max(g.nx - 2, 0));
  const int j0 = std::min(static_cast<int>(fy), std::max(g.ny - 2, 0));
  const int i1 = std::min(i0 + 1, g.nx - 1);
  const int j1 = std::min(j0 + 1, g.ny - 1);
  const double tx = fx - i0;
  const double ty = fy - j0;
  return (1 - tx) * (1 - ty) * f[g.index(i0, j0)] + tx * (1 - ty) * f[g.index(i1, j0)] +
         (1 - tx) * ty * f[g.index(i0, j1)] + tx * ty * f[g.index(i1, j1)];
}

// Assembles A - sigma I where A E = beta^2 E. The eps-weighted second
// difference acts along the axis normal to the dominant field component so
// that the normal displacement eps E is continuous across interfaces.
SpMat assemble(const PermittivityMap& map, Polarization pol, double k0,
               double sigma, BoundaryCondition bc_x, BoundaryCondition bc_y) {
  const Grid2D& g = map.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * 5);
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  const bool weighted_x = pol == Polarization::QuasiTE;

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const auto p = static_cast<Eigen::Index>(g.index(i, j));
      const double e = map.eps[g.index(i, j)];
      double diag = k0 * k0 * e - sigma;

      auto axis = [&](bool weighted, int di, int dj, double inv2, bool has_prev,
                      bool has_next, BoundaryCondition bc) {
        for (int side = -1; side <= 1; side += 2) {
          const bool inside = side < 0 ? has_prev : has_next;
          if (inside) {
            const std::size_t q = g.index(i + side * di, j + side * dj);
            const double en = map.eps[q];
            const double w = weighted ? 2.0 * en / (e + en) : 1.0;
            const double wd = weighted ? 2.0 * e / (e + en) : 1.0;
            t.emplace_back(p, static_cast<Eigen::Index>(q), w * inv2);
            diag -= wd * inv2;
          } else if (bc == BoundaryCondition::ZeroField) {
            diag -= inv2;
          }
        }
      };
      axis(weighted_x, 1, 0, ix2, i > 0, i < g.nx - 1, bc_x);
      axis(!weighted_x, 0, 1, iy2, j > 0, j < g.ny - 1, bc_y);
      t.emplace_back(p, p, diag);
    }
  }
  SpMat a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

std::vector<Eigenpair> shift_invert(const SpMat& shifted, double sigma, int nev,
                                    double tol) {
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  if (lu.info() != Eigen::Success) {
    throw ConvergenceFailure("sparse LU factorization failed: " + lu.lastErrorMessage());
  }

  int n = static_cast<int>(shifted.rows());
  nev = std::min(nev, n - 2);
  if (nev < 1) throw ConvergenceFailure("operator too small for the eigensolver");
  int ncv = std::min(n, std::max(2 * nev + 1, 20));
  int ldv = n;
  int ido = 0;
  int info = 0;
  int lworkl = 3 * ncv * ncv + 6 * ncv;
  std::vector<double> resid(static_cast<std::size_t>(n));
  std::vector<double> v(static_cast<std::size_t>(n) * ncv);
  std::vector<double> workd(3 * static_cast<std::size_t>(n));
  std::vector<double> workl(static_cast<std::size_t>(lworkl));
  int iparam[11] = {0};
  int ipntr[14] = {0};
  iparam[0] = 1;
  iparam[2] = 3000;
  iparam[6] = 1;
  // Deterministic start vector so repeated solves are bitwise reproducible.
  for (int k = 0; k < n; ++k) resid[static_cast<std::size_t>(k)] = 1.0 + 0.1 * std::sin(0.37 * k);
  info = 1;

  std::vector<Eigenpair> pairs;
  std::lock_guard<std::mutex> lock(g_arpack_mutex);
  ++g_eigensolves;
  while (true) {
    dnaupd_(&ido, "I", &n, "LM", &nev, &tol, resid.data(), &ncv, v.data(), &ldv,
            iparam, ipntr, workd.data(), workl.data(), &lworkl, &info, 1, 2);
    if (ido == -1 || ido == 1) {
      Eigen::Map<Eigen::VectorXd> x(&workd[static_cast<std::size_t>(ipntr[0] - 1)], n);
      Eigen::Map<Eigen::VectorXd> y(&workd[static_cast<std::size_t>(ipntr[1] - 1)], n);
      y = lu.solve(x);
    } else {
      break;
    }
  }
  if (info < 0 || info == 1) {
    throw ConvergenceFailure("eigensolver iteration failed (info=" + std::to_string(info) + ")");
  }
  // Rayleigh-Ritz on the converged Schur basis. The basis left in v by
  // dneupd is reliable; its packed Ritz vectors are not.
  int rvec = 1;
  std::vector<int> select(static_cast<std::size_t>(ncv));
  std::vector<double> dr(static_cast<std::size_t>(nev) + 1);
  std::vector<double> di(static_cast<std::size_t>(nev) + 1);
  std::vector<double> z(static_cast<std::size_t>(n) * (nev + 1));
  std::vector<double> workev(3 * static_cast<std::size_t>(ncv));
  double sr = 0.0;
  double si = 0.0;
  int ldz = n;
  dneupd_(&rvec, "A", select.data(), dr.data(), di.data(), z.data(), &ldz, &sr,
          &si, workev.data(), "I", &n, "LM", &nev, &tol, resid.data(), &ncv,
          v.data(), &ldv, iparam, ipntr, workd.data(), workl.data(), &lworkl,
          &info, 1, 1, 2);
  if (info != 0) {
    throw ConvergenceFailure("eigenvector extraction failed (info=" + std::to_string(info) + ")");
  }
  const int nconv = std::min(iparam[4], nev);
  if (nconv < 1) throw ConvergenceFailure("eigensolver converged no eigenpairs");
  const Eigen::Map<const Eigen::MatrixXd> q(v.data(), n, nconv);
  const Eigen::MatrixXd aq = shifted * q;
  const Eigen::MatrixXd h = q.transpose() * aq;
  Eigen::EigenSolver<Eigen::MatrixXd> small(h);
  if (small.info() != Eigen::Success) {
    throw ConvergenceFailure("projected eigenproblem failed");
  }
  for (int k = 0; k < nconv; ++k) {
    const std::complex<double> lam = sigma + small.eigenvalues()(k);
    if (lam.imag() < 0.0) continue;  // keep one member of a conjugate pair
    Eigenpair e;
    e.lambda = lam.real();
    e.imag_ratio = std::abs(lam.imag()) / std::abs(lam);
    e.vec = q * small.eigenvectors().col(k).real();
    pairs.push_back(std::move(e));
  }
  return pairs;
}

int count_sign_changes(const std::vector<double>& line) {
  double peak = 0.0;
  for (double v : line) peak = std::max(peak, std::abs(v));
  int changes = 0;
  int last_sign = 0;
  for (double v : line) {
    if (std::abs(v) < 0.05 * peak) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

ModeSolution build_mode(const PermittivityMap& map, Polarization pol,
                        double omega, const Eigenpair& pair,
                        BoundaryCondition bc_x, BoundaryCondition bc_y,
                        const std::shared_ptr<const std::vector<float>>& eps_f) {
  const Grid2D& g = map.grid;
  const double k0 = omega / constants::speed_of_light;
  const double beta = std::sqrt(pair.lambda);
  const std::size_t n = g.size();
  std::vector<double> et(pair.vec.data(), pair.vec.data() + n);
  std::vector<double> ez(n, 0.0);

  // u_z = (i / (beta eps)) d(eps E_t)/d(normal axis), central differences.
  const bool along_x = pol == Polarization::QuasiTE;
  const BoundaryCondition bc = along_x ? bc_x : bc_y;
  const double h = along_x ? g.dx : g.dy;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t p = g.index(i, j);
      const double d_here = map.eps[p] * et[p];
      const int lo = along_x ? i - 1 : j - 1;
      const int hi = along_x ? i + 1 : j + 1;
      const int lim = along_x ? g.nx : g.ny;
      auto d_at = [&](int k) {
        if (k < 0 || k >= lim) return bc == BoundaryCondition::ZeroField ? 0.0 : d_here;
        const std::size_t q = along_x ? g.index(k, j) : g.index(i, k);
        return map.eps[q] * et[q];
      };
      ez[p] = (d_at(hi) - d_at(lo)) / (2.0 * h) / (beta * map.eps[p]);
    }
  }

  double norm = 0.0;
  double energy_t = 0.0;
  std::size_t peak_at = 0;
  for (std::size_t p = 0; p < n; ++p) {
    energy_t += map.eps[p] * et[p] * et[p];
    norm += map.eps[p] * (et[p] * et[p] + ez[p] * ez[p]);
    if (std::abs(et[p]) > std::abs(et[peak_at])) peak_at = p;
  }
  const double scale = (et[peak_at] < 0.0 ? -1.0 : 1.0) / std::sqrt(norm * g.dx * g.dy);

  auto field = std::make_shared<ModeField>();
  field->grid = g;
  field->polarization = pol;
  field->eps = eps_f;
  field->et.resize(n);
  field->ez.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    field->et[p] = static_cast<float>(et[p] * scale);
    field->ez[p] = static_cast<float>(ez[p] * scale);
  }

  ModeSolution m;
  m.polarization = pol;
  m.omega = omega;
  m.n_eff = beta / k0;
  m.n_g = std::numeric_limits<double>::quiet_NaN();
  m.polarization_fraction = energy_t / norm;
  m.eig_imag_ratio = pair.imag_ratio;

  const double peak = std::abs(et[peak_at]);
  double edge = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    if (bc_y == BoundaryCondition::ZeroField) {
      edge = std::max({edge, std::abs(et[g.index(i, 0)]), std::abs(et[g.index(i, g.ny - 1)])});
    }
  }
  for (int j = 0; j < g.ny; ++j) {
    if (bc_x == BoundaryCondition::ZeroField) {
      edge = std::max({edge, std::abs(et[g.index(0, j)]), std::abs(et[g.index(g.nx - 1, j)])});
    }
  }
  m.tail_ratio = edge / peak;

  const int pi = static_cast<int>(peak_at % static_cast<std::size_t>(g.nx));
  const int pj = static_cast<int>(peak_at / static_cast<std::size_t>(g.nx));
  std::vector<double> row(static_cast<std::size_t>(g.nx));
  std::vector<double> col(static_cast<std::size_t>(g.ny));
  for (int i = 0; i < g.nx; ++i) row[static_cast<std::size_t>(i)] = et[g.index(i, pj)];
  for (int j = 0; j < g.ny; ++j) col[static_cast<std::size_t>(j)] = et[g.index(pi, j)];
  m.nodes_x = count_sign_changes(row);
  m.nodes_y = count_sign_changes(col);
  m.family = to_string(pol) + std::to_string(m.nodes_x) + std::to_string(m.nodes_y);
  m.field = std::move(field);
  return m;
}

}  // namespace

std::string to_string(Polarization pol) {
  return pol == Polarization::QuasiTE ? "TE" : "TM";
}

double ModeField::et_at(double x, double y) const {
  return interp_bilinear(grid, et, x, y);
}

double ModeField::ez_at(double x, double y) const {
  return interp_bilinear(grid, ez, x, y);
}

double ModeSolution::beta() const {
  return n_eff * omega / constants::speed_of_light;
}

double ModeSolution::uz_abs2(double x, double y) const {
  if (!field) throw DomainError("mode has no stored field");
  const double v = field->ez_at(x, y);
  return v * v;
}

std::vector<ModeSolution> solve_modes_on_map(const PermittivityMap& map,
                                             double omega, const GridSpec& grid,
                                             const SolveOptions& options) {
  if (options.n_modes < 1) throw DomainError("n_modes must be >= 1");
  if (!(omega > 0.0)) throw DomainError("omega must be > 0");
  const double k0 = omega / constants::speed_of_light;
  double eps_max = 0.0;
  for (double e : map.eps) eps_max = std::max(eps_max, e);
  const double n_clad = map.max_cladding_index();
  const double n_top = std::sqrt(eps_max);
  std::vector<ModeSolution> modes;
  if (!(n_top > n_clad * (1.0 + 1e-12))) {
    throw NoGuidedMode("no index contrast: core index does not exceed the claddings");
  }
  // Shift slightly above the largest possible eigenvalue.
  const double sigma = k0 * k0 * eps_max * (1.0 + 1e-6);

  auto eps_f = std::make_shared<std::vector<float>>(map.eps.begin(), map.eps.end());
  std::vector<Polarization> pols;
  if (options.quasi_tm) pols.push_back(Polarization::QuasiTM);
  if (options.quasi_te) pols.push_back(Polarization::QuasiTE);
  for (Polarization pol : pols) {
    const SpMat a = assemble(map, pol, k0, sigma, grid.bc_x, grid.bc_y);
    const auto pairs = shift_invert(a, sigma, options.n_modes, options.tolerance);
    for (const auto& pair : pairs) {
      if (!(pair.lambda > 0.0)) continue;
      const double n_eff = std::sqrt(pair.lambda) / k0;
      if (!(n_eff > n_clad) || !(n_eff < n_top)) continue;
      ModeSolution m = build_mode(map, pol, omega, pair, grid.bc_x, grid.bc_y, eps_f);
      if (m.tail_ratio > options.max_tail_ratio) continue;
      modes.push_back(std::move(m));
    }
  }
  if (modes.empty()) {
    throw NoGuidedMode("no guided mode above the cladding light line at omega=" +
                       std::to_string(omega));
  }
  std::sort(modes.begin(), modes.end(),
            [](const ModeSolution& a, const ModeSolution& b) { return a.n_eff > b.n_eff; });
  if (static_cast<int>(modes.size()) > options.n_modes * static_cast<int>(pols.size())) {
    modes.resize(static_cast<std::size_t>(options.n_modes) * pols.size());
  }
  return modes;
}

std::vector<ModeSolution> solve_modes(const WaveguideGeometry& geometry,
                                      const MaterialLibrary& materials,
                                      double omega, const GridSpec& grid,
                                      const SolveOptions& options) {
  const PermittivityMap map = permittivity_profile(geometry, materials, omega, grid);
  return solve_modes_on_map(map, omega, grid, options);
}

double mode_overlap(const ModeSolution& a, const ModeSolution& b) {
  if (!a.field || !b.field) throw DomainError("mode overlap needs stored fields");
  const ModeField& fa = *a.field;
  const ModeField& fb = *b.field;
  if (fa.grid.nx != fb.grid.nx || fa.grid.ny != fb.grid.ny) {
    throw GridMismatch("mode overlap between different grids");
  }
  const bool same_axis = fa.polarization == fb.polarization;
  double s = 0.0;
  for (std::size_t p = 0; p < fa.et.size(); ++p) {
    const double e = 0.5 * ((*fa.eps)[p] + (*fb.eps)[p]);
    double dot = static_cast<double>(fa.ez[p]) * fb.ez[p];
    if (same_axis) dot += static_cast<double>(fa.et[p]) * fb.et[p];
    s += e * dot;
  }
  return std::abs(s) * fa.grid.dx * fa.grid.dy;
}

std::uint64_t eigensolve_count() { return g_eigensolves.load(); }

}  // namespace fewg
