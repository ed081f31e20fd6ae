#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kw/duhamel.hpp"
#include "kw/semigroup.hpp"
#include "kw/state.hpp"

namespace kw {

// mu > 0, 0 < kappa^2 <= mu^2, pressure P(rho) = a rho^gamma with a > 0, gamma >= 1.
struct KortewegParams {
  double mu = 1.0;
  double kappa = 1.0;
  double rho_bar = 1.0;
  double pressure_a = 1.0;
  double pressure_gamma = 1.0;

  static KortewegParams make(double mu, double kappa, double rho_bar = 1.0, double a = 1.0, double gamma = 1.0);
  void validate() const;

  double root() const;  // sqrt(mu^2 - kappa^2)
  double c1() const { return mu - root(); }
  double c2() const { return mu + root(); }
  double beta() const { return pressure_derivative(rho_bar); }
  bool degenerate() const { return root() == 0.0; }
  double pressure(double rho) const;
  double pressure_derivative(double rho) const;
};

enum class MapKind { local, global, hybrid };
// Diffusion paired with m2 in the global map: c2 keeps the (q, m2) mass equation exact;
// c1 follows the alternative display and is kept for comparison only.
enum class Psi2Pairing { eq381, eq386 };
// Pressure forcing: grad P(rho) (local map) or grad(P(rho) - P(rho_bar) - beta q) (global map).
enum class PressureForm { full, perturbation };

LinearParams system1(const KortewegParams& p);
LinearParams system2(const KortewegParams& p, Psi2Pairing pairing);

// q = rho - rho_bar, m_i = rho u + c_i grad rho.
MildState effective_momenta(const SpectralField& rho, const SpectralField& u, const KortewegParams& p);

struct Primitive {
  SpectralField rho;
  SpectralField u;
  SpectralField grad_rho;
};
Primitive reconstruct(const MildState& s, const KortewegParams& p);

struct NonlinearSwitches {
  bool tensor = true;
  bool pressure = true;
};

struct NonlinearTerms {
  SpectralField tensor;    // F1 = div((m1 (x) m2 + m2 (x) m1) / (2 rho))
  SpectralField pressure;  // per PressureForm
  double min_rho = 0.0;
};
// Products on the 2/3-dealiased grid; throws VacuumError when rho <= 0 somewhere.
NonlinearTerms nonlinear_rhs(const MildState& s, const KortewegParams& p, PressureForm form,
                             const NonlinearSwitches& sw = {});

struct MapOptions {
  MapKind kind = MapKind::local;
  Psi2Pairing pairing = Psi2Pairing::eq381;
  double T_split = 0.0;
  NonlinearSwitches switches;
  int slabs = 1;
};

// Fixed-point maps on one slab. `in` holds states at grid.nodes(); `data` is the state at
// grid.start(), and Duhamel integrals run from grid.start().
Trajectory local_map_psi(const Trajectory& in, const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                         const MapOptions& opt);
Trajectory global_map_psi3(const Trajectory& in, const MildState& data, const TimeGrid& grid,
                           const KortewegParams& p, const MapOptions& opt);
// psi at nodes t <= T_split, psi3 after; both integrate from grid.start().
Trajectory hybrid_map_psi4(const Trajectory& in, const MildState& data, const TimeGrid& grid,
                           const KortewegParams& p, const MapOptions& opt);
Trajectory apply_map(const Trajectory& in, const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                     const MapOptions& opt);
// Linear part of the selected map applied to the data.
Trajectory free_evolution(const MildState& data, const TimeGrid& grid, const KortewegParams& p,
                          const MapOptions& opt);

struct FixedPointConfig {
  double R = 0.0;
  double R1 = 0.0;
  double T = 0.0;
  double M = 0.0;  // rho >= 1/M is monitored
  double weight_beta = 1.0;
  double eps1 = std::numeric_limits<double>::infinity();
  double tol = 1e-8;
  int max_iter = 50;
  double s1 = 0.9;  // W weight for the X distance
};

// E_{R,M,T} distance: E_T(m1) + E_T(m2) + sup|q| / weight_beta, with times measured from t0.
double erm_distance(const Trajectory& a, const Trajectory& b, double t0, double weight_beta);
// X_{N/2} distance.
double x_distance(const Trajectory& a, const Trajectory& b, double t0, double s1);

struct IterationRecord {
  int slab = 0;
  int iteration = 0;
  double distance = 0.0;
  double ratio = 0.0;  // distance / previous distance; 0 on the first iteration
  double min_rho = 0.0;
  double seconds = 0.0;
};

struct IterationReport {
  std::string norm;
  std::vector<IterationRecord> records;
  double contraction_factor = 0.0;  // geometric fit over the resolved distances
  bool converged = false;
  double residual = 0.0;             // max strong-form residual at interior nodes
  double smallness = 0.0;            // measured initial smallness (bmo sum or Besov size)

  std::vector<double> distances(int slab = 0) const;
  // wall_time = false drops the only nondeterministic column.
  void write_csv(std::ostream& os, bool wall_time = true) const;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, IterationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const IterationReport& report() const { return report_; }

 private:
  IterationReport report_;
};

// Geometric rate of a distance sequence: exp of the least-squares slope of log d_k over the
// entries above the round-off floor (1e-13 of the first entry). Needs two such entries.
double fit_contraction(const std::vector<double>& distances);

// Sum of the four bmo_T norms of P and Q parts of m1(0), m2(0).
double bmo_smallness(const MildState& data, double T);
// Size of the data in the global-theorem norm: q in B^{N/2-1} cap B^{N/2} cap L^inf, u in B^{N/2-1}.
double besov_smallness(const MildState& data, const KortewegParams& p);

// Iterates the selected map from the free evolution until successive distances drop below
// cfg.tol. Three consecutive ratios >= 1, or an iterate reaching rho <= 0, raise DivergenceError
// carrying the report; vacuum in the data raises VacuumError.
std::pair<Trajectory, IterationReport> picard_solve(const MildState& data, const KortewegParams& p,
                                                    const FixedPointConfig& cfg, const MapOptions& opt,
                                                    const TimeGrid& grid);

struct ResidualReport {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> residual;  // L2 residual per equation and node
  double max_interior() const;
};
// Strong-form residuals of the four equations with three-point time differences.
ResidualReport residual_check(const Trajectory& traj, const KortewegParams& p);

}  // namespace kw
