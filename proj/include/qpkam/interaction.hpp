#ifndef QPKAM_INTERACTION_HPP
#define QPKAM_INTERACTION_HPP

#include <optional>
#include <vector>

#include "qpkam/cohomology.hpp"
#include "qpkam/fourier_series.hpp"
#include "qpkam/frequency.hpp"
#include "qpkam/grid.hpp"

namespace qpkam {

// One multiplicative factor of an interaction term: either a single-argument
// series f(zeta_site), or a kernel g(e.(zeta_a - zeta_b)) of the scalar
// difference along a lattice direction e.
struct Factor {
  enum class Kind { Site, Difference };

  Kind kind = Kind::Site;
  int site = 0;                // Site
  int site_a = 0, site_b = 0;  // Difference
  std::vector<int> direction;  // e in Z^d, Difference only
  FourierSeries series;        // dim d (Site) or dim 1 (Difference)

  bool depends_on(int s) const {
    return kind == Kind::Site ? site == s : (site_a == s || site_b == s);
  }
};

struct InteractionTerm {
  double coeff = 1.0;
  std::vector<Factor> factors;
};

// One interaction of range L acting on (zeta_0, ..., zeta_L). The periodic
// part is a sum of factor products; an exactly quadratic nearest-neighbor
// term (range 1 only) is carried by `twist`, whose Euler-Lagrange
// contribution is twist * (h(.+wa) + h(.-wa) - 2h) and whose second
// derivative matrix is constant: +twist mixed, -twist diagonal.
struct Interaction {
  int range = 0;
  double twist = 0.0;
  std::vector<InteractionTerm> terms;
  std::optional<double> bound_M;  // user-supplied M_L; estimated when absent

  bool has_periodic_part() const { return !terms.empty(); }
};

struct Tolerances {
  double drop_rel = 1e-16;        // relative coefficient drop threshold
  double divisor_floor = 0.0;     // 0 = derive from scanned nu and cutoff
  double reciprocal_floor = 1e-8;
  double neumann_tol = 1e-13;
  int neumann_max_terms = 64;
  double zero_average_tol = 1e-9;
  double c_floor = 1e-3;
};

// Immutable problem description: interactions + frequency + Gevrey data +
// truncation policy. rbar is fixed at construction from the reference hull
// via rbar^beta / d^(beta-1) - d R0^beta = ||h_ref|| + margin.
class Model {
 public:
  Model(std::vector<Interaction> interactions, Frequency freq, GevreyParams gevrey, int cutoff,
        int padding = 2, Tolerances tol = {}, const FourierSeries* reference_hull = nullptr);

  const std::vector<Interaction>& interactions() const { return interactions_; }
  const Frequency& freq() const { return freq_; }
  const GevreyParams& gevrey() const { return gevrey_; }
  const Tolerances& tol() const { return tol_; }
  const GridSpec& grid() const { return grid_; }
  int dim() const { return freq_.dim(); }
  int cutoff() const { return cutoff_; }
  int max_range() const { return max_range_; }
  double rbar() const { return rbar_; }

  // Effective M_L per interaction (user value or the flagged estimate).
  double interaction_bound(std::size_t index) const { return bounds_[index]; }
  bool interaction_bound_estimated(std::size_t index) const { return bound_estimated_[index]; }

  FourierSeries zero_series() const { return FourierSeries(dim(), cutoff_); }

 private:
  std::vector<Interaction> interactions_;
  Frequency freq_;
  GevreyParams gevrey_;
  Tolerances tol_;
  GridSpec grid_;
  int cutoff_ = 0;
  int max_range_ = 0;
  double rbar_ = 0.0;
  std::vector<double> bounds_;
  std::vector<bool> bound_estimated_;
};

// l = 1 + directional derivative of h along alpha.
FourierSeries hull_l(const FourierSeries& h, std::span<const double> alpha);

// Equilibrium residual E[h](sigma) = sum_L sum_{k=0..L} d_alpha^(k) H_L
// evaluated along the orbit, plus the twist Laplacian term.
FourierSeries residual(const Model& model, const FourierSeries& h, TailStats* tail = nullptr);

// d/dtheta E[h] = directional derivative of the residual along alpha.
FourierSeries residual_theta_derivative(const Model& model, const FourierSeries& h,
                                        TailStats* tail = nullptr);

// Linearization: (DE[h] delta)(sigma) =
//   sum_L sum_{k,j} d^(k) d^(j) H_L(gamma^(-k)(sigma)) delta(sigma + (j-k) w a).
FourierSeries linearized_apply(const Model& model, const FourierSeries& h,
                               const FourierSeries& delta, TailStats* tail = nullptr);

// C_{j,k,L}(sigma) = d^(k) d^(j) H_L(gamma^(-k)(sigma)) l(sigma) l(sigma+(j-k) w a),
// summed over the model's interactions of range L.
FourierSeries coefficient_C(const Model& model, const FourierSeries& h, int j, int k, int range,
                            TailStats* tail = nullptr);

// G eta = sum_{L>=2} sum_{0<=j<k<=L} L^+_{k-j} [ C_{j,k,L} . R^-_{j-k} eta ].
FourierSeries apply_G(const Model& model, const FourierSeries& h, const FourierSeries& eta,
                      TailStats* tail = nullptr);

// (N+)^2 sum_{L>=2} M_L sum_{0<=j<k<=L} (k-j)^2 — the exact sum behind the
// operator-norm bound on G.
double delta_bound(const Model& model, double n_plus);

// Composition-domain budget: d R^beta + ||h||_{beta,R} + candidate stays
// within rbar^beta / d^(beta-1). radius <= 0 means the model's R0.
bool compose_check(const Model& model, const FourierSeries& h, double candidate_delta_norm,
                   double radius = -1.0);

// Non-rigorous upper bound for max_{r=0..3} ||D^r H_L|| at rbar from the
// factor tables (combinatorial product-rule envelope).
double estimate_interaction_bound(const Interaction& inter, int dim, double beta, double rbar);

// The mixed derivative d^(0) d^(1) of the range-1 part as a joint series on
// T^{2d} (twist constant plus periodic corrections); empty optional when the
// model has no range-1 interaction.
std::optional<FourierSeries> joint_mixed_derivative(const Model& model);

// ||(d^(0) d^(1) H_1)^{-1}||_{F_{beta, rbar}} on the joint torus. When every
// periodic range-1 term is a kernel of one difference line the reciprocal is
// computed exactly in 1-D at a deep cutoff; otherwise the joint table is
// lifted to an affordable cutoff and the weighted edge mass is reported.
struct MixedInverseBound {
  double bound = 0.0;
  double tail_weighted = 0.0;  // weighted mass at the working band edge
  bool line_reduced = false;
  bool has_range1 = false;
};
MixedInverseBound mixed_inverse_bound(const Model& model, double reciprocal_floor);

}  // namespace qpkam

#endif
