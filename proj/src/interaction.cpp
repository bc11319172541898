#include "qpkam/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace qpkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> step_vector(const Frequency& freq, int n) {
  std::vector<double> t(freq.alpha.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = n * freq.omega * freq.alpha[i];
  return t;
}

double dot_alpha(const std::vector<double>& alpha, std::span<const int> k) {
  double s = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * k[i];
  return s;
}

// Grid-point coordinates and the shifted-hull fields psi_j = h(. + j w a),
// built lazily per (model, h) pair.
class ArgFields {
 public:
  ArgFields(const Model& model, const FourierSeries& h) : model_(model), h_(h) {
    const GridSpec& g = model.grid();
    const std::int64_t total = g.total_points();
    coords_.resize(static_cast<std::size_t>(total) * g.dim);
    for (std::int64_t p = 0; p < total; ++p) {
      std::int64_t rest = p;
      for (int i = g.dim - 1; i >= 0; --i) {
        const int m = static_cast<int>(rest % g.points);
        rest /= g.points;
        coords_[static_cast<std::size_t>(p) * g.dim + i] = kTwoPi * m / g.points;
      }
    }
  }

  const std::vector<double>& psi(int j) {
    auto it = cache_.find(j);
    if (it != cache_.end()) return it->second;
    FourierSeries shifted = shift(h_, step_vector(model_.freq(), j));
    auto [ins, _] = cache_.emplace(j, eval_grid(shifted, model_.grid()));
    return ins->second;
  }

  double coord(std::int64_t p, int axis) const {
    return coords_[static_cast<std::size_t>(p) * model_.grid().dim + axis];
  }

  const Model& model() const { return model_; }

 private:
  const Model& model_;
  const FourierSeries& h_;
  std::vector<double> coords_;
  std::map<int, std::vector<double>> cache_;
};

// Values of one factor (with directional derivatives applied at the listed
// sites) along the displaced orbit points of gamma^(base_shift).
std::vector<Complex> eval_factor(const Factor& fac, std::span<const int> deriv_sites,
                                 int base_shift, ArgFields& fields) {
  const Model& model = fields.model();
  const GridSpec& grid = model.grid();
  const std::vector<double>& alpha = model.freq().alpha;
  const double omega = model.freq().omega;
  const std::int64_t total = grid.total_points();
  std::vector<Complex> out(static_cast<std::size_t>(total), Complex(0.0, 0.0));

  if (fac.kind == Factor::Kind::Site) {
    const int j = base_shift + fac.site;
    const std::vector<double>& psi = fields.psi(j);
    fac.series.for_each([&](const Mode& q, Complex c) {
      const double qa = dot_alpha(alpha, std::span<const int>(q.data(), alpha.size()));
      Complex amp = c;
      for (std::size_t r = 0; r < deriv_sites.size(); ++r) amp *= Complex(0.0, qa);
      if (amp == Complex(0.0, 0.0)) return;
      const double phase0 = j * omega * qa;
      for (std::int64_t p = 0; p < total; ++p) {
        double phase = phase0 + qa * psi[static_cast<std::size_t>(p)];
        for (int i = 0; i < grid.dim; ++i) phase += q[i] * fields.coord(p, i);
        out[static_cast<std::size_t>(p)] += amp * std::polar(1.0, phase);
      }
    });
    return out;
  }

  // Difference kernel g(e.(zeta_a - zeta_b)): the e.sigma parts cancel, so
  // the argument is a scalar field built from the psi difference.
  const double ea = dot_alpha(alpha, fac.direction);
  const int ja = base_shift + fac.site_a;
  const int jb = base_shift + fac.site_b;
  const std::vector<double>& psi_a = fields.psi(ja);
  const std::vector<double>& psi_b = fields.psi(jb);
  const double t_const = (fac.site_a - fac.site_b) * omega * ea;
  fac.series.for_each([&](const Mode& q, Complex c) {
    const int qi = q[0];
    Complex amp = c;
    for (int site : deriv_sites) {
      amp *= Complex(0.0, site == fac.site_a ? qi * ea : -qi * ea);
    }
    if (amp == Complex(0.0, 0.0)) return;
    for (std::int64_t p = 0; p < total; ++p) {
      const double t = t_const + ea * (psi_a[static_cast<std::size_t>(p)] -
                                       psi_b[static_cast<std::size_t>(p)]);
      out[static_cast<std::size_t>(p)] += amp * std::polar(1.0, qi * t);
    }
  });
  return out;
}

// d_alpha^(sites...) applied to one term via the product rule: every way of
// assigning the requested derivative sites to factors that depend on them.
void accumulate_term_derivative(const InteractionTerm& term, std::span<const int> deriv_sites,
                                int base_shift, ArgFields& fields, std::vector<double>& total) {
  const std::size_t nf = term.factors.size();
  const std::int64_t npts = fields.model().grid().total_points();

  std::vector<std::size_t> choice(deriv_sites.size(), 0);
  std::vector<std::vector<int>> assigned(nf);

  const std::size_t nd = deriv_sites.size();
  std::vector<std::vector<std::size_t>> candidates(nd);
  for (std::size_t d = 0; d < nd; ++d) {
    for (std::size_t f = 0; f < nf; ++f) {
      if (term.factors[f].depends_on(deriv_sites[d])) candidates[d].push_back(f);
    }
    if (candidates[d].empty()) return;  // derivative annihilates the term
  }

  std::vector<std::size_t> pick(nd, 0);
  while (true) {
    for (auto& a : assigned) a.clear();
    for (std::size_t d = 0; d < nd; ++d) {
      assigned[candidates[d][pick[d]]].push_back(deriv_sites[d]);
    }
    std::vector<Complex> prod(static_cast<std::size_t>(npts), Complex(term.coeff, 0.0));
    for (std::size_t f = 0; f < nf; ++f) {
      std::vector<Complex> vals = eval_factor(term.factors[f], assigned[f], base_shift, fields);
      for (std::int64_t p = 0; p < npts; ++p) {
        prod[static_cast<std::size_t>(p)] *= vals[static_cast<std::size_t>(p)];
      }
    }
    for (std::int64_t p = 0; p < npts; ++p) {
      total[static_cast<std::size_t>(p)] += prod[static_cast<std::size_t>(p)].real();
    }

    std::size_t d = 0;
    while (d < nd && ++pick[d] == candidates[d].size()) {
      pick[d] = 0;
      ++d;
    }
    if (d == nd) break;
    if (nd == 0) break;
  }
}

void accumulate_interaction_derivative(const Interaction& inter, std::span<const int> deriv_sites,
                                       int base_shift, ArgFields& fields,
                                       std::vector<double>& total) {
  for (const InteractionTerm& term : inter.terms) {
    accumulate_term_derivative(term, deriv_sites, base_shift, fields, total);
  }
}

FourierSeries lift(const FourierSeries& f, const Model& model) {
  if (f.dim() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "series dim does not match the model");
  }
  if (f.cutoff() > model.cutoff()) {
    throw Error(ErrorCode::InvalidArgument, "series cutoff exceeds the model cutoff");
  }
  return f.cutoff() == model.cutoff() ? f : f.with_cutoff(model.cutoff());
}

void require_composition_domain(const Model& model, const FourierSeries& h) {
  if (!compose_check(model, h, 0.0)) {
    throw Error(ErrorCode::CompositionDomainExceeded,
                "hull norm leaves the composition domain of the interactions");
  }
}

// twist * (f(.+wa) + f(.-wa) - 2 f), assembled exactly in coefficients.
FourierSeries twist_laplacian(const FourierSeries& f, double twist, const Frequency& freq) {
  FourierSeries out = shift(f, step_vector(freq, 1));
  out += shift(f, step_vector(freq, -1));
  out -= f;
  out -= f;
  out *= Complex(twist, 0.0);
  return out;
}

double total_twist(const Model& model) {
  double a = 0.0;
  for (const Interaction& inter : model.interactions()) {
    if (inter.range == 1) a += inter.twist;
  }
  return a;
}

void validate_interaction(const Interaction& inter, int dim) {
  if (inter.range < 0) throw Error(ErrorCode::ValidationError, "interaction range must be >= 0");
  if (inter.twist != 0.0 && inter.range != 1) {
    throw Error(ErrorCode::ValidationError, "twist is only meaningful for range 1");
  }
  for (const InteractionTerm& term : inter.terms) {
    if (term.factors.empty()) {
      throw Error(ErrorCode::ValidationError, "interaction term needs at least one factor");
    }
    for (const Factor& fac : term.factors) {
      if (fac.kind == Factor::Kind::Site) {
        if (fac.site < 0 || fac.site > inter.range) {
          throw Error(ErrorCode::ValidationError, "factor site outside 0..L");
        }
        if (fac.series.dim() != dim) {
          throw Error(ErrorCode::ValidationError, "site factor series must live on T^d");
        }
      } else {
        if (fac.site_a < 0 || fac.site_a > inter.range || fac.site_b < 0 ||
            fac.site_b > inter.range || fac.site_a == fac.site_b) {
          throw Error(ErrorCode::ValidationError, "difference kernel needs two distinct sites in 0..L");
        }
        if (fac.series.dim() != 1) {
          throw Error(ErrorCode::ValidationError, "difference kernel series must be 1-dimensional");
        }
        if (fac.direction.size() != static_cast<std::size_t>(dim)) {
          throw Error(ErrorCode::ValidationError, "difference kernel direction must have d entries");
        }
        bool nonzero = false;
        for (int e : fac.direction) nonzero = nonzero || e != 0;
        if (!nonzero) {
          throw Error(ErrorCode::ValidationError, "difference kernel direction must be nonzero");
        }
      }
      const double scale = std::max(1.0, fac.series.max_abs_coeff());
      if (fac.series.hermitian_defect() > 1e-12 * scale) {
        throw Error(ErrorCode::ValidationError, "factor series must be real (Hermitian)");
      }
    }
  }
}

}  // namespace

Model::Model(std::vector<Interaction> interactions, Frequency freq, GevreyParams gevrey,
             int cutoff, int padding, Tolerances tol, const FourierSeries* reference_hull)
    : interactions_(std::move(interactions)),
      freq_(std::move(freq)),
      gevrey_(gevrey),
      tol_(tol),
      cutoff_(cutoff) {
  gevrey_.validate();
  if (cutoff_ < 1) throw Error(ErrorCode::ValidationError, "model cutoff must be >= 1");
  if (freq_.dim() < 1) throw Error(ErrorCode::ValidationError, "frequency must carry alpha");
  for (const Interaction& inter : interactions_) validate_interaction(inter, freq_.dim());
  grid_ = GridSpec::for_cutoff(freq_.dim(), cutoff_, padding);
  for (const Interaction& inter : interactions_) max_range_ = std::max(max_range_, inter.range);
  if (freq_.nu <= 0.0) freq_.estimate();

  const int d = freq_.dim();
  const double beta = gevrey_.beta;
  double href_norm = 0.0;
  if (reference_hull != nullptr) href_norm = gevrey_norm(*reference_hull, gevrey_);
  rbar_ = std::pow(
      std::pow(static_cast<double>(d), beta - 1.0) *
          (d * std::pow(gevrey_.radius, beta) + href_norm + gevrey_.margin),
      1.0 / beta);

  bounds_.reserve(interactions_.size());
  bound_estimated_.reserve(interactions_.size());
  for (const Interaction& inter : interactions_) {
    if (inter.bound_M.has_value()) {
      bounds_.push_back(*inter.bound_M);
      bound_estimated_.push_back(false);
    } else {
      bounds_.push_back(estimate_interaction_bound(inter, d, beta, rbar_));
      bound_estimated_.push_back(true);
    }
  }
}

FourierSeries hull_l(const FourierSeries& h, std::span<const double> alpha) {
  FourierSeries l = directional_derivative(h, alpha);
  l.add_coeff(Mode{}, Complex(1.0, 0.0));
  return l;
}

FourierSeries residual(const Model& model, const FourierSeries& h, TailStats* tail) {
  require_composition_domain(model, h);
  const FourierSeries hull = lift(h, model);
  FourierSeries out = model.zero_series();

  bool any_periodic = false;
  for (const Interaction& inter : model.interactions()) {
    any_periodic = any_periodic || inter.has_periodic_part();
  }
  if (any_periodic) {
    ArgFields fields(model, hull);
    std::vector<double> total(static_cast<std::size_t>(model.grid().total_points()), 0.0);
    for (const Interaction& inter : model.interactions()) {
      if (!inter.has_periodic_part()) continue;
      for (int k = 0; k <= inter.range; ++k) {
        const int sites[1] = {k};
        accumulate_interaction_derivative(inter, sites, -k, fields, total);
      }
    }
    out = from_grid(total, model.grid(), model.cutoff(), tail);
  }

  for (const Interaction& inter : model.interactions()) {
    if (inter.range == 1 && inter.twist != 0.0) {
      out += twist_laplacian(hull, inter.twist, model.freq());
    }
  }
  TailStats dropped = out.drop_small(model.tol().drop_rel);
  if (tail != nullptr) *tail += dropped;
  return out;
}

FourierSeries residual_theta_derivative(const Model& model, const FourierSeries& h,
                                        TailStats* tail) {
  return directional_derivative(residual(model, h, tail), model.freq().alpha);
}

FourierSeries linearized_apply(const Model& model, const FourierSeries& h,
                               const FourierSeries& delta, TailStats* tail) {
  require_composition_domain(model, h);
  const FourierSeries hull = lift(h, model);
  const FourierSeries dlt = lift(delta, model);
  FourierSeries out = model.zero_series();

  bool any_periodic = false;
  for (const Interaction& inter : model.interactions()) {
    any_periodic = any_periodic || inter.has_periodic_part();
  }
  if (any_periodic) {
    ArgFields fields(model, hull);
    const std::int64_t npts = model.grid().total_points();
    std::vector<double> total(static_cast<std::size_t>(npts), 0.0);
    std::vector<double> mixed(static_cast<std::size_t>(npts));
    for (const Interaction& inter : model.interactions()) {
      if (!inter.has_periodic_part()) continue;
      for (int k = 0; k <= inter.range; ++k) {
        for (int j = 0; j <= inter.range; ++j) {
          std::fill(mixed.begin(), mixed.end(), 0.0);
          const int sites[2] = {k, j};
          accumulate_interaction_derivative(inter, sites, -k, fields, mixed);
          bool all_zero = true;
          for (double v : mixed) all_zero = all_zero && v == 0.0;
          if (all_zero) continue;
          std::vector<double> dvals =
              eval_grid(shift(dlt, step_vector(model.freq(), j - k)), model.grid());
          for (std::int64_t p = 0; p < npts; ++p) {
            total[static_cast<std::size_t>(p)] +=
                mixed[static_cast<std::size_t>(p)] * dvals[static_cast<std::size_t>(p)];
          }
        }
      }
    }
    out = from_grid(total, model.grid(), model.cutoff(), tail);
  }

  for (const Interaction& inter : model.interactions()) {
    if (inter.range == 1 && inter.twist != 0.0) {
      out += twist_laplacian(dlt, inter.twist, model.freq());
    }
  }
  TailStats dropped = out.drop_small(model.tol().drop_rel);
  if (tail != nullptr) *tail += dropped;
  return out;
}

FourierSeries coefficient_C(const Model& model, const FourierSeries& h, int j, int k, int range,
                            TailStats* tail) {
  if (j < 0 || j > range || k < 0 || k > range) {
    throw Error(ErrorCode::InvalidArgument, "coefficient_C needs 0 <= j,k <= L");
  }
  require_composition_domain(model, h);
  const FourierSeries hull = lift(h, model);
  const std::int64_t npts = model.grid().total_points();
  std::vector<double> mixed(static_cast<std::size_t>(npts), 0.0);

  ArgFields fields(model, hull);
  for (const Interaction& inter : model.interactions()) {
    if (inter.range != range) continue;
    if (inter.has_periodic_part()) {
      const int sites[2] = {k, j};
      accumulate_interaction_derivative(inter, sites, -k, fields, mixed);
    }
    if (inter.range == 1 && inter.twist != 0.0) {
      const double c = (j != k) ? inter.twist : -inter.twist;
      for (double& v : mixed) v += c;
    }
  }

  const FourierSeries l = hull_l(hull, model.freq().alpha);
  std::vector<double> lv = eval_grid(l, model.grid());
  std::vector<double> lv_shift = eval_grid(shift(l, step_vector(model.freq(), j - k)), model.grid());
  for (std::int64_t p = 0; p < npts; ++p) {
    mixed[static_cast<std::size_t>(p)] *=
        lv[static_cast<std::size_t>(p)] * lv_shift[static_cast<std::size_t>(p)];
  }
  FourierSeries out = from_grid(mixed, model.grid(), model.cutoff(), tail);
  TailStats dropped = out.drop_small(model.tol().drop_rel);
  if (tail != nullptr) *tail += dropped;
  return out;
}

FourierSeries apply_G(const Model& model, const FourierSeries& h, const FourierSeries& eta,
                      TailStats* tail) {
  const double mean = std::abs(average(eta));
  if (mean > 1e-10 * std::max(1e-300, l1_norm(eta))) {
    throw Error(ErrorCode::NonzeroAverage, "apply_G requires a zero-average input");
  }
  FourierSeries acc = model.zero_series();
  std::set<int> ranges;
  for (const Interaction& inter : model.interactions()) {
    if (inter.range >= 2) ranges.insert(inter.range);
  }
  if (ranges.empty()) return acc;

  const FourierSeries eta_lifted = lift(eta, model);
  for (int range : ranges) {
    for (int k = 1; k <= range; ++k) {
      for (int j = 0; j < k; ++j) {
        FourierSeries c = coefficient_C(model, h, j, k, range, tail);
        FourierSeries r = apply_R(eta_lifted, j - k, -1, model.freq());
        FourierSeries prod = multiply(c, r, model.grid(), tail);
        acc += apply_L(prod, k - j, 1, model.freq());
      }
    }
  }
  return acc;
}

double delta_bound(const Model& model, double n_plus) {
  double sum = 0.0;
  for (std::size_t i = 0; i < model.interactions().size(); ++i) {
    const Interaction& inter = model.interactions()[i];
    if (inter.range < 2) continue;
    double pairs = 0.0;
    for (int k = 1; k <= inter.range; ++k) {
      for (int j = 0; j < k; ++j) pairs += static_cast<double>((k - j)) * (k - j);
    }
    sum += model.interaction_bound(i) * pairs;
  }
  return n_plus * n_plus * sum;
}

bool compose_check(const Model& model, const FourierSeries& h, double candidate_delta_norm,
                   double radius) {
  const double beta = model.gevrey().beta;
  const int d = model.dim();
  const double r = radius > 0.0 ? radius : model.gevrey().radius;
  const double lhs = d * std::pow(r, beta) + gevrey_norm(h, beta, r) + candidate_delta_norm;
  const double rhs = std::pow(model.rbar(), beta) / std::pow(static_cast<double>(d), beta - 1.0);
  return lhs <= rhs * (1.0 + 1e-12);
}

double estimate_interaction_bound(const Interaction& inter, int dim, double beta, double rbar) {
  // Per-factor envelopes env_r >= max_{|gamma|=r} ||d^gamma F||_{F_{beta,rbar}}.
  auto envelope = [&](const Factor& fac, int r) {
    double sum = 0.0;
    if (fac.kind == Factor::Kind::Site) {
      fac.series.for_each([&](const Mode& q, Complex c) {
        int qmax = 0;
        for (int i = 0; i < dim; ++i) qmax = std::max(qmax, std::abs(q[i]));
        sum += std::abs(c) * std::pow(static_cast<double>(std::max(1, qmax)), r) *
               std::exp(beta * rbar * k_weight(q, dim, beta));
      });
    } else {
      int emax = 0;
      double e_beta = 0.0;
      for (int e : fac.direction) {
        emax = std::max(emax, std::abs(e));
        if (e != 0) e_beta += std::pow(std::abs(static_cast<double>(e)), 1.0 / beta);
      }
      fac.series.for_each([&](const Mode& q, Complex c) {
        const double qa = std::abs(static_cast<double>(q[0]));
        sum += std::abs(c) * std::pow(std::max(1.0, qa * emax), r) *
               std::exp(beta * rbar * 2.0 * std::pow(std::max(qa, 1e-300), 1.0 / beta) * e_beta *
                        (q[0] != 0 ? 1.0 : 0.0));
      });
    }
    return sum;
  };

  auto factorial = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };

  auto factors_disjoint = [](const InteractionTerm& term) {
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
      for (std::size_t j = i + 1; j < term.factors.size(); ++j) {
        for (int s = 0; s < 16; ++s) {
          if (term.factors[i].depends_on(s) && term.factors[j].depends_on(s)) return false;
        }
      }
    }
    return true;
  };

  double worst = 0.0;
  for (int r = 0; r <= 3; ++r) {
    double order_sum = 0.0;
    for (const InteractionTerm& term : inter.terms) {
      const std::size_t nf = term.factors.size();
      // Distribute r derivative slots over the factors. Disjoint site sets
      // split a multi-index uniquely (max over splits); overlapping factors
      // need the full product-rule multinomial sum.
      const bool disjoint = factors_disjoint(term);
      std::vector<int> split(nf, 0);
      double term_bound = 0.0;
      std::function<void(std::size_t, int)> rec = [&](std::size_t f, int left) {
        if (f + 1 == nf) {
          split[f] = left;
          double prod = disjoint ? 1.0 : factorial(r);
          for (std::size_t i = 0; i < nf; ++i) {
            prod *= envelope(term.factors[i], split[i]);
            if (!disjoint) prod /= factorial(split[i]);
          }
          if (disjoint) {
            term_bound = std::max(term_bound, prod);
          } else {
            term_bound += prod;
          }
          return;
        }
        for (int take = 0; take <= left; ++take) {
          split[f] = take;
          rec(f + 1, left - take);
        }
      };
      rec(0, r);
      order_sum += std::abs(term.coeff) * term_bound;
    }
    worst = std::max(worst, order_sum);
  }
  if (inter.range == 1) worst += std::abs(inter.twist);
  return worst;
}

std::optional<FourierSeries> joint_mixed_derivative(const Model& model) {
  const int d = model.dim();
  bool any = false;
  for (const Interaction& inter : model.interactions()) any = any || inter.range == 1;
  if (!any) return std::nullopt;

  const std::vector<double>& alpha = model.freq().alpha;

  // Joint modes live on T^{2d}: block 0 = zeta_0, block 1 = zeta_1.
  auto factor_joint = [&](const Factor& fac, std::span<const int> deriv_sites) {
    int cut = 0;
    if (fac.kind == Factor::Kind::Site) {
      cut = fac.series.cutoff();
    } else {
      int emax = 0;
      for (int e : fac.direction) emax = std::max(emax, std::abs(e));
      cut = fac.series.cutoff() * emax;
    }
    FourierSeries joint(2 * d, cut);
    fac.series.for_each([&](const Mode& q, Complex c) {
      Mode kj{};
      Complex amp = c;
      if (fac.kind == Factor::Kind::Site) {
        const double qa = dot_alpha(alpha, std::span<const int>(q.data(), alpha.size()));
        for (int i = 0; i < d; ++i) kj[fac.site * d + i] = q[i];
        for (std::size_t r = 0; r < deriv_sites.size(); ++r) amp *= Complex(0.0, qa);
      } else {
        const double ea = dot_alpha(alpha, fac.direction);
        for (int i = 0; i < d; ++i) {
          kj[fac.site_a * d + i] = q[0] * fac.direction[i];
          kj[fac.site_b * d + i] = -q[0] * fac.direction[i];
        }
        for (int site : deriv_sites) {
          amp *= Complex(0.0, site == fac.site_a ? q[0] * ea : -q[0] * ea);
        }
      }
      joint.add_coeff(kj, amp);
    });
    return joint;
  };

  FourierSeries sum(2 * d, 0);
  for (const Interaction& inter : model.interactions()) {
    if (inter.range != 1) continue;
    if (inter.twist != 0.0) {
      sum += FourierSeries::constant(2 * d, 0, Complex(inter.twist, 0.0));
    }
    for (const InteractionTerm& term : inter.terms) {
      const std::size_t nf = term.factors.size();
      for (std::size_t f0 = 0; f0 < nf; ++f0) {
        if (!term.factors[f0].depends_on(0)) continue;
        for (std::size_t f1 = 0; f1 < nf; ++f1) {
          if (!term.factors[f1].depends_on(1)) continue;
          FourierSeries prod(2 * d, 0);
          bool first = true;
          for (std::size_t f = 0; f < nf; ++f) {
            std::vector<int> ders;
            if (f == f0) ders.push_back(0);
            if (f == f1) ders.push_back(1);
            FourierSeries piece = factor_joint(term.factors[f], ders);
            prod = first ? piece : multiply_exact(prod, piece);
            first = false;
          }
          prod *= Complex(term.coeff, 0.0);
          sum += prod;
        }
      }
    }
  }
  return sum;
}

namespace {

// True when every periodic range-1 term is a single kernel on the same
// difference line; fills the canonical direction.
bool range1_on_one_line(const Model& model, std::vector<int>& direction) {
  direction.clear();
  for (const Interaction& inter : model.interactions()) {
    if (inter.range != 1) continue;
    for (const InteractionTerm& term : inter.terms) {
      if (term.factors.size() != 1) return false;
      const Factor& fac = term.factors[0];
      if (fac.kind != Factor::Kind::Difference) return false;
      if (direction.empty()) {
        direction = fac.direction;
        continue;
      }
      bool same = true, negated = true;
      for (std::size_t i = 0; i < direction.size(); ++i) {
        same = same && fac.direction[i] == direction[i];
        negated = negated && fac.direction[i] == -direction[i];
      }
      if (!same && !negated) return false;
    }
  }
  return true;
}

}  // namespace

MixedInverseBound mixed_inverse_bound(const Model& model, double reciprocal_floor) {
  MixedInverseBound out;
  for (const Interaction& inter : model.interactions()) {
    out.has_range1 = out.has_range1 || inter.range == 1;
  }
  if (!out.has_range1) {
    out.bound = std::numeric_limits<double>::infinity();
    return out;
  }

  const double beta = model.gevrey().beta;
  const double rbar = model.rbar();
  const std::vector<double>& alpha = model.freq().alpha;

  std::vector<int> line;
  if (range1_on_one_line(model, line)) {
    // mixed(t) = twist + sum_terms c q^2 (e.alpha)^2 g_q e^{iqt} on the
    // difference line t = e.(zeta_1 - zeta_0); invert at a deep 1-D cutoff.
    out.line_reduced = true;
    int natural = 0;
    for (const Interaction& inter : model.interactions()) {
      if (inter.range != 1) continue;
      for (const InteractionTerm& term : inter.terms) {
        natural = std::max(natural, term.factors[0].series.cutoff());
      }
    }
    const int deep = std::max(96, 8 * natural);
    FourierSeries mixed_line(1, deep);
    double e_beta = 0.0;
    for (int e : line) {
      if (e != 0) e_beta += std::pow(std::abs(static_cast<double>(e)), 1.0 / beta);
    }
    for (const Interaction& inter : model.interactions()) {
      if (inter.range != 1) continue;
      if (inter.twist != 0.0) mixed_line.add_coeff(Mode{}, Complex(inter.twist, 0.0));
      for (const InteractionTerm& term : inter.terms) {
        const Factor& fac = term.factors[0];
        const double ea = dot_alpha(alpha, fac.direction);
        bool same = true;
        for (std::size_t i = 0; i < line.size(); ++i) {
          same = same && fac.direction[i] == line[i];
        }
        const bool flipped = !same;
        fac.series.for_each([&](const Mode& q, Complex c) {
          const int m = flipped ? -q[0] : q[0];
          // d^(1) d^(0) pulls (i q ea)(-i q ea) = q^2 ea^2
          Mode km{};
          km[0] = m;
          mixed_line.add_coeff(km, Complex(term.coeff * q[0] * q[0] * ea * ea, 0.0) * c);
        });
      }
    }
    GridSpec grid1 = GridSpec::for_cutoff(1, deep);
    FourierSeries inv = reciprocal(mixed_line, grid1, reciprocal_floor);
    double sum = 0.0, edge = 0.0;
    int kept_max = 0;
    inv.for_each([&](const Mode& m, Complex c) {
      const double w = std::exp(beta * rbar * 2.0 *
                                std::pow(std::abs(static_cast<double>(m[0])), 1.0 / beta) *
                                e_beta);
      const double contrib = std::abs(c) * w;
      sum += contrib;
      if (std::abs(m[0]) >= kept_max) {
        kept_max = std::abs(m[0]);
        edge = contrib;
      }
    });
    out.bound = sum;
    out.tail_weighted = edge;
    return out;
  }

  // General low-rank mixture: lift the joint table to an affordable cutoff
  // before inverting, and surface the weighted edge mass.
  std::optional<FourierSeries> mixed = joint_mixed_derivative(model);
  const int joint_dim = mixed->dim();
  int cap = 2;
  if (joint_dim <= 2) cap = 64;
  else if (joint_dim <= 4) cap = 12;
  else if (joint_dim <= 6) cap = 4;
  const int lifted = std::min(cap, std::max(8, 2 * mixed->cutoff()));
  FourierSeries work =
      mixed->cutoff() < lifted ? mixed->with_cutoff(lifted) : *mixed;
  GridSpec grid = GridSpec::for_cutoff(joint_dim, work.cutoff());
  FourierSeries inv = reciprocal(work, grid, reciprocal_floor);
  double sum = 0.0, edge = 0.0;
  int kept_max = 0;
  inv.for_each([&](const Mode& k, Complex c) {
    const double contrib =
        std::abs(c) * std::exp(beta * rbar * k_weight(k, joint_dim, beta));
    sum += contrib;
    int kinf = 0;
    for (int i = 0; i < joint_dim; ++i) kinf = std::max(kinf, std::abs(k[i]));
    if (kinf >= kept_max) {
      kept_max = kinf;
      edge = std::max(edge, contrib);
    }
  });
  out.bound = sum;
  out.tail_weighted = edge;
  return out;
}

}  // namespace qpkam
