#pragma once

// Rigorous spectral-gap lower bounds for the pinned spin-1/2 chain via the
// martingale (local-projection) method: cover the chain with a center block
// C0 = [y-n_l, y+n_r] around the field site plus single bonds added
// alternately left and right; the gap of the full chain is then at least
//   gamma * (1 - sqrt(2) eps)^2,
// where gamma is the local gap (center block vs. the unit bond gaps) and eps
// bounds the overlap norms of consecutive local ground projections.  All
// overlap suprema evaluate in closed form at the innermost added bond (m = 0);
// the sequences decrease in m, which the tests sample numerically.
//
// Local gaps are always taken from a dense diagonalization of the center
// block.  Two-site closed forms exist for the (0,1) cutoffs and are enforced
// as cross-checks.  For the axial three-site block, the tabulated closed
// forms (`*_reference` below) disagree with the block spectrum beyond the
// all-up/all-down/antisymmetric levels; the corrected symmetric-block forms
// in `droplet_three_site_levels` match it to machine precision, so the dense
// spectrum stays authoritative and the reference forms are only reported.

#include "xxzpin/analytic.hpp"
#include "xxzpin/solver.hpp"

#include <array>
#include <sstream>

namespace xxzpin {

enum class GapRegime { KinkTransverse, DropletTransverse, DropletAxial };

inline const char* to_string(GapRegime r) {
  switch (r) {
    case GapRegime::KinkTransverse: return "kink-transverse";
    case GapRegime::DropletTransverse: return "droplet-transverse";
    case GapRegime::DropletAxial: return "droplet-axial";
  }
  return "?";
}

// Refusal of an out-of-regime request (gapless or unsupported configuration).
class RegimeRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Closed-form ingredients

// Kink: f = -(|B| + B3) / (B1 - i B2).
// Droplet (spin 1/2): the same with the field shifted to (B1, B2, B3 - A).
inline Complex effective_f(GapRegime regime, const FieldSpec& field, const SpinParams& spin) {
  if (field.transverse2() <= 0.0) {
    throw RegimeRefusal("effective f needs a transverse field component");
  }
  const Complex denom(field.b1, -field.b2);
  if (regime == GapRegime::KinkTransverse) {
    return -(field.norm() + field.b3) / denom;
  }
  const double s3 = field.b3 - spin.a_field;  // 2jA at j = 1/2
  const double ns = std::sqrt(field.b1 * field.b1 + field.b2 * field.b2 + s3 * s3);
  return (ns + s3) / denom;
}

// Smallest admissible cutoffs, n_r >= 1.  Kink needs q^n_r < |f| < q^-n_l,
// droplet needs |f| q^n_l < 1 and |f| q^n_r < 1, all strictly; an exact tie
// fails the strict comparison and bumps the cutoff by one.
inline std::pair<int, int> select_cutoffs(double f_abs, double q, GapRegime regime) {
  if (!(f_abs > 0.0) || !(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("select_cutoffs: need |f| > 0 and q in (0,1)");
  }
  int n_l = 0, n_r = 1;
  if (regime == GapRegime::KinkTransverse) {
    while (!(std::pow(q, n_r) < f_abs)) ++n_r;
    while (!(f_abs * std::pow(q, n_l) < 1.0)) ++n_l;
  } else {
    while (!(f_abs * std::pow(q, n_l) < 1.0)) ++n_l;
    while (!(f_abs * std::pow(q, n_r) < 1.0)) ++n_r;
  }
  return {n_l, n_r};
}

// Overlap-norm branches; m counts bonds added beyond the innermost one.
// Right of the kink block ("even" steps): needs |f| q^-n_r > 1.
inline double epsilon_branch_right_kink(double f_abs, double q, int n_r, int m = 0) {
  const double u = f_abs * std::pow(q, -(n_r + m));
  const double q2 = q * q;
  const double ratio = q2 / (1.0 + q2) * (1.0 + u * u / q2) / (1.0 + u * u);
  return std::sqrt(std::max(0.0, 1.0 - ratio));
}

// Left of the block ("odd" steps), and both droplet sides: needs |f| q^n < 1.
// On the droplet's antikink side the wall parameter has modulus 1/|f| and the
// algebra collapses to this same expression with n = n_r.
inline double epsilon_branch_left(double f_abs, double q, int n, int m = 0) {
  const double v = f_abs * std::pow(q, n + m);
  const double q2 = q * q;
  const double ratio = 1.0 / (1.0 + q2) * (1.0 + v * v * q2) / (1.0 + v * v);
  return std::sqrt(std::max(0.0, 1.0 - ratio));
}

// Supremum over all added bonds (attained at m = 0 on each side).  Sides with
// no bonds outside the center block contribute nothing.
inline double epsilon_closed_form(double f_abs, double q, int n_l, int n_r, GapRegime regime,
                                  bool has_left = true, bool has_right = true) {
  if (regime == GapRegime::DropletAxial) {
    return (has_left || has_right) ? q / std::sqrt(1.0 + q * q) : 0.0;
  }
  double eps = 0.0;
  if (regime == GapRegime::KinkTransverse) {
    if (has_right) eps = std::max(eps, epsilon_branch_right_kink(f_abs, q, n_r));
    if (has_left) eps = std::max(eps, epsilon_branch_left(f_abs, q, n_l));
  } else {
    if (has_left) eps = std::max(eps, epsilon_branch_left(f_abs, q, n_l));
    if (has_right) eps = std::max(eps, epsilon_branch_left(f_abs, q, n_r));
  }
  return eps;
}

// ---------------------------------------------------------------------------
// Two- and three-site block gaps (spin 1/2)

// Gap of the two-site kink block with the field at its first site:
//   1/2 - 1/2 sqrt(1 + |B|^2 - 2 B3 A) + |B|/2.
inline double kink_gap_two_site(const FieldSpec& field, double a) {
  const double nb = field.norm();
  return 0.5 - 0.5 * std::sqrt(1.0 + nb * nb - 2.0 * field.b3 * a) + 0.5 * nb;
}

// Gap of the two-site droplet block with the field at its first site:
//   1/2 (1 - sqrt(1 + |B|^2 - A^2) + |(B1, B2, B3 - A)|).
inline double droplet_gap_two_site(const FieldSpec& field, double a) {
  const double nb = field.norm();
  const double s3 = field.b3 - a;
  return 0.5 * (1.0 - std::sqrt(1.0 + nb * nb - a * a) +
                std::sqrt(field.b1 * field.b1 + field.b2 * field.b2 + s3 * s3));
}

// Exact levels of the three-site droplet block with an axial field B at the
// middle site.  The reflection symmetry splits the 8 states into four
// eigenvectors (all-up, all-down, two antisymmetric combinations) plus two
// symmetric 2x2 blocks whose entries follow from the bond and boundary terms:
//   n=1 block: [[(1+A+B)/2, -1/(sqrt2 Delta)], [., 1 - B/2]]
//   n=2 block: [[1+A+B/2,   -1/(sqrt2 Delta)], [., (1+A-B)/2]]
inline std::array<double, 8> droplet_three_site_levels(double b, double delta) {
  const double a = params_from_delta(delta).second;
  const double c = 1.0 / (std::sqrt(2.0) * delta);
  auto block = [&](double diag1, double diag2) {
    const double mean = 0.5 * (diag1 + diag2);
    const double half = 0.5 * (diag1 - diag2);
    const double root = std::sqrt(half * half + c * c);
    return std::pair<double, double>{mean - root, mean + root};
  };
  const auto [n1_lo, n1_hi] = block(0.5 * (1.0 + a + b), 1.0 - 0.5 * b);
  const auto [n2_lo, n2_hi] = block(1.0 + a + 0.5 * b, 0.5 * (1.0 + a - b));
  std::array<double, 8> e = {
      0.5 * b,                  // all spin up
      a - 0.5 * b,              // all spin down
      0.5 * (a + 1.0 + b),      // antisymmetric, one flipped
      0.5 * (a + 1.0 - b),      // antisymmetric, two flipped
      n1_lo, n1_hi, n2_lo, n2_hi};
  std::sort(e.begin(), e.end());
  return e;
}

inline double droplet_three_site_gap(double b, double delta) {
  const auto e = droplet_three_site_levels(b, delta);
  return e[1] - e[0];
}

// Tabulated reference forms for the same block.  e1..e4 agree with the exact
// spectrum; the symmetric-block pair (with sqrt(Delta^-2/2 + B^2), double
// degeneracy) does not follow from the Hamiltonian's matrix entries and
// deviates from the dense spectrum at finite Delta.  Kept for reporting only.
inline std::array<double, 8> droplet_three_site_levels_reference(double b, double delta) {
  const double a = params_from_delta(delta).second;
  const double root = std::sqrt(0.5 / (delta * delta) + b * b);
  std::array<double, 8> e = {0.5 * b,
                             a - 0.5 * b,
                             0.5 * (a + 1.0 + b),
                             0.5 * (a + 1.0 - b),
                             0.5 * (a + 1.0 - root),
                             0.5 * (a + 1.0 - root),
                             0.5 * (a + 1.0 + root),
                             0.5 * (a + 1.0 + root)};
  std::sort(e.begin(), e.end());
  return e;
}

// Reference piecewise gap with a selectable branch crossover.  The printed
// crossover constant (3A^2-4A+1)/(4(1-A)) simplifies to -(3A-1)/4 and is
// negative for A > 1/3; the self-consistent crossing of the two reference
// branches sits at +(3A-1)/4 instead.
inline double droplet_three_site_gap_reference(double b, double delta, double crossover) {
  const double a = params_from_delta(delta).second;
  if (b <= crossover) {
    return 0.5 * (1.0 + a - std::sqrt(0.5 / (delta * delta) + b * b) - b);
  }
  return a - b;
}

inline double reference_crossover_printed(double a) {
  return (3.0 * a * a - 4.0 * a + 1.0) / (4.0 * (1.0 - a));
}

inline double reference_crossover_consistent(double a) { return 0.25 * (3.0 * a - 1.0); }

// ---------------------------------------------------------------------------
// Covering plan and certificate

struct CoveringPlan {
  GapRegime regime;
  int n_l = 0, n_r = 1;
  Interval c0;                          // clipped to [1, b]
  std::vector<Interval> intervals;      // C1, C2, ... (single bonds)
  Complex f;                            // meaningless for the axial regime
  bool has_left = false, has_right = false;
};

inline CoveringPlan make_covering_plan(const ModelSpec& spec, GapRegime regime, int n_l, int n_r,
                                       Complex f) {
  const int y = spec.field->site;
  const int b = spec.sites;
  CoveringPlan plan;
  plan.regime = regime;
  plan.f = f;
  plan.c0 = Interval{std::max(1, y - n_l), std::min(b, y + n_r)};
  // A pin at the chain end can clip the block to a single site; grow it back
  // inward.  The overlap branches only shrink when the block widens, so the
  // effective cutoffs recorded below keep every strict condition satisfied.
  if (plan.c0.length() < 2) {
    if (plan.c0.first > 1) {
      --plan.c0.first;
    } else {
      ++plan.c0.last;
    }
  }
  plan.n_l = y - plan.c0.first;
  plan.n_r = plan.c0.last - y;
  plan.has_left = plan.c0.first > 1;
  plan.has_right = plan.c0.last < b;

  // Bonds added alternately right, left, ... until one side is exhausted.
  int right = plan.c0.last, left = plan.c0.first;
  bool take_right = true;
  while (right < b || left > 1) {
    const bool can_right = right < b, can_left = left > 1;
    if ((take_right && can_right) || !can_left) {
      plan.intervals.push_back(Interval{right, right + 1});
      ++right;
    } else {
      plan.intervals.push_back(Interval{left - 1, left});
      --left;
    }
    take_right = !take_right;
  }
  return plan;
}

struct GapCertificate {
  GapRegime regime;
  int sites = 0, site_y = 0;
  double delta = 0.0;
  FieldSpec field;
  int n_l = 0, n_r = 1;
  double f_abs = 0.0;  // 0 marks "not applicable" (axial regime)
  double epsilon = 0.0;
  double gamma = 0.0;
  std::string gamma_provenance;
  double bound = 0.0;
  std::optional<double> exact_gap;
  std::optional<bool> check_passed;  // bound <= exact_gap + 1e-9
};

struct CertifyOptions {
  bool compute_exact_gap = false;
  BuildOptions build;
  LanczosOptions lanczos;
};

namespace detail {

inline GapRegime classify_regime(const ModelSpec& spec) {
  if (spec.spin.two_j != 1) {
    throw RegimeRefusal("gap certificates cover spin 1/2 only");
  }
  if (!spec.field || spec.field->zero()) {
    throw RegimeRefusal("gap certificates need a nonzero pinning field");
  }
  const FieldSpec& f = *spec.field;
  switch (spec.bc) {
    case BoundaryCondition::PlusMinus:
      if (f.transverse2() > 0.0) return GapRegime::KinkTransverse;
      throw RegimeRefusal(
          "kink chain with an axial field: the spectrum bottom is a continuum edge and "
          "excitations are gapless; no certificate exists");
    case BoundaryCondition::PlusPlus:
      if (f.transverse2() > 0.0) return GapRegime::DropletTransverse;
      if (f.b3 >= spec.spin.a_field) {
        throw RegimeRefusal(
            "droplet chain with axial field B >= A: gapless (degenerate droplet family at the "
            "critical field, continuum edge above it); no certificate exists");
      }
      return GapRegime::DropletAxial;
    case BoundaryCondition::MinusPlus:
    case BoundaryCondition::MinusMinus:
      throw RegimeRefusal(
          "certify the spin-flipped model instead: -+/-- chains are unitarily equivalent to "
          "+-/++ with (B1, -B2, -B3)");
    case BoundaryCondition::Bare:
      throw RegimeRefusal("bare chain: no certified regime without boundary fields");
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// Local gap gamma of the center block (dense spectrum of the clipped C0 with
// the full field at y), capped at the unit bond gap.  Closed forms, where the
// block matches them, must agree with the dense value to 1e-10.
inline std::pair<double, std::string> local_gap(GapRegime regime, const CoveringPlan& plan,
                                                const ModelSpec& spec) {
  // The center block is itself a kink/droplet chain on c0 with the field at y.
  ModelSpec block = spec;
  block.sites = plan.c0.length();
  block.interval = Interval{1, block.sites};
  FieldSpec f = *spec.field;
  f.site = spec.field->site - plan.c0.first + 1;
  block.field = f;
  block.bc = (regime == GapRegime::KinkTransverse) ? BoundaryCondition::PlusMinus
                                                   : BoundaryCondition::PlusPlus;

  const Matrix h = assemble_dense(hamiltonian_terms(block));
  const SpectrumResult spec_block = dense_spectrum(h, false);
  const double gap_dense = spec_block.eigenvalues(1) - spec_block.eigenvalues(0);

  std::string provenance = "dense-c0";
  if (block.sites == 2 && f.site == 1) {
    const double closed = (regime == GapRegime::KinkTransverse)
                              ? kink_gap_two_site(f, spec.spin.a_field)
                              : droplet_gap_two_site(f, spec.spin.a_field);
    if (std::abs(closed - gap_dense) > 1e-10) {
      throw NumericalFailure("two-site closed-form gap disagrees with the dense block (" +
                             std::to_string(closed) + " vs " + std::to_string(gap_dense) + ")");
    }
    provenance = (regime == GapRegime::KinkTransverse) ? "closed-form-2site-kink"
                                                       : "closed-form-2site-droplet";
  } else if (regime == GapRegime::DropletAxial && block.sites == 3 && f.site == 2) {
    const double closed = droplet_three_site_gap(f.b3, spec.spin.delta);
    if (std::abs(closed - gap_dense) > 1e-10) {
      throw NumericalFailure("three-site block closed form disagrees with the dense spectrum");
    }
    provenance = "dense-c0-3site";  // dense stays authoritative; see header note
  }
  return {std::min(gap_dense, 1.0), provenance};
}

inline GapCertificate certify_gap(const ModelSpec& spec, const CertifyOptions& opt = {}) {
  spec.validate();
  if (spec.interval) throw std::invalid_argument("certificates cover whole chains only");
  const GapRegime regime = detail::classify_regime(spec);
  const SpinParams& sp = spec.spin;

  int n_l = 1, n_r = 1;
  Complex f(0.0, 0.0);
  if (regime != GapRegime::DropletAxial) {
    f = effective_f(regime, *spec.field, sp);
    std::tie(n_l, n_r) = select_cutoffs(std::abs(f), sp.q, regime);
  }
  const CoveringPlan plan = make_covering_plan(spec, regime, n_l, n_r, f);

  GapCertificate cert;
  cert.regime = regime;
  cert.sites = spec.sites;
  cert.site_y = spec.field->site;
  cert.delta = sp.delta;
  cert.field = *spec.field;
  cert.n_l = plan.n_l;  // effective distances from y to the block ends
  cert.n_r = plan.n_r;
  cert.f_abs = std::abs(f);
  cert.epsilon = epsilon_closed_form(std::abs(f), sp.q, plan.n_l, plan.n_r, regime, plan.has_left,
                                     plan.has_right);
  if (!(cert.epsilon < 1.0 / std::sqrt(2.0))) {
    throw NumericalFailure("certificate refused: overlap bound eps = " +
                           std::to_string(cert.epsilon) + " is not below 1/sqrt(2)");
  }
  std::tie(cert.gamma, cert.gamma_provenance) = local_gap(regime, plan, spec);
  if (!(cert.gamma > 0.0)) {
    throw NumericalFailure("certificate refused: nonpositive local gap");
  }
  const double contraction = 1.0 - std::sqrt(2.0) * cert.epsilon;
  cert.bound = cert.gamma * contraction * contraction;

  if (opt.compute_exact_gap) {
    BuildOptions bo = opt.build;
    bo.dense_cap = std::min<std::size_t>(bo.dense_cap, 2048);  // iterate beyond this
    const OperatorMatrix h = build_hamiltonian(spec, bo);
    double e0, e1;
    if (h.is_dense()) {
      const SpectrumResult full = dense_spectrum(h, false);
      e0 = full.eigenvalues(0);
      e1 = full.eigenvalues(1);
    } else {
      const SpectrumResult low = lowest_k(h, 2, opt.lanczos);
      e0 = low.eigenvalues(0);
      e1 = low.eigenvalues(1);
    }
    cert.exact_gap = e1 - e0;  // the ground state is unique in every certified regime
    cert.check_passed = cert.bound <= *cert.exact_gap + 1e-9;
  }
  return cert;
}

inline std::string serialize(const GapCertificate& c) {
  std::ostringstream os;
  os.precision(12);
  os << "regime: " << to_string(c.regime) << "\n";
  os << "sites: " << c.sites << "\n";
  os << "site_y: " << c.site_y << "\n";
  os << "delta: " << c.delta << "\n";
  os << "field: " << c.field.b1 << "," << c.field.b2 << "," << c.field.b3 << "\n";
  os << "n_l: " << c.n_l << "\n";
  os << "n_r: " << c.n_r << "\n";
  if (c.regime == GapRegime::DropletAxial) {
    os << "f_abs: n/a\n";
  } else {
    os << "f_abs: " << c.f_abs << "\n";
  }
  os << "epsilon: " << c.epsilon << "\n";
  os << "gamma: " << c.gamma << "\n";
  os << "gamma_provenance: " << c.gamma_provenance << "\n";
  os << "bound: " << c.bound << "\n";
  os << "exact_gap: ";
  if (c.exact_gap) {
    os << *c.exact_gap;
  } else {
    os << "n/a";
  }
  os << "\n";
  os << "check: ";
  if (c.check_passed) {
    os << (*c.check_passed ? "PASS" : "FAIL");
  } else {
    os << "skipped";
  }
  os << "\n";
  return os.str();
}

}  // namespace xxzpin
