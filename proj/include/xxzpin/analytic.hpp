#pragma once

// Closed-form states and energies: the domain-wall product states, the
// per-sector ground states, the field-selected wall parameter z, glued
// droplet states, ground-energy laws, and the single-overturned-spin
// excitation branch.

#include "xxzpin/operator_matrix.hpp"

#include <cmath>

namespace xxzpin {

// Single-site factor of the kink product state:
//   chi_x(z) components (z q^-x)^(j-m) w_m, normalized by (1+|z|^2 q^-2x)^-j.
// Computed through logs of the magnitudes so large |z| q^-x stays finite.
inline Vector kink_site_factor(const SpinParams& spin, Complex z, int x) {
  const int d = spin.dim_local();
  Vector v(d);
  const Complex zeta = z * std::pow(spin.q, -x);
  const double az = std::abs(zeta);
  if (az == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  const double log_az = std::log(az);
  const double log_norm = -spin.spin_j() * std::log1p(az * az);
  const Complex phase = zeta / az;
  Complex phase_pow(1.0, 0.0);
  for (int k = 0; k < d; ++k) {  // k = j - m
    const double m = spin.spin_j() - k;
    v(k) = phase_pow * std::exp(k * log_az + log_norm) * weight(spin.spin_j(), m);
    phase_pow *= phase;
  }
  v.normalize();  // the closed-form prefactor already normalizes; this only sheds rounding
  return v;
}

// Antikink factor: identical amplitudes attached to the reversed basis
// (|m> -> |-m>), i.e. the component order of chi_x(z) reversed.
inline Vector antikink_site_factor(const SpinParams& spin, Complex z, int x) {
  return kink_site_factor(spin, z, x).reverse();
}

struct ProductState {
  std::vector<Vector> factors;

  Vector global() const {
    Vector v = Vector::Ones(1);
    for (const Vector& f : factors) v = kron(v, f);
    return v;
  }

  // <S3_x> evaluated factor by factor.
  std::vector<double> s3_profile(const SpinParams& spin) const {
    std::vector<double> prof;
    prof.reserve(factors.size());
    for (const Vector& f : factors) {
      double acc = 0.0;
      for (int k = 0; k < spin.dim_local(); ++k) {
        acc += (spin.spin_j() - k) * std::norm(f(k));
      }
      prof.push_back(acc / f.squaredNorm());
    }
    return prof;
  }
};

inline ProductState kink_product_state(const ModelSpec& spec, Complex z) {
  ProductState s;
  for (int x = 1; x <= spec.sites; ++x) s.factors.push_back(kink_site_factor(spec.spin, z, x));
  return s;
}

inline ProductState antikink_product_state(const ModelSpec& spec, Complex z) {
  ProductState s;
  for (int x = 1; x <= spec.sites; ++x) s.factors.push_back(antikink_site_factor(spec.spin, z, x));
  return s;
}

// ---------------------------------------------------------------------------

struct SectorState {
  SectorBasis basis;
  Vector amplitudes;  // normalized, ordered like basis.states

  Vector embed_full(std::size_t dim) const {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < basis.count(); ++k) {
      v(static_cast<Eigen::Index>(basis.states[k])) = amplitudes(static_cast<Eigen::Index>(k));
    }
    return v;
  }
};

// The unique zero-energy state of the kink chain in one total-S3 sector:
// amplitudes prod_x q^(-x (j - m_x)) w_{m_x}.  A common power of q is divided
// out before exponentiation so long chains do not overflow.
inline SectorState sector_kink_state(const ModelSpec& spec, int total_two_m) {
  const SpinParams& sp = spec.spin;
  SectorState st;
  st.basis = sector_basis(spec.sites, sp, total_two_m);
  const std::size_t n = st.basis.count();
  st.amplitudes.resize(static_cast<Eigen::Index>(n));

  // exponent of q^-1 in the amplitude: t(config) = sum_x x * digit(x)
  std::vector<double> texp(n);
  std::vector<double> wprod(n);
  double tmax = -1e300;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = st.basis.states[k];
    double t = 0.0, w = 1.0;
    for (int x = 1; x <= spec.sites; ++x) {
      const int dig = digit_at(idx, x, spec.sites, sp.dim_local());
      t += static_cast<double>(x) * dig;
      w *= weight(sp.spin_j(), sp.spin_j() - dig);
    }
    texp[k] = t;
    wprod[k] = w;
    tmax = std::max(tmax, t);
  }
  const double lq = std::log(sp.q);
  for (std::size_t k = 0; k < n; ++k) {
    st.amplitudes(static_cast<Eigen::Index>(k)) = wprod[k] * std::exp(-(texp[k] - tmax) * lq);
  }
  st.amplitudes.normalize();
  return st;
}

// ---------------------------------------------------------------------------
// Field-selected wall parameter (transverse component required)

struct GroundZ {
  Complex ground;   // z with  B.S_y chi_y(z) = -j|B| chi_y(z)
  Complex excited;  // companion coherent state with eigenvalue +j|B|
};

// Ground branch z = -(|B| + B3)/(B1 - i B2) q^y.  The companion stretched
// along +B is z = +(|B| - B3)/(B1 - i B2) q^y; at B3 = 0 this is the plain
// sign flip of the ground value.
inline GroundZ select_ground_z(const FieldSpec& field, double q) {
  if (field.transverse2() <= 0.0) {
    throw std::invalid_argument(
        "axial field: the wall-parameter selection needs B1^2 + B2^2 > 0");
  }
  const Complex denom(field.b1, -field.b2);
  const double qy = std::pow(q, field.site);
  return {-(field.norm() + field.b3) / denom * qy, (field.norm() - field.b3) / denom * qy};
}

// || (B.S) chi_y(z) - energy * chi_y(z) ||  with energy = energy_sign * j|B|.
inline double verify_field_eigenfactor(const SpinParams& spin, const FieldSpec& field, Complex z,
                                       double energy_sign = -1.0) {
  const SpinOperators op = spin_matrices(spin.spin_j());
  const Matrix bs = field.b1 * op.s1 + field.b2 * op.s2 + field.b3 * op.s3;
  const Vector chi = kink_site_factor(spin, z, field.site);
  return (bs * chi - energy_sign * spin.spin_j() * field.norm() * chi).norm();
}

// ---------------------------------------------------------------------------
// Droplet ground state (transverse field): a kink on [1,y] glued to an
// antikink on [y+1,b], both with the shifted field (B1, B2, B3 - 2jA).

struct DropletGroundState {
  ProductState state;
  double energy = 0.0;
  Complex z_kink, z_antikink;
};

inline DropletGroundState droplet_ground_state(const ModelSpec& spec) {
  if (spec.bc != BoundaryCondition::PlusPlus) {
    throw std::invalid_argument("droplet ground state requires ++ boundary conditions");
  }
  if (!spec.field || spec.field->transverse2() <= 0.0) {
    throw std::invalid_argument("droplet ground state requires a transverse field component");
  }
  if (spec.sites < 3) throw std::invalid_argument("droplet ground state requires b >= 3");
  const FieldSpec& f = *spec.field;
  const SpinParams& sp = spec.spin;
  const double j = sp.spin_j();
  const double shifted3 = f.b3 - 2.0 * j * sp.a_field;
  const double ns = std::sqrt(f.b1 * f.b1 + f.b2 * f.b2 + shifted3 * shifted3);

  DropletGroundState out;
  out.z_kink = -(ns + shifted3) / Complex(f.b1, -f.b2) * std::pow(sp.q, f.site);
  out.z_antikink = -(ns - shifted3) / Complex(f.b1, f.b2) * std::pow(sp.q, f.site);
  for (int x = 1; x <= spec.sites; ++x) {
    out.state.factors.push_back(x <= f.site ? kink_site_factor(sp, out.z_kink, x)
                                            : antikink_site_factor(sp, out.z_antikink, x));
  }
  out.energy = -j * ns + 2.0 * j * j * sp.a_field;
  return out;
}

// ---------------------------------------------------------------------------
// Ground-energy laws

struct GroundEnergy {
  double value = 0.0;
  // False when the value is a spectrum bottom reached only in the infinite
  // chain (continuum edge / accumulation point), not an isolated eigenvalue.
  bool isolated = true;
};

inline GroundEnergy ground_energy(const ModelSpec& spec) {
  const SpinParams& sp = spec.spin;
  const double j = sp.spin_j();
  const FieldSpec f = spec.field.value_or(FieldSpec{});

  switch (spec.bc) {
    case BoundaryCondition::MinusPlus: {
      ModelSpec flipped = spec;
      flipped.bc = BoundaryCondition::PlusMinus;
      if (spec.field) flipped.field = FieldSpec{f.b1, -f.b2, -f.b3, f.site};
      return ground_energy(flipped);
    }
    case BoundaryCondition::MinusMinus: {
      ModelSpec flipped = spec;
      flipped.bc = BoundaryCondition::PlusPlus;
      if (spec.field) flipped.field = FieldSpec{f.b1, -f.b2, -f.b3, f.site};
      return ground_energy(flipped);
    }
    case BoundaryCondition::Bare:
      if (f.zero()) return {0.0, true};
      throw std::invalid_argument("no closed-form ground energy for bare chain with a field");
    case BoundaryCondition::PlusMinus:
      if (f.zero()) return {0.0, true};
      if (f.transverse2() > 0.0) return {-j * f.norm(), true};
      // axial: spectrum bottom of the infinite chain, not attained at finite b
      return {-j * std::abs(f.b3), false};
    case BoundaryCondition::PlusPlus: {
      if (f.zero()) return {0.0, true};
      if (f.transverse2() > 0.0) {
        const double s3 = f.b3 - 2.0 * j * sp.a_field;
        return {-j * std::sqrt(f.b1 * f.b1 + f.b2 * f.b2 + s3 * s3) + 2.0 * j * j * sp.a_field,
                true};
      }
      // Axial droplet branch laws; stated constants cohere only at spin 1/2
      // (the all-down level is 4 j^2 A - j B, which meets jB at A/(2j) only
      // when j = 1/2).
      if (sp.two_j != 1) {
        throw std::invalid_argument("axial droplet ground-energy law is spin-1/2 only");
      }
      const double bc_field = sp.a_field / (2.0 * j);
      const double b = f.b3;
      if (b < bc_field) return {j * b, true};
      if (b == bc_field) return {j * sp.a_field, false};  // droplet family degenerates here
      return {sp.a_field / (2.0 * j) - j * b, false};
    }
  }
  throw std::logic_error("unreachable");
}

// Remark-style wall displacement: with B1^2+B2^2 = 1 the axial component B3
// moves the wall by |log_q(sqrt(1+B3^2) + B3)| sites (left for B3 > 0).
inline double kink_shift_distance(double b3, double q) {
  return std::abs(std::asinh(b3) / std::log(q));
}

// Lowest one-overturned-spin level of the pinned droplet chain in the
// infinite-volume limit (spin 1/2): E_-(B) = 1 - sqrt(B^2 + Delta^-2) + |B|/2.
inline double excitation_energy_minus(double b, double delta) {
  return 1.0 - std::sqrt(b * b + 1.0 / (delta * delta)) + 0.5 * std::abs(b);
}

// Decay base r_- of the bound-magnon amplitudes, |a_x| ~ r_-^|x-y|, where
// e_tilde is the eigenvalue of the half-shifted chain (E_- without the |B|/2).
inline double magnon_decay_rate(double e_tilde, double delta) {
  const double t = delta * (1.0 - e_tilde);
  return t - std::sqrt(std::max(t * t - 1.0, 0.0));
}

struct OneMagnonBranch {
  double eigenvalue = 0.0;
  Vector amplitudes;  // a_x, x = 1..b (amplitude of the spin flipped at x)
};

// Diagonalizes the one-overturned-spin sector (dimension b) and returns the
// lowest eigenpair above the kernel: the kink chain keeps its zero-energy
// sector ground state there, and the branch of interest is the level above
// it.  Spin 1/2, axial field only.
//
// The sector matrix is assembled directly in the flipped-site basis |x>, so
// chains far beyond the full-space indexing range (b > 63) remain available.
inline OneMagnonBranch one_magnon_branch(const ModelSpec& spec, double zero_tol = 1e-9) {
  if (spec.spin.two_j != 1) throw std::invalid_argument("one-magnon sector: spin 1/2 only");
  if (spec.field && !spec.field->axial()) {
    throw std::invalid_argument("one-magnon sector: field must be axial");
  }
  const TermList terms = hamiltonian_terms(spec);
  const int b = spec.sites;
  Matrix h = Matrix::Constant(b, b, Complex(0.0, 0.0));
  h.diagonal().array() += terms.constant;
  for (const SiteTerm& t : terms.singles) {
    h.diagonal().array() += t.op(0, 0);  // all other sites stay up
    h(t.site - 1, t.site - 1) += t.op(1, 1) - t.op(0, 0);
  }
  for (const BondTerm& t : terms.bonds) {
    const int l = t.left - 1, r = t.left;  // 0-based flipped-site indices
    h.diagonal().array() += t.op(0, 0);
    h(l, l) += t.op(2, 2) - t.op(0, 0);  // pair state (down, up)
    h(r, r) += t.op(1, 1) - t.op(0, 0);  // pair state (up, down)
    h(l, r) += t.op(2, 1);
    h(r, l) += t.op(1, 2);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::Index pick = 0;
  while (pick + 1 < es.eigenvalues().size() && es.eigenvalues()(pick) <= zero_tol) ++pick;

  OneMagnonBranch out;
  out.eigenvalue = es.eigenvalues()(pick);
  out.amplitudes = es.eigenvectors().col(pick);
  return out;
}

}  // namespace xxzpin
