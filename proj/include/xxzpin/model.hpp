#pragma once

// Finite-chain model description: boundary conditions, the single-site field,
// the bond interaction matrices, and the term list every assembly backend
// (dense, sparse, matrix-free) consumes.
//
// Full-space indexing: site 1 is the most significant digit,
//   index = sum_x digit(x) * d^(b-x),  digit = j - m_x in [0, 2j],
// so the all-up configuration is index 0.

#include "xxzpin/spin_algebra.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

namespace xxzpin {

enum class BoundaryCondition { Bare, PlusPlus, MinusMinus, PlusMinus, MinusPlus };

inline const char* to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Bare: return "bare";
    case BoundaryCondition::PlusPlus: return "droplet";
    case BoundaryCondition::MinusMinus: return "antidroplet";
    case BoundaryCondition::PlusMinus: return "kink";
    case BoundaryCondition::MinusPlus: return "antikink";
  }
  return "?";
}

struct FieldSpec {
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  int site = 1;  // impurity site y, 1-based

  double norm() const { return std::sqrt(b1 * b1 + b2 * b2 + b3 * b3); }
  double transverse2() const { return b1 * b1 + b2 * b2; }
  bool axial() const { return b1 == 0.0 && b2 == 0.0; }
  bool zero() const { return b1 == 0.0 && b2 == 0.0 && b3 == 0.0; }
};

struct Interval {
  int first = 1;
  int last = 1;
  int length() const { return last - first + 1; }
};

struct ModelSpec {
  int sites = 2;  // ambient chain length b; Hilbert space dimension (2j+1)^b
  SpinParams spin;
  BoundaryCondition bc = BoundaryCondition::Bare;
  std::optional<FieldSpec> field;
  // Operator support [a, b']; boundary fields sit at the interval ends and the
  // identity pads the remaining sites.  Defaults to the whole chain.
  std::optional<Interval> interval;

  Interval support() const { return interval.value_or(Interval{1, sites}); }

  std::size_t dimension() const {
    std::size_t dim = 1;
    for (int x = 0; x < sites; ++x) {
      if (dim > (std::size_t(1) << 62) / spin.dim_local()) {
        throw std::overflow_error("full Hilbert space exceeds the addressable index range");
      }
      dim *= static_cast<std::size_t>(spin.dim_local());
    }
    return dim;
  }

  void validate() const {
    if (sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
    const Interval sup = support();
    if (sup.first < 1 || sup.last > sites || sup.length() < 2) {
      throw std::invalid_argument("operator interval must lie inside [1,b] with >= 2 sites");
    }
    if (field && (field->site < sup.first || field->site > sup.last)) {
      throw std::invalid_argument("field site y lies outside the operator interval");
    }
  }
};

enum class BondKind { Bare, Kink, Antikink };

// Two-site interaction on (x, x+1):
//   -(1/Delta)(S1 S1 + S2 S2) - S3 S3 + j^2 * 1   [Bare]
// plus -jA(S3 x 1 - 1 x S3) for Kink, +jA(...) for Antikink.  The kink and
// antikink bonds are positive semidefinite with a (2j+... )-dimensional kernel;
// for j=1/2 their spectrum is exactly {0,0,0,1}.
inline Matrix bond_term(BondKind kind, const SpinParams& spin) {
  const SpinOperators op = spin_matrices(spin.spin_j());
  const int d = spin.dim_local();
  const Matrix id = Matrix::Identity(d, d);
  const double j = spin.spin_j();
  Matrix h = -(1.0 / spin.delta) * (kron(op.s1, op.s1) + kron(op.s2, op.s2)) -
             kron(op.s3, op.s3) + j * j * Matrix::Identity(d * d, d * d);
  if (kind != BondKind::Bare) {
    const double sign = (kind == BondKind::Kink) ? -1.0 : 1.0;
    h += sign * j * spin.a_field * (kron(op.s3, id) - kron(id, op.s3));
  }
  return h;
}

struct SiteTerm {
  int site;   // 1-based
  Matrix op;  // dim_local x dim_local
};

struct BondTerm {
  int left;   // acts on (left, left+1)
  Matrix op;  // dim_local^2 x dim_local^2
};

struct TermList {
  int sites = 0;
  int dim_local = 2;
  double constant = 0.0;
  std::vector<BondTerm> bonds;
  std::vector<SiteTerm> singles;

  std::size_t dimension() const {
    std::size_t dim = 1;
    for (int x = 0; x < sites; ++x) {
      if (dim > (std::size_t(1) << 62) / static_cast<std::size_t>(dim_local)) {
        throw std::overflow_error("full Hilbert space exceeds the addressable index range");
      }
      dim *= static_cast<std::size_t>(dim_local);
    }
    return dim;
  }
};

// Assembles the term list for H(spec): bond sum over the support interval,
// boundary fields at the interval ends, the impurity field at y, and the
// constant shifts that normalize the ground energy exactly as defined (the
// droplet/antidroplet constant 2 j^2 A is kept, not dropped).
inline TermList hamiltonian_terms(const ModelSpec& spec) {
  spec.validate();
  const Interval sup = spec.support();
  const SpinParams& sp = spec.spin;
  const SpinOperators op = spin_matrices(sp.spin_j());
  const double j = sp.spin_j();
  const double ja = j * sp.a_field;

  TermList terms;
  terms.sites = spec.sites;
  terms.dim_local = sp.dim_local();

  const Matrix bare = bond_term(BondKind::Bare, sp);
  for (int x = sup.first; x < sup.last; ++x) terms.bonds.push_back({x, bare});

  switch (spec.bc) {
    case BoundaryCondition::Bare:
      break;
    case BoundaryCondition::PlusMinus:  // H0 - jA(S3_a - S3_b)
      terms.singles.push_back({sup.first, -ja * op.s3});
      terms.singles.push_back({sup.last, ja * op.s3});
      break;
    case BoundaryCondition::MinusPlus:
      terms.singles.push_back({sup.first, ja * op.s3});
      terms.singles.push_back({sup.last, -ja * op.s3});
      break;
    case BoundaryCondition::PlusPlus:  // H0 - jA(S3_a + S3_b - 2j)
      terms.singles.push_back({sup.first, -ja * op.s3});
      terms.singles.push_back({sup.last, -ja * op.s3});
      terms.constant += 2.0 * j * j * sp.a_field;
      break;
    case BoundaryCondition::MinusMinus:  // H0 + jA(S3_a + S3_b + 2j)
      terms.singles.push_back({sup.first, ja * op.s3});
      terms.singles.push_back({sup.last, ja * op.s3});
      terms.constant += 2.0 * j * j * sp.a_field;
      break;
  }

  if (spec.field && !spec.field->zero()) {
    const FieldSpec& f = *spec.field;
    terms.singles.push_back({f.site, f.b1 * op.s1 + f.b2 * op.s2 + f.b3 * op.s3});
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Digit indexing helpers

// stride(x) = d^(sites - x): the step in the full-space index when digit x
// changes by one.
inline std::size_t site_stride(int site, int sites, int dim_local) {
  std::size_t s = 1;
  for (int x = site; x < sites; ++x) s *= static_cast<std::size_t>(dim_local);
  return s;
}

inline int digit_at(std::size_t index, int site, int sites, int dim_local) {
  return static_cast<int>(index / site_stride(site, sites, dim_local)) % dim_local;
}

// Global spin flip S3 -> -S3 as a basis permutation (digit d -> 2j - d).
inline std::size_t spin_flip_index(std::size_t index, int sites, int dim_local) {
  std::size_t out = 0;
  std::size_t rem = index;
  std::size_t stride = 1;
  for (int x = sites; x >= 1; --x) {
    const int d = static_cast<int>(rem % dim_local);
    rem /= dim_local;
    out += static_cast<std::size_t>(dim_local - 1 - d) * stride;
    stride *= dim_local;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Total-S3 sectors

// All configurations with sum_x m_x = total_m, stored as ascending full-space
// indices.  total_m is passed as 2*m to stay exact for half-integer spins.
struct SectorBasis {
  int sites = 0;
  int two_j = 1;
  int total_two_m = 0;
  std::vector<std::size_t> states;

  std::size_t count() const { return states.size(); }

  // Position of a full-space index inside the sector, or -1 if absent.
  std::ptrdiff_t position(std::size_t full_index) const {
    auto it = std::lower_bound(states.begin(), states.end(), full_index);
    if (it == states.end() || *it != full_index) return -1;
    return it - states.begin();
  }
};

inline std::vector<int> sector_two_m_values(int sites, const SpinParams& spin) {
  std::vector<int> out;
  for (int t = spin.two_j * sites; t >= -spin.two_j * sites; t -= 2) out.push_back(t);
  return out;
}

inline SectorBasis sector_basis(int sites, const SpinParams& spin, int total_two_m) {
  const int two_j = spin.two_j;
  if ((two_j * sites - total_two_m) % 2 != 0 || std::abs(total_two_m) > two_j * sites) {
    throw std::invalid_argument("unreachable total S3 sector");
  }
  // sum of digits needed: D = j*b - total_m
  const int target = (two_j * sites - total_two_m) / 2;

  SectorBasis basis;
  basis.sites = sites;
  basis.two_j = two_j;
  basis.total_two_m = total_two_m;

  // Depth-first in digit order = ascending full-space index.
  std::vector<int> digits(sites, 0);
  std::size_t index = 0;
  const int d = two_j + 1;
  auto rec = [&](auto&& self, int site, int remaining) -> void {
    const int sites_left = sites - site + 1;
    if (site > sites) {
      if (remaining == 0) basis.states.push_back(index);
      return;
    }
    // prune: remaining must be reachable with sites_left digits in [0, 2j]
    if (remaining < 0 || remaining > two_j * sites_left) return;
    const std::size_t stride = site_stride(site, sites, d);
    for (int dig = 0; dig <= two_j; ++dig) {
      index += static_cast<std::size_t>(dig > 0 ? stride : 0);
      self(self, site + 1, remaining - dig);
    }
    index -= static_cast<std::size_t>(two_j) * stride;
  };
  rec(rec, 1, target);
  return basis;
}

}  // namespace xxzpin
