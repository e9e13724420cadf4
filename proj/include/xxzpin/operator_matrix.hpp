#pragma once

// Hamiltonian storage backends.  One term list feeds three representations:
// dense (small chains), compressed sparse rows (mid-size), and a matrix-free
// apply composed from the bond terms (large chains).  Assembled matrices are
// immutable; apply() is const and reentrant, so concurrent matrix-vector
// products on distinct output vectors are safe.

#include "xxzpin/model.hpp"

#include <cstdint>
#include <numeric>
#include <random>
#include <variant>

namespace xxzpin {

// True when every stored matrix has an exactly vanishing imaginary part,
// which holds for any model with B2 = 0 (only S2 carries imaginary entries).
inline bool terms_are_real(const TermList& terms) {
  auto real_matrix = [](const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        if (m(r, c).imag() != 0.0) return false;
    return true;
  };
  for (const SiteTerm& t : terms.singles)
    if (!real_matrix(t.op)) return false;
  for (const BondTerm& t : terms.bonds)
    if (!real_matrix(t.op)) return false;
  return true;
}

namespace detail {

// Nonzero entries of a local operator, column major: for input digit c the
// list holds all (r, value) with value = op(r, c) != 0.
struct LocalAction {
  int dim = 0;
  std::vector<std::vector<std::pair<int, Complex>>> by_col;

  explicit LocalAction(const Matrix& op) : dim(static_cast<int>(op.rows())), by_col(dim) {
    for (int c = 0; c < dim; ++c)
      for (int r = 0; r < dim; ++r)
        if (op(r, c) != Complex(0.0, 0.0)) by_col[c].emplace_back(r, op(r, c));
  }
};

// Emits the nonzero entries of column `col`: emit(row, H(row, col)).
template <class Emit>
void scan_terms_column(const TermList& terms, std::size_t col, const Emit& emit) {
  const int d = terms.dim_local;
  if (terms.constant != 0.0) emit(col, Complex(terms.constant, 0.0));
  for (const SiteTerm& t : terms.singles) {
    const std::size_t stride = site_stride(t.site, terms.sites, d);
    const int c = static_cast<int>(col / stride) % d;
    for (int r = 0; r < d; ++r) {
      const Complex v = t.op(r, c);
      if (v != Complex(0.0, 0.0)) emit(col + static_cast<std::size_t>(r - c) * stride, v);
    }
  }
  for (const BondTerm& t : terms.bonds) {
    const std::size_t stride_l = site_stride(t.left, terms.sites, d);
    const std::size_t stride_r = site_stride(t.left + 1, terms.sites, d);
    const int cl = static_cast<int>(col / stride_l) % d;
    const int cr = static_cast<int>(col / stride_r) % d;
    const int c = cl * d + cr;
    for (int r = 0; r < d * d; ++r) {
      const Complex v = t.op(r, c);
      if (v == Complex(0.0, 0.0)) continue;
      const std::size_t row = col + static_cast<std::size_t>(r / d - cl) * stride_l +
                              static_cast<std::size_t>(r % d - cr) * stride_r;
      emit(row, v);
    }
  }
}

template <class Emit>
void scan_terms(const TermList& terms, const Emit& emit) {
  const int d = terms.dim_local;
  const std::size_t dim = terms.dimension();

  if (terms.constant != 0.0) {
    for (std::size_t i = 0; i < dim; ++i) emit(i, i, Complex(terms.constant, 0.0));
  }
  for (const SiteTerm& t : terms.singles) {
    const LocalAction act(t.op);
    const std::size_t stride = site_stride(t.site, terms.sites, d);
    for (std::size_t i = 0; i < dim; ++i) {
      const int c = static_cast<int>(i / stride) % d;
      for (const auto& [r, v] : act.by_col[c]) {
        emit(i + static_cast<std::size_t>(r - c) * stride, i, v);
      }
    }
  }
  for (const BondTerm& t : terms.bonds) {
    const LocalAction act(t.op);
    const std::size_t stride_l = site_stride(t.left, terms.sites, d);
    const std::size_t stride_r = site_stride(t.left + 1, terms.sites, d);
    for (std::size_t i = 0; i < dim; ++i) {
      const int cl = static_cast<int>(i / stride_l) % d;
      const int cr = static_cast<int>(i / stride_r) % d;
      const int c = cl * d + cr;
      for (const auto& [r, v] : act.by_col[c]) {
        const int rl = r / d;
        const int rr = r % d;
        const std::size_t row =
            i + static_cast<std::size_t>(rl - cl) * stride_l + static_cast<std::size_t>(rr - cr) * stride_r;
        emit(row, i, v);
      }
    }
  }
}

}  // namespace detail

inline Matrix assemble_dense(const TermList& terms) {
  const std::size_t dim = terms.dimension();
  Matrix h = Matrix::Zero(dim, dim);
  detail::scan_terms(terms, [&](std::size_t r, std::size_t c, Complex v) { h(r, c) += v; });
  return h;
}

class SparseHermitian {
 public:
  SparseHermitian() = default;

  static SparseHermitian from_terms(const TermList& terms) {
    const std::size_t dim = terms.dimension();
    std::vector<std::tuple<std::size_t, std::size_t, Complex>> trip;
    detail::scan_terms(terms,
                       [&](std::size_t r, std::size_t c, Complex v) { trip.emplace_back(r, c, v); });
    std::sort(trip.begin(), trip.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });

    SparseHermitian m;
    m.dim_ = dim;
    m.row_ptr_.assign(dim + 1, 0);
    for (std::size_t t = 0; t < trip.size();) {
      const auto [r, c, v0] = trip[t];
      Complex v = v0;
      std::size_t u = t + 1;
      while (u < trip.size() && std::get<0>(trip[u]) == r && std::get<1>(trip[u]) == c) {
        v += std::get<2>(trip[u]);
        ++u;
      }
      if (v != Complex(0.0, 0.0)) {
        m.col_.push_back(c);
        m.val_.push_back(v);
        if (v.imag() != 0.0) m.real_ = false;
        ++m.row_ptr_[r + 1];
      }
      t = u;
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
  }

  std::size_t dim() const { return dim_; }
  std::size_t nonzeros() const { return val_.size(); }
  bool is_real() const { return real_; }

  void apply(const Vector& x, Vector& y) const {
    y.setZero(static_cast<Eigen::Index>(dim_));
    for (std::size_t r = 0; r < dim_; ++r) {
      Complex acc(0.0, 0.0);
      for (std::size_t t = row_ptr_[r]; t < row_ptr_[r + 1]; ++t) {
        acc += val_[t] * x(static_cast<Eigen::Index>(col_[t]));
      }
      y(static_cast<Eigen::Index>(r)) = acc;
    }
  }

  // Real-arithmetic product; valid only when is_real().
  void apply_real(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero(static_cast<Eigen::Index>(dim_));
    for (std::size_t r = 0; r < dim_; ++r) {
      double acc = 0.0;
      for (std::size_t t = row_ptr_[r]; t < row_ptr_[r + 1]; ++t) {
        acc += val_[t].real() * x(static_cast<Eigen::Index>(col_[t]));
      }
      y(static_cast<Eigen::Index>(r)) = acc;
    }
  }

  // max |A(r,c) - conj(A(c,r))| over stored entries.
  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t t = row_ptr_[r]; t < row_ptr_[r + 1]; ++t) {
        worst = std::max(worst, std::abs(val_[t] - std::conj(entry(col_[t], r))));
      }
    }
    return worst;
  }

  Complex entry(std::size_t r, std::size_t c) const {
    const auto lo = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    const auto hi = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(lo, hi, c);
    if (it == hi || *it != c) return {0.0, 0.0};
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

 private:
  std::size_t dim_ = 0;
  bool real_ = true;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<Complex> val_;
};

// Applies the term list on the fly; nothing is materialized.
class MatrixFreeOp {
 public:
  explicit MatrixFreeOp(TermList terms) : terms_(std::move(terms)), real_(terms_are_real(terms_)) {
    for (const SiteTerm& t : terms_.singles) single_actions_.emplace_back(t.op);
    for (const BondTerm& t : terms_.bonds) bond_actions_.emplace_back(t.op);
  }

  std::size_t dim() const { return terms_.dimension(); }
  const TermList& terms() const { return terms_; }
  bool is_real() const { return real_; }

  void apply(const Vector& x, Vector& y) const { apply_impl<Vector, Complex>(x, y); }

  // Real-arithmetic product; valid only when is_real().
  void apply_real(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    apply_impl<Eigen::VectorXd, double>(x, y);
  }

 private:
  template <class Vec, class Scalar>
  void apply_impl(const Vec& x, Vec& y) const {
    const int d = terms_.dim_local;
    const std::size_t dim = this->dim();
    y.setZero(static_cast<Eigen::Index>(dim));
    if (terms_.constant != 0.0) y = terms_.constant * x;

    auto coeff = [](const Complex& v) {
      if constexpr (std::is_same_v<Scalar, double>) {
        return v.real();
      } else {
        return v;
      }
    };
    for (std::size_t s = 0; s < terms_.singles.size(); ++s) {
      const std::size_t stride = site_stride(terms_.singles[s].site, terms_.sites, d);
      const auto& cols = single_actions_[s].by_col;
      for (std::size_t i = 0; i < dim; ++i) {
        const int c = static_cast<int>(i / stride) % d;
        for (const auto& [r, v] : cols[c]) {
          y(static_cast<Eigen::Index>(i + static_cast<std::size_t>(r - c) * stride)) +=
              coeff(v) * x(static_cast<Eigen::Index>(i));
        }
      }
    }
    for (std::size_t bnd = 0; bnd < terms_.bonds.size(); ++bnd) {
      const std::size_t stride_l = site_stride(terms_.bonds[bnd].left, terms_.sites, d);
      const std::size_t stride_r = site_stride(terms_.bonds[bnd].left + 1, terms_.sites, d);
      const auto& cols = bond_actions_[bnd].by_col;
      for (std::size_t i = 0; i < dim; ++i) {
        const int cl = static_cast<int>(i / stride_l) % d;
        const int cr = static_cast<int>(i / stride_r) % d;
        for (const auto& [r, v] : cols[cl * d + cr]) {
          const std::size_t row = i + static_cast<std::size_t>(r / d - cl) * stride_l +
                                  static_cast<std::size_t>(r % d - cr) * stride_r;
          y(static_cast<Eigen::Index>(row)) += coeff(v) * x(static_cast<Eigen::Index>(i));
        }
      }
    }
  }

  TermList terms_;
  bool real_ = false;
  std::vector<detail::LocalAction> single_actions_;
  std::vector<detail::LocalAction> bond_actions_;
};

struct BuildOptions {
  std::size_t dense_cap = 4096;       // dense storage up to here
  std::size_t sparse_cap = 16384;     // sparse CSR up to here, matrix-free beyond
  std::size_t max_dim = std::size_t(1) << 27;
  bool force_dense = false;           // dense at 8192+ costs ~1 GB; opt-in only
  bool force_matrix_free = false;
};

class OperatorMatrix {
 public:
  enum class Storage { Dense, Sparse, MatrixFree };

  OperatorMatrix(TermList terms, Storage storage)
      : terms_(std::move(terms)), storage_(storage), real_(terms_are_real(terms_)) {
    switch (storage_) {
      case Storage::Dense: dense_ = assemble_dense(terms_); break;
      case Storage::Sparse: sparse_ = SparseHermitian::from_terms(terms_); break;
      case Storage::MatrixFree: matfree_.emplace(terms_); break;
    }
  }

  Storage storage() const { return storage_; }
  std::size_t dim() const { return terms_.dimension(); }
  const TermList& terms() const { return terms_; }

  bool is_dense() const { return storage_ == Storage::Dense; }
  const Matrix& dense() const {
    if (!is_dense()) throw std::logic_error("operator is not stored densely");
    return dense_;
  }
  const SparseHermitian& sparse() const {
    if (storage_ != Storage::Sparse) throw std::logic_error("operator is not stored sparsely");
    return sparse_;
  }

  void apply(const Vector& x, Vector& y) const {
    switch (storage_) {
      case Storage::Dense: y = dense_ * x; break;
      case Storage::Sparse: sparse_.apply(x, y); break;
      case Storage::MatrixFree: matfree_->apply(x, y); break;
    }
  }

  bool is_real() const { return real_; }

  // Real-arithmetic product; valid only when is_real().
  void apply_real(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    switch (storage_) {
      case Storage::Dense: y.noalias() = dense_.real() * x; break;
      case Storage::Sparse: sparse_.apply_real(x, y); break;
      case Storage::MatrixFree: matfree_->apply_real(x, y); break;
    }
  }

  // Dense/sparse: exact entrywise check.  Matrix-free: randomized symmetry
  // probe |<u,Hv> - conj(<v,Hu>)|.
  double hermiticity_defect() const {
    switch (storage_) {
      case Storage::Dense: return (dense_ - dense_.adjoint()).cwiseAbs().maxCoeff();
      case Storage::Sparse: return sparse_.hermiticity_defect();
      case Storage::MatrixFree: {
        std::mt19937_64 rng(123);
        std::normal_distribution<double> g;
        const auto n = static_cast<Eigen::Index>(dim());
        double worst = 0.0;
        for (int probe = 0; probe < 3; ++probe) {
          Vector u(n), v(n), hu(n), hv(n);
          for (Eigen::Index i = 0; i < n; ++i) {
            u(i) = Complex(g(rng), g(rng));
            v(i) = Complex(g(rng), g(rng));
          }
          u.normalize();
          v.normalize();
          apply(u, hu);
          apply(v, hv);
          worst = std::max(worst, std::abs(u.dot(hv) - std::conj(v.dot(hu))));
        }
        return worst;
      }
    }
    return 0.0;
  }

  std::string basis_tag = "full";

 private:
  TermList terms_;
  Storage storage_;
  bool real_ = false;
  Matrix dense_;
  SparseHermitian sparse_;
  std::optional<MatrixFreeOp> matfree_;
};

inline OperatorMatrix build_hamiltonian(const ModelSpec& spec, const BuildOptions& opt = {}) {
  TermList terms = hamiltonian_terms(spec);
  const std::size_t dim = terms.dimension();
  if (dim > opt.max_dim) {
    throw std::invalid_argument("Hilbert space dimension " + std::to_string(dim) +
                                " exceeds the configured limit");
  }
  OperatorMatrix::Storage st;
  if (opt.force_matrix_free) {
    st = OperatorMatrix::Storage::MatrixFree;
  } else if (opt.force_dense || dim <= opt.dense_cap) {
    st = OperatorMatrix::Storage::Dense;
  } else if (dim <= opt.sparse_cap) {
    st = OperatorMatrix::Storage::Sparse;
  } else {
    st = OperatorMatrix::Storage::MatrixFree;
  }
  return OperatorMatrix(std::move(terms), st);
}

// Restriction of the term list to one total-S3 sector.  Any coupling out of
// the sector above `coupling_tol` is an error: the caller asserted an axial
// field, and a transverse component breaks the conservation law.
inline Matrix project_to_sector(const TermList& terms, const SectorBasis& basis,
                                double coupling_tol = kTightTol) {
  const std::size_t n = basis.count();
  Matrix h = Matrix::Zero(n, n);
  double worst_coupling = 0.0;
  for (std::size_t kcol = 0; kcol < n; ++kcol) {
    const std::size_t full_col = basis.states[kcol];
    // apply all terms to the basis vector e_{full_col}
    detail::scan_terms_column(terms, full_col, [&](std::size_t row, Complex v) {
      const std::ptrdiff_t krow = basis.position(row);
      if (krow < 0) {
        worst_coupling = std::max(worst_coupling, std::abs(v));
      } else {
        h(static_cast<Eigen::Index>(krow), static_cast<Eigen::Index>(kcol)) += v;
      }
    });
  }
  if (worst_coupling > coupling_tol) {
    throw std::invalid_argument("operator couples different total-S3 sectors (|entry| = " +
                                std::to_string(worst_coupling) + "); sector projection refused");
  }
  return h;
}

// Both sides of the droplet splitting identity
//   H^{++}_{[1,b]}(B) - 2 j^2 A = H^{+-}_{[1,y]}(B') + H^{-+}_{[y,b]}(B'),
//   B' = (B1/2, B2/2, B3/2 - jA) applied at the shared site y,
// assembled independently; returns the max-abs entry of the difference.
inline double decomposition_residual(const ModelSpec& spec) {
  if (spec.bc != BoundaryCondition::PlusPlus) {
    throw std::invalid_argument("decomposition check requires droplet boundary conditions");
  }
  if (!spec.field) throw std::invalid_argument("decomposition check requires a field site");
  const FieldSpec f = *spec.field;
  if (f.site <= 1 || f.site >= spec.sites) {
    throw std::invalid_argument("field site must be interior for the splitting identity");
  }
  const double j = spec.spin.spin_j();

  ModelSpec lhs = spec;
  Matrix hl = assemble_dense(hamiltonian_terms(lhs));
  hl -= 2.0 * j * j * spec.spin.a_field * Matrix::Identity(hl.rows(), hl.cols());

  const FieldSpec half{f.b1 / 2.0, f.b2 / 2.0, f.b3 / 2.0 - j * spec.spin.a_field, f.site};
  ModelSpec left = spec;
  left.bc = BoundaryCondition::PlusMinus;
  left.interval = Interval{1, f.site};
  left.field = half;
  ModelSpec right = spec;
  right.bc = BoundaryCondition::MinusPlus;
  right.interval = Interval{f.site, spec.sites};
  right.field = half;

  const Matrix hr = assemble_dense(hamiltonian_terms(left)) + assemble_dense(hamiltonian_terms(right));
  return (hl - hr).cwiseAbs().maxCoeff();
}

}  // namespace xxzpin
