#include "xxzpin/operator_matrix.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

using namespace xxzpin;
using Catch::Approx;

namespace {

// Independent assembly oracle: embeds every term by explicit Kronecker
// products, never touching the digit/stride arithmetic of the production
// backends.
Matrix kron_oracle(const ModelSpec& spec) {
  const TermList terms = hamiltonian_terms(spec);
  const int d = terms.dim_local;
  const std::size_t dim = terms.dimension();
  Matrix h = terms.constant * Matrix::Identity(dim, dim);

  auto embed1 = [&](int site, const Matrix& op) {
    Matrix acc = Matrix::Identity(1, 1);
    for (int x = 1; x <= terms.sites; ++x) {
      acc = kron(acc, x == site ? op : Matrix::Identity(d, d));
    }
    return acc;
  };
  auto embed2 = [&](int left, const Matrix& op) {
    Matrix acc = Matrix::Identity(1, 1);
    for (int x = 1; x <= terms.sites; ++x) {
      if (x == left) {
        acc = kron(acc, op);
        ++x;  // op covers (left, left+1)
      } else {
        acc = kron(acc, Matrix::Identity(d, d));
      }
    }
    return acc;
  };

  for (const SiteTerm& t : terms.singles) h += embed1(t.site, t.op);
  for (const BondTerm& t : terms.bonds) h += embed2(t.left, t.op);
  return h;
}

ModelSpec kink_spec(double j, double delta, int sites) {
  ModelSpec m;
  m.sites = sites;
  m.spin = SpinParams::make(j, delta);
  m.bc = BoundaryCondition::PlusMinus;
  return m;
}

std::size_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t acc = 1;
  for (int i = 0; i < k; ++i) acc = acc * static_cast<std::size_t>(n - i) / (i + 1);
  return acc;
}

}  // namespace

TEST_CASE("bond terms: spectra and kernels at spin 1/2") {
  const SpinParams sp = SpinParams::make(0.5, 2.25);
  const double q = sp.q;

  SECTION("kink bond has eigenvalues {0,0,0,1}") {
    const Matrix h = bond_term(BondKind::Kink, sp);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    CHECK(es.eigenvalues()(0) == Approx(0.0).margin(1e-13));
    CHECK(es.eigenvalues()(1) == Approx(0.0).margin(1e-13));
    CHECK(es.eigenvalues()(2) == Approx(0.0).margin(1e-13));
    CHECK(es.eigenvalues()(3) == Approx(1.0).epsilon(1e-13));
  }

  SECTION("kink bond kernel: up-up, down-down, and up-down + q down-up") {
    const Matrix h = bond_term(BondKind::Kink, sp);
    Vector v(4);
    v << 1, 0, 0, 0;
    CHECK((h * v).norm() < 1e-13);
    v << 0, 0, 0, 1;
    CHECK((h * v).norm() < 1e-13);
    v << 0, 1, q, 0;  // basis order: uu, ud, du, dd
    CHECK((h * v).norm() < 1e-13);
    v << 0, q, -1, 0;  // the excited direction
    CHECK((h * v - v).norm() < 1e-13);
  }

  SECTION("bare bond annihilates the aligned states") {
    const Matrix h = bond_term(BondKind::Bare, sp);
    Vector v(4);
    v << 1, 0, 0, 0;
    CHECK((h * v).norm() < 1e-13);
    v << 0, 0, 0, 1;
    CHECK((h * v).norm() < 1e-13);
  }

  SECTION("kink and antikink bonds are positive semidefinite across spins") {
    for (double j : {0.5, 1.0, 1.5}) {
      for (double delta : {1.5, 2.25, 4.0}) {
        const SpinParams p = SpinParams::make(j, delta);
        for (BondKind kind : {BondKind::Kink, BondKind::Antikink}) {
          Eigen::SelfAdjointEigenSolver<Matrix> es(bond_term(kind, p));
          CHECK(es.eigenvalues()(0) > -1e-12);
        }
      }
    }
  }
}

TEST_CASE("assembly backends agree with the Kronecker oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const BoundaryCondition bcs[] = {BoundaryCondition::Bare, BoundaryCondition::PlusMinus,
                                   BoundaryCondition::MinusPlus, BoundaryCondition::PlusPlus,
                                   BoundaryCondition::MinusMinus};
  for (int t = 0; t < 12; ++t) {
    ModelSpec m;
    const double js[] = {0.5, 1.0, 1.5};
    m.spin = SpinParams::make(js[t % 3], 1.3 + 2.0 * std::abs(uni(rng)));
    m.sites = (t % 3 == 0) ? 5 : 3;
    m.bc = bcs[t % 5];
    if (t % 2 == 0) m.field = FieldSpec{uni(rng), uni(rng), uni(rng), 1 + t % m.sites};
    if (t % 4 == 3) m.interval = Interval{2, m.sites};  // sub-chain embedded by identity
    if (m.field && m.interval &&
        (m.field->site < m.interval->first || m.field->site > m.interval->last)) {
      m.field->site = m.interval->first;
    }

    const Matrix oracle = kron_oracle(m);
    const TermList terms = hamiltonian_terms(m);

    const Matrix dense = assemble_dense(terms);
    CHECK((dense - oracle).cwiseAbs().maxCoeff() < 1e-13);

    const SparseHermitian sparse = SparseHermitian::from_terms(terms);
    const MatrixFreeOp matfree(terms);
    Vector x(static_cast<Eigen::Index>(terms.dimension()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = Complex(uni(rng), uni(rng));
    Vector y_sparse(x.size()), y_free(x.size());
    sparse.apply(x, y_sparse);
    matfree.apply(x, y_free);
    const Vector y_oracle = oracle * x;
    CHECK((y_sparse - y_oracle).norm() < 1e-12 * y_oracle.norm() + 1e-13);
    CHECK((y_free - y_oracle).norm() < 1e-12 * y_oracle.norm() + 1e-13);
  }
}

TEST_CASE("assembled operators are Hermitian") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int t = 0; t < 6; ++t) {
    ModelSpec m;
    m.spin = SpinParams::make(t % 2 ? 1.0 : 0.5, 1.5 + std::abs(uni(rng)));
    m.sites = 4;
    m.bc = t % 2 ? BoundaryCondition::PlusPlus : BoundaryCondition::PlusMinus;
    m.field = FieldSpec{uni(rng), uni(rng), uni(rng), 2};
    const TermList terms = hamiltonian_terms(m);
    CHECK(OperatorMatrix(terms, OperatorMatrix::Storage::Dense).hermiticity_defect() < 1e-12);
    CHECK(OperatorMatrix(terms, OperatorMatrix::Storage::Sparse).hermiticity_defect() < 1e-12);
    CHECK(OperatorMatrix(terms, OperatorMatrix::Storage::MatrixFree).hermiticity_defect() < 1e-12);
  }
}

TEST_CASE("kink chains are frustration free") {
  SECTION("nonnegative spectrum") {
    for (double j : {0.5, 1.0}) {
      for (double delta : {1.5, 2.25, 3.5}) {
        for (int b : {3, 4}) {
          const ModelSpec m = kink_spec(j, delta, b);
          Eigen::SelfAdjointEigenSolver<Matrix> es(assemble_dense(hamiltonian_terms(m)));
          CHECK(es.eigenvalues()(0) > -1e-12);
        }
      }
    }
  }
  SECTION("kernel dimension is 2jb + 1") {
    for (double j : {0.5, 1.0}) {
      for (int b = 2; b <= 6; ++b) {
        if (std::pow(2 * j + 1, b) > 1100) continue;
        const ModelSpec m = kink_spec(j, 2.25, b);
        Eigen::SelfAdjointEigenSolver<Matrix> es(assemble_dense(hamiltonian_terms(m)));
        int zeros = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
          if (es.eigenvalues()(i) < 1e-9) ++zeros;
        }
        CHECK(zeros == static_cast<int>(2 * j * b) + 1);
      }
    }
  }
}

TEST_CASE("four-site kink chain: five zero modes") {
  const ModelSpec m = kink_spec(0.5, 2.25, 4);
  Eigen::SelfAdjointEigenSolver<Matrix> es(assemble_dense(hamiltonian_terms(m)));
  for (int i = 0; i < 5; ++i) CHECK(std::abs(es.eigenvalues()(i)) < 1e-12);
  CHECK(es.eigenvalues()(5) > 0.1);
}

TEST_CASE("two-site kink chain with transverse field: closed-form spectrum") {
  // Eigenvalues of H are +-|B|/2 and (1 +- sqrt(1 + |B|^2 - 2 B3 A))/2.
  ModelSpec m = kink_spec(0.5, 2.0, 2);
  m.field = FieldSpec{1.0, 0.0, 0.0, 1};
  Eigen::SelfAdjointEigenSolver<Matrix> es(assemble_dense(hamiltonian_terms(m)));
  const double r = std::sqrt(2.0);
  RealVector expect(4);
  expect << -0.5, 0.5 * (1.0 - r), 0.5, 0.5 * (1.0 + r);
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 4; ++i) CHECK(es.eigenvalues()(i) == Approx(expect(i)).margin(1e-12));
  CHECK(es.eigenvalues()(1) == Approx(-0.207107).margin(1e-6));
  CHECK(es.eigenvalues()(3) == Approx(1.207107).margin(1e-6));
}

TEST_CASE("droplet splitting identity") {
  SECTION("quoted instances") {
    ModelSpec m;
    m.sites = 5;
    m.spin = SpinParams::make(0.5, 2.25);
    m.bc = BoundaryCondition::PlusPlus;
    m.field = FieldSpec{0.3, 0.1, -0.2, 3};
    CHECK(decomposition_residual(m) < 1e-12);

    m.field = FieldSpec{0, 0, 0, 3};
    CHECK(decomposition_residual(m) < 1e-12);

    ModelSpec m1;
    m1.sites = 3;
    m1.spin = SpinParams::make(1.0, 2.25);
    m1.bc = BoundaryCondition::PlusPlus;
    m1.field = FieldSpec{0.4, -0.3, 0.7, 2};
    CHECK(decomposition_residual(m1) < 1e-12);
  }
  SECTION("randomized instances") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      ModelSpec m;
      const double js[] = {0.5, 1.0, 1.5};
      const double j = js[t % 3];
      m.sites = j < 0.8 ? 4 + t % 3 : 3;
      m.spin = SpinParams::make(j, 1.4 + 2.5 * std::abs(uni(rng)));
      m.bc = BoundaryCondition::PlusPlus;
      m.field = FieldSpec{uni(rng), uni(rng), uni(rng), 2 + t % (m.sites - 2)};
      CHECK(decomposition_residual(m) < 1e-12);
    }
  }
  SECTION("edge site rejected") {
    ModelSpec m;
    m.sites = 4;
    m.spin = SpinParams::make(0.5, 2.0);
    m.bc = BoundaryCondition::PlusPlus;
    m.field = FieldSpec{1, 0, 0, 1};
    CHECK_THROWS_AS(decomposition_residual(m), std::invalid_argument);
  }
}

TEST_CASE("sector bases") {
  const SpinParams half = SpinParams::make(0.5, 2.25);

  SECTION("counts") {
    CHECK(sector_basis(13, half, 13).count() == 1);          // all up, 2m = 13
    CHECK(sector_basis(13, half, 1).count() == binom(13, 6));  // 2m = 1
    const SpinParams one = SpinParams::make(1.0, 2.25);
    CHECK(sector_basis(2, one, 0).count() == 3);
  }

  SECTION("sectors partition the full space") {
    for (double j : {0.5, 1.0}) {
      const SpinParams sp = SpinParams::make(j, 2.0);
      const int b = 4;
      std::set<std::size_t> seen;
      std::size_t total = 0;
      for (int two_m : sector_two_m_values(b, sp)) {
        const SectorBasis basis = sector_basis(b, sp, two_m);
        total += basis.count();
        for (std::size_t s : basis.states) CHECK(seen.insert(s).second);
        CHECK(std::is_sorted(basis.states.begin(), basis.states.end()));
      }
      CHECK(total == static_cast<std::size_t>(std::pow(sp.dim_local(), b) + 0.5));
    }
  }

  SECTION("unreachable sectors throw") {
    CHECK_THROWS_AS(sector_basis(3, half, 4), std::invalid_argument);  // parity mismatch
    CHECK_THROWS_AS(sector_basis(3, half, 5), std::invalid_argument);  // out of range
  }
}

TEST_CASE("sector projection") {
  const SpinParams half = SpinParams::make(0.5, 2.25);

  SECTION("per-sector kink chains have exactly one zero mode") {
    ModelSpec m = kink_spec(0.5, 2.25, 6);
    const TermList terms = hamiltonian_terms(m);
    for (int two_m : sector_two_m_values(6, half)) {
      const Matrix block = project_to_sector(terms, sector_basis(6, half, two_m));
      Eigen::SelfAdjointEigenSolver<Matrix> es(block);
      int zeros = 0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (std::abs(es.eigenvalues()(i)) < 1e-9) ++zeros;
      }
      CHECK(zeros == 1);
    }
  }

  SECTION("transverse fields are rejected") {
    ModelSpec m = kink_spec(0.5, 2.25, 4);
    m.field = FieldSpec{0.5, 0.0, 0.0, 2};
    const TermList terms = hamiltonian_terms(m);
    CHECK_THROWS_AS(project_to_sector(terms, sector_basis(4, half, 0)), std::invalid_argument);
  }

  SECTION("merged sector spectra reproduce the full spectrum") {
    ModelSpec m = kink_spec(0.5, 2.25, 6);
    m.field = FieldSpec{0, 0, 0.3, 3};
    const TermList terms = hamiltonian_terms(m);
    std::vector<double> merged;
    for (int two_m : sector_two_m_values(6, half)) {
      const Matrix block = project_to_sector(terms, sector_basis(6, half, two_m));
      Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) merged.push_back(es.eigenvalues()(i));
    }
    std::sort(merged.begin(), merged.end());
    Eigen::SelfAdjointEigenSolver<Matrix> full(assemble_dense(terms), Eigen::EigenvaluesOnly);
    REQUIRE(merged.size() == static_cast<std::size_t>(full.eigenvalues().size()));
    for (std::size_t i = 0; i < merged.size(); ++i) {
      CHECK(merged[i] == Approx(full.eigenvalues()(static_cast<Eigen::Index>(i))).margin(1e-10));
    }
  }
}

TEST_CASE("axial fields conserve total S3") {
  ModelSpec m = kink_spec(0.5, 2.25, 5);
  m.field = FieldSpec{0, 0, 0.7, 3};
  const Matrix h = assemble_dense(hamiltonian_terms(m));
  // [H, S3_tot] via the dense commutator
  Matrix s3tot = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    double m_tot = 0.0;
    for (int x = 1; x <= m.sites; ++x) {
      m_tot += 0.5 - digit_at(static_cast<std::size_t>(i), x, m.sites, 2);
    }
    s3tot(i, i) = m_tot;
  }
  CHECK((h * s3tot - s3tot * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("global spin flip maps between boundary-condition pairs") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int t = 0; t < 6; ++t) {
    ModelSpec m;
    m.spin = SpinParams::make(t % 2 ? 1.0 : 0.5, 1.6 + std::abs(uni(rng)));
    m.sites = t % 2 ? 3 : 4;
    m.bc = t % 4 < 2 ? BoundaryCondition::PlusPlus : BoundaryCondition::PlusMinus;
    m.field = FieldSpec{uni(rng), uni(rng), uni(rng), 1 + t % m.sites};

    ModelSpec flipped = m;
    flipped.bc = (m.bc == BoundaryCondition::PlusPlus) ? BoundaryCondition::MinusMinus
                                                       : BoundaryCondition::MinusPlus;
    flipped.field = FieldSpec{m.field->b1, -m.field->b2, -m.field->b3, m.field->site};

    const Matrix h = assemble_dense(hamiltonian_terms(m));
    const Matrix g = assemble_dense(hamiltonian_terms(flipped));
    double worst = 0.0;
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) {
        const auto fr = static_cast<Eigen::Index>(
            spin_flip_index(static_cast<std::size_t>(r), m.sites, m.spin.dim_local()));
        const auto fc = static_cast<Eigen::Index>(
            spin_flip_index(static_cast<std::size_t>(c), m.sites, m.spin.dim_local()));
        worst = std::max(worst, std::abs(h(fr, fc) - g(r, c)));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("build guards") {
  SECTION("field site outside the interval") {
    ModelSpec m = kink_spec(0.5, 2.0, 6);
    m.interval = Interval{2, 5};
    m.field = FieldSpec{1, 0, 0, 6};
    CHECK_THROWS_AS(hamiltonian_terms(m), std::invalid_argument);
  }
  SECTION("dimension overflow") {
    ModelSpec m = kink_spec(0.5, 2.0, 40);
    BuildOptions opt;
    opt.max_dim = 1 << 20;
    CHECK_THROWS_AS(build_hamiltonian(m, opt), std::invalid_argument);
  }
  SECTION("storage thresholds") {
    ModelSpec m = kink_spec(0.5, 2.0, 4);  // dim 16
    BuildOptions opt;
    opt.dense_cap = 8;
    opt.sparse_cap = 8;
    CHECK(build_hamiltonian(m, opt).storage() == OperatorMatrix::Storage::MatrixFree);
    opt.sparse_cap = 64;
    CHECK(build_hamiltonian(m, opt).storage() == OperatorMatrix::Storage::Sparse);
    opt.force_dense = true;
    CHECK(build_hamiltonian(m, opt).storage() == OperatorMatrix::Storage::Dense);
  }
}
