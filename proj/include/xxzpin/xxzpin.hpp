#pragma once

// Exact diagonalization and certified spectral gaps for the ferromagnetic
// spin-j XXZ chain with boundary fields and a single-site pinning field.

#include "xxzpin/spin_algebra.hpp"
#include "xxzpin/model.hpp"
#include "xxzpin/operator_matrix.hpp"
#include "xxzpin/analytic.hpp"
#include "xxzpin/solver.hpp"
#include "xxzpin/gap_bound.hpp"
#include "xxzpin/csv.hpp"
#include "xxzpin/svg.hpp"
#include "xxzpin/sweep.hpp"
