#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

namespace probesched::detail {

// Dense tableau simplex for   max c'x  s.t.  A x <= b,  x >= 0,  b >= 0.
// With b >= 0 the slack basis is feasible, so no phase one is needed. Bland's
// rule (lowest eligible index on entry and on ratio ties) rules out cycling on
// the heavily degenerate max-min programs this is used for.
template <class Scalar>
class TableauSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TableauSimplex(const Matrix& A, const Vector& b, const Vector& c, Scalar eps = Scalar(1e-12))
      : rows_(A.rows()), cols_(A.cols()), eps_(eps), basis_(static_cast<std::size_t>(A.rows())) {
    tableau_ = Matrix::Zero(rows_ + 1, cols_ + rows_ + 1);
    tableau_.topLeftCorner(rows_, cols_) = A;
    tableau_.block(0, cols_, rows_, rows_).setIdentity();
    tableau_.topRightCorner(rows_, 1) = b;
    tableau_.bottomLeftCorner(1, cols_) = -c.transpose();
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
  }

  /// Runs to optimality; returns the optimal x, or nullopt if unbounded or the
  /// pivot budget ran out (`exhausted()` tells which).
  std::optional<Vector> solve(long max_pivots) {
    const Eigen::Index rhs = cols_ + rows_;
    for (pivots_ = 0; pivots_ < max_pivots; ++pivots_) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < rhs; ++j)
        if (tableau_(rows_, j) < -eps_) {
          enter = j;
          break;
        }
      if (enter < 0) return extract();

      Eigen::Index leave = -1;
      Scalar best = 0;
      for (Eigen::Index i = 0; i < rows_; ++i) {
        Scalar a = tableau_(i, enter);
        if (a <= eps_) continue;
        Scalar ratio = tableau_(i, rhs) / a;
        if (leave < 0 || ratio < best - eps_ ||
            (std::abs(ratio - best) <= eps_ && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return std::nullopt;  // unbounded
      pivot(leave, enter);
    }
    exhausted_ = true;
    return std::nullopt;
  }

  bool exhausted() const { return exhausted_; }
  long pivots() const { return pivots_; }
  Scalar objective() const { return tableau_(rows_, cols_ + rows_); }

 private:
  void pivot(Eigen::Index r, Eigen::Index c) {
    tableau_.row(r) /= tableau_(r, c);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      Scalar f = tableau_(i, c);
      if (f != Scalar(0)) tableau_.row(i) -= f * tableau_.row(r);
    }
    basis_[r] = c;
  }

  Vector extract() const {
    Vector x = Vector::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (basis_[i] < cols_) x[basis_[i]] = tableau_(i, cols_ + rows_);
    return x;
  }

  Eigen::Index rows_, cols_;
  Scalar eps_;
  Matrix tableau_;
  std::vector<Eigen::Index> basis_;
  long pivots_ = 0;
  bool exhausted_ = false;
};

}  // namespace probesched::detail
