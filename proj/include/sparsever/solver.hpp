#ifndef SPARSEVER_SOLVER_HPP_
#define SPARSEVER_SOLVER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sparsever/common.hpp"

namespace sparsever {

/// Settings for the penalized sparse coding problem
///   minimize ||y - A a||_2^2 + lambda * ||a||_1.
/// `tol` bounds the stationarity (KKT) violation accepted as converged.
/// After `warm_start_iter` proximal-gradient iterations the solver switches
/// to active-set refinement; a value >= max_iter keeps it purely first order.
/// The default skips the warm start: at small lambda the accelerated
/// iterates stay denser than the row count for hundreds of iterations, and
/// the refinement first has to prune them back to independent columns.
struct SolverConfig {
  double lambda = 0.002;
  double tol = 1e-6;
  int max_iter = 5000;
  int warm_start_iter = 0;

  void validate() const {
    require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::kInvalidArgument,
            "solver: lambda must be finite and >= 0");
    require(std::isfinite(tol) && tol > 0.0, ErrorCode::kInvalidArgument,
            "solver: tol must be > 0");
    require(max_iter >= 1, ErrorCode::kInvalidArgument, "solver: max_iter must be >= 1");
    require(warm_start_iter >= 0, ErrorCode::kInvalidArgument,
            "solver: warm_start_iter must be >= 0");
  }
};

template <typename Scalar>
struct BasicSparseCode {
  DynamicVector<Scalar> coefficients;
  Scalar residual_norm = 0;
  int iterations = 0;
  bool converged = false;
};

using SparseCode = BasicSparseCode<double>;

/// Called once per iteration with the objective of the accepted iterate.
template <typename Scalar>
using IterationObserver = std::function<void(int iteration, Scalar objective)>;

template <typename DerivedA, typename DerivedY, typename DerivedX>
typename DerivedA::Scalar l1_objective(const Eigen::MatrixBase<DerivedA>& A,
                                       const Eigen::MatrixBase<DerivedY>& y,
                                       const Eigen::MatrixBase<DerivedX>& alpha,
                                       typename DerivedA::Scalar lambda) {
  return (y - A * alpha).squaredNorm() + lambda * alpha.template lpNorm<1>();
}

/// Largest violation of the optimality conditions of the penalized problem.
/// With g = A^T (y - A a): |g_j - (lambda/2) sign(a_j)| for a_j != 0, and
/// the excess of |g_j| over lambda/2 for a_j == 0.
template <typename DerivedA, typename DerivedY, typename DerivedX>
typename DerivedA::Scalar kkt_violation(const Eigen::MatrixBase<DerivedA>& A,
                                        const Eigen::MatrixBase<DerivedY>& y,
                                        const Eigen::MatrixBase<DerivedX>& alpha,
                                        typename DerivedA::Scalar lambda) {
  using Scalar = typename DerivedA::Scalar;
  const DynamicVector<Scalar> g = A.transpose() * (y - A * alpha);
  const Scalar half = lambda / Scalar(2);
  Scalar worst = 0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const Scalar v = alpha(j) != Scalar(0)
                         ? std::abs(g(j) - half * (alpha(j) > 0 ? Scalar(1) : Scalar(-1)))
                         : std::max(Scalar(0), std::abs(g(j)) - half);
    worst = std::max(worst, v);
  }
  return worst;
}

/// Power-iteration estimate of the largest eigenvalue of A^T A.
template <typename Derived>
typename Derived::Scalar spectral_norm_squared(const Eigen::MatrixBase<Derived>& A,
                                               int max_iter = 100,
                                               typename Derived::Scalar rel_tol = 1e-7) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = A.cols();
  DynamicVector<Scalar> v(m);
  for (Eigen::Index j = 0; j < m; ++j) v(j) = Scalar(1) + Scalar(j % 7) / Scalar(13);
  v.normalize();
  Scalar estimate = 0;
  for (int it = 0; it < max_iter; ++it) {
    DynamicVector<Scalar> w = A.transpose() * (A * v);
    const Scalar next = v.dot(w);
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    v = w / norm;
    if (std::abs(next - estimate) <= rel_tol * std::abs(next)) return std::max(next, norm);
    estimate = next;
  }
  return estimate;
}

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Scalar>
DynamicVector<Scalar> soft_threshold(const DynamicVector<Scalar>& v, Scalar t) {
  return v.unaryExpr([t](Scalar x) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return Scalar(0);
  });
}

template <typename Scalar>
std::vector<Eigen::Index> support_of(const DynamicVector<Scalar>& x) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) != Scalar(0)) s.push_back(j);
  }
  return s;
}

// Solves the stationarity equations restricted to the support and sign
// pattern of `x`. Returns true and writes `out` only when the result keeps
// the sign pattern and certifies optimality on every coordinate.
template <typename DerivedA, typename DerivedY, typename Scalar>
bool polish_on_support(const Eigen::MatrixBase<DerivedA>& A,
                       const Eigen::MatrixBase<DerivedY>& y,
                       const DynamicVector<Scalar>& x,
                       const std::vector<Eigen::Index>& support, Scalar lambda,
                       Scalar tol, DynamicVector<Scalar>& out) {
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k == 0 || k > A.rows()) return false;
  DynamicMatrix<Scalar> sub(A.rows(), k);
  DynamicVector<Scalar> signs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    sub.col(i) = A.col(support[static_cast<std::size_t>(i)]);
    signs(i) = x(support[static_cast<std::size_t>(i)]) > 0 ? Scalar(1) : Scalar(-1);
  }
  const DynamicMatrix<Scalar> gram = sub.transpose() * sub;
  const DynamicVector<Scalar> rhs = sub.transpose() * y - (lambda / Scalar(2)) * signs;
  Eigen::LDLT<DynamicMatrix<Scalar>> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return false;
  const DynamicVector<Scalar> coef = ldlt.solve(rhs);
  if (!coef.allFinite()) return false;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (coef(i) * signs(i) <= Scalar(0)) return false;
  }
  DynamicVector<Scalar> candidate = DynamicVector<Scalar>::Zero(A.cols());
  for (Eigen::Index i = 0; i < k; ++i) candidate(support[static_cast<std::size_t>(i)]) = coef(i);
  if (kkt_violation(A, y, candidate, lambda) > tol) return false;
  out = std::move(candidate);
  return true;
}

template <typename Scalar>
Scalar sign_of(Scalar v) {
  return v > 0 ? Scalar(1) : (v < 0 ? Scalar(-1) : Scalar(0));
}

// Moves x inside the null space of its support columns until they are
// linearly independent. Ax is unchanged and each move is taken in the
// direction that does not raise ||x||_1, stopping when a coordinate reaches
// zero, so the objective never increases.
template <typename DerivedA, typename Scalar>
void reduce_support(const Eigen::MatrixBase<DerivedA>& A, DynamicVector<Scalar>& x) {
  using Mat = DynamicMatrix<Scalar>;
  const std::vector<Eigen::Index> s = support_of(x);
  const auto k = static_cast<Eigen::Index>(s.size());
  Mat as(A.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) as.col(i) = A.col(s[static_cast<std::size_t>(i)]);
  const Eigen::FullPivLU<Mat> lu(as);
  if (lu.rank() == k) return;
  Mat z = lu.kernel();
  auto xs = [&](Eigen::Index i) -> Scalar& { return x(s[static_cast<std::size_t>(i)]); };
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    Scalar d = 0;
    for (Eigen::Index i = 0; i < k; ++i) d += sign_of(xs(i)) * z(i, c);
    if (d > 0) z.col(c) = -z.col(c);
    Eigen::Index p = -1;
    Scalar t = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < k; ++i) {
      if (xs(i) == 0 || z(i, c) * xs(i) >= 0) continue;
      const Scalar r = -xs(i) / z(i, c);
      if (r < t) {
        t = r;
        p = i;
      }
    }
    if (p < 0) continue;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (xs(i) == 0) continue;
      const Scalar next = xs(i) + t * z(i, c);
      xs(i) = sign_of(next) == sign_of(xs(i)) ? next : Scalar(0);
    }
    xs(p) = 0;
    // Later kernel vectors must keep the removed coordinate at zero.
    for (Eigen::Index j = c + 1; j < z.cols(); ++j) z.col(j) -= (z(p, j) / z(p, c)) * z.col(c);
  }
}

// Feature-sign search: repeatedly solves the stationarity system on the
// active set under a fixed sign pattern, line-searches along the segment to
// that solution over every zero crossing, and activates the most violating
// inactive coordinate once the active set is optimal. Each step lowers the
// objective. The Cholesky factor of the active Gram block is updated in
// place: a row is appended per activation and removed with Givens rotations
// when a coordinate leaves.
// Returns true when the full KKT conditions hold within tol.
template <typename DerivedA, typename DerivedY, typename Scalar>
bool feature_sign_refine(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedY>& y,
                         DynamicVector<Scalar>& x, Scalar& fx, Scalar lambda, Scalar tol,
                         int max_steps, int& steps, int iter_offset,
                         const IterationObserver<Scalar>& observer) {
  using Vec = DynamicVector<Scalar>;
  using Mat = DynamicMatrix<Scalar>;
  const Scalar half = lambda / Scalar(2);
  const Eigen::Index m = A.cols();
  const Eigen::Index cap = std::min(A.rows(), m);

  Mat gram(m, m);
  gram.template triangularView<Eigen::Lower>() = A.transpose() * A;
  gram.template triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Vec aty = A.transpose() * y;

  std::vector<Eigen::Index> active = support_of(x);
  if (static_cast<Eigen::Index>(active.size()) > cap) {
    // A support wider than the row count has a singular Gram block.
    reduce_support(A, x);
    active = support_of(x);
    fx = l1_objective(A, y, x, lambda);
    if (static_cast<Eigen::Index>(active.size()) > cap) {
      x.setZero();
      active.clear();
      fx = y.squaredNorm();
    }
  }
  Vec theta = x.unaryExpr([](Scalar v) { return sign_of(v); });

  Mat chol = Mat::Zero(cap, cap);
  auto k_now = [&] { return static_cast<Eigen::Index>(active.size()); };
  auto refactor = [&] {
    const Eigen::Index k = k_now();
    Mat gss(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        gss(i, j) = gram(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
    Eigen::LLT<Mat> llt(gss);
    if (llt.info() != Eigen::Success) return false;
    chol.topLeftCorner(k, k) = llt.matrixL();
    return true;
  };
  if (!refactor()) return false;

  // Deletes row p of the k x k factor and restores lower-triangular form.
  auto remove_row = [&](Eigen::Index p, Eigen::Index k) {
    for (Eigen::Index i = p; i + 1 < k; ++i) chol.row(i).head(k) = chol.row(i + 1).head(k);
    chol.row(k - 1).setZero();
    for (Eigen::Index i = p; i + 1 < k; ++i) {
      const Scalar a = chol(i, i);
      const Scalar b = chol(i, i + 1);
      if (b == Scalar(0)) continue;
      const Scalar rr = std::hypot(a, b);
      const Scalar c = a / rr;
      const Scalar sn = b / rr;
      for (Eigen::Index row = i; row + 1 < k; ++row) {
        const Scalar li = chol(row, i);
        const Scalar lj = chol(row, i + 1);
        chol(row, i) = c * li + sn * lj;
        chol(row, i + 1) = -sn * li + c * lj;
      }
    }
    chol.col(k - 1).setZero();
  };

  auto gradient = [&] {
    Vec g = aty;
    for (Eigen::Index j : active) g.noalias() -= gram.col(j) * x(j);
    return g;
  };
  Vec g = gradient();
  Scalar rr = (y - A * x).squaredNorm();
  // g is updated incrementally between steps and recomputed before any
  // optimality claim.
  bool fresh = true;

  while (steps < max_steps) {
    bool active_ok = true;
    for (Eigen::Index j : active) {
      if (std::abs(g(j) - half * theta(j)) > tol) {
        active_ok = false;
        break;
      }
    }
    if (active_ok) {
      Eigen::Index best = -1;
      Scalar best_abs = half + tol;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (theta(j) == Scalar(0) && std::abs(g(j)) > best_abs) {
          best_abs = std::abs(g(j));
          best = j;
        }
      }
      if (best < 0) {
        if (fresh) return true;
        g = gradient();
        rr = (y - A * x).squaredNorm();
        fresh = true;
        continue;
      }
      const Eigen::Index k = k_now();
      if (k >= cap) {
        // A square active block already fits y exactly up to the sign
        // pattern, so moving along x_S -= t*s*w, x_best = t*s (A_S w =
        // a_best) keeps A x fixed and lowers the L1 term. Walk until the
        // first active coordinate reaches zero and swap it out.
        const Scalar sgn = sign_of(g(best));
        Vec col(k);
        for (Eigen::Index i = 0; i < k; ++i) col(i) = gram(active[static_cast<std::size_t>(i)], best);
        const auto lower = chol.topLeftCorner(k, k).template triangularView<Eigen::Lower>();
        const Vec w = lower.transpose().solve(lower.solve(col));
        Eigen::Index leave = -1;
        Scalar t_leave = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index a = 0; a < k; ++a) {
          const Scalar rate = sgn * w(a);
          const Scalar xa = x(active[static_cast<std::size_t>(a)]);
          if (rate * xa > Scalar(0) && xa / rate < t_leave) {
            t_leave = xa / rate;
            leave = a;
          }
        }
        if (leave < 0 || !std::isfinite(t_leave)) return false;
        ++steps;
        for (Eigen::Index a = 0; a < k; ++a) x(active[static_cast<std::size_t>(a)]) -= t_leave * sgn * w(a);
        const Eigen::Index gone = active[static_cast<std::size_t>(leave)];
        x(gone) = 0;
        theta(gone) = 0;
        x(best) = t_leave * sgn;
        theta(best) = sgn;
        remove_row(leave, k);
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(leave));
        const Eigen::Index k1 = k - 1;
        Vec c1(k1);
        for (Eigen::Index i = 0; i < k1; ++i) c1(i) = gram(active[static_cast<std::size_t>(i)], best);
        const Vec w1 = chol.topLeftCorner(k1, k1).template triangularView<Eigen::Lower>().solve(c1);
        const Scalar piv = gram(best, best) - w1.squaredNorm();
        if (!(piv > Scalar(1e-12) * gram(best, best))) return false;
        chol.row(k1).head(k1) = w1.transpose();
        chol(k1, k1) = std::sqrt(piv);
        active.push_back(best);
        g = gradient();
        rr = (y - A * x).squaredNorm();
        fresh = true;
        fx = rr + lambda * x.template lpNorm<1>();
        if (observer) observer(iter_offset + steps, fx);
        continue;
      }
      Vec col(k);
      for (Eigen::Index i = 0; i < k; ++i) col(i) = gram(active[static_cast<std::size_t>(i)], best);
      const Vec w = chol.topLeftCorner(k, k).template triangularView<Eigen::Lower>().solve(col);
      const Scalar pivot = gram(best, best) - w.squaredNorm();
      if (!(pivot > Scalar(1e-12) * gram(best, best))) return false;
      chol.row(k).head(k) = w.transpose();
      chol(k, k) = std::sqrt(pivot);
      active.push_back(best);
      theta(best) = sign_of(g(best));
    }

    ++steps;
    const Eigen::Index k = k_now();
    Vec rhs(k);
    Vec xs(k);
    Vec gs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const Eigen::Index ja = active[static_cast<std::size_t>(a)];
      rhs(a) = aty(ja) - half * theta(ja);
      xs(a) = x(ja);
      gs(a) = g(ja);
    }
    const auto lower = chol.topLeftCorner(k, k).template triangularView<Eigen::Lower>();
    const Vec target = lower.transpose().solve(lower.solve(rhs));
    if (!target.allFinite()) return false;

    // Along x + t*dir the smooth term is rr - 2t<g_S, dir> + t^2 dir'G dir.
    const Vec dir = target - xs;
    const Vec ltd = lower.transpose() * dir;
    const Scalar rd = gs.dot(dir);
    const Scalar dd = ltd.squaredNorm();
    auto smooth_at = [&](Scalar t) { return rr - Scalar(2) * t * rd + t * t * dd; };
    auto objective_at = [&](Scalar t) {
      return smooth_at(t) + lambda * (xs + t * dir).template lpNorm<1>();
    };

    // Candidates: the full step and every sign change of a nonzero entry.
    Scalar best_t = 1;
    Scalar best_f = objective_at(Scalar(1));
    for (Eigen::Index a = 0; a < k; ++a) {
      if (xs(a) != Scalar(0) && xs(a) * target(a) < Scalar(0)) {
        const Scalar t = xs(a) / (xs(a) - target(a));
        if (t > Scalar(0) && t < Scalar(1)) {
          const Scalar f = objective_at(t);
          if (f < best_f) {
            best_f = f;
            best_t = t;
          }
        }
      }
    }
    if (!(best_f <= fx + Scalar(1e-12) * std::max(Scalar(1), fx))) return false;

    Vec next = xs + best_t * dir;
    for (Eigen::Index a = 0; a < k; ++a) {
      // Snap the coordinate(s) whose crossing defined the step onto zero.
      if (xs(a) != Scalar(0) && xs(a) * target(a) < Scalar(0) &&
          std::abs(xs(a) / (xs(a) - target(a)) - best_t) <=
              std::numeric_limits<Scalar>::epsilon() * 4) {
        next(a) = 0;
      }
    }
    const Vec moved = next - xs;
    for (Eigen::Index a = 0; a < k; ++a) {
      g.noalias() -= moved(a) * gram.col(active[static_cast<std::size_t>(a)]);
    }
    rr = std::max(Scalar(0), smooth_at(best_t));
    fresh = false;
    for (Eigen::Index a = k - 1; a >= 0; --a) {
      const auto pos = static_cast<std::size_t>(a);
      const Eigen::Index ja = active[pos];
      x(ja) = next(a);
      theta(ja) = sign_of(next(a));
      if (next(a) == Scalar(0)) {
        remove_row(a, k_now());
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(pos));
      }
    }
    if (steps % 64 == 0) {
      g = gradient();
      rr = (y - A * x).squaredNorm();
      fresh = true;
    }
    fx = rr + lambda * x.template lpNorm<1>();
    if (observer) observer(iter_offset + steps, fx);
  }
  return false;
}

}  // namespace detail

/// Accelerated proximal gradient (soft-thresholding with Nesterov momentum)
/// for the penalized L1 problem. The step size starts from a power-iteration
/// estimate of 2*sigma_max(A)^2 and backtracks if the quadratic upper bound
/// fails. An iterate is accepted only if it does not increase the objective;
/// otherwise momentum restarts, so the objective sequence is monotone.
///
/// Convergence is declared when the KKT violation drops to `cfg.tol`. Once the
/// support of the iterate stops changing, the restricted stationarity system
/// is solved directly and accepted if it certifies optimality. If the warm
/// start budget runs out first, feature-sign refinement takes over from the
/// best iterate.
template <typename DerivedA, typename DerivedY>
BasicSparseCode<typename DerivedA::Scalar> solve_l1(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedY>& y,
    const SolverConfig& cfg,
    const IterationObserver<typename DerivedA::Scalar>& observer = {}) {
  using Scalar = typename DerivedA::Scalar;
  using Vec = DynamicVector<Scalar>;
  cfg.validate();
  require(A.rows() > 0 && A.cols() > 0, ErrorCode::kInvalidArgument,
          "solve_l1: empty dictionary");
  require(y.size() == A.rows(), ErrorCode::kDimensionMismatch,
          "solve_l1: query has dimension " + std::to_string(y.size()) +
              ", dictionary rows " + std::to_string(A.rows()));
  require(detail::all_finite(A) && detail::all_finite(y), ErrorCode::kNonFinite,
          "solve_l1: non-finite input");

  const Scalar lambda = static_cast<Scalar>(cfg.lambda);
  const Scalar tol = static_cast<Scalar>(cfg.tol);
  const Scalar half = lambda / Scalar(2);
  const Eigen::Index m = A.cols();

  BasicSparseCode<Scalar> code;
  code.coefficients = Vec::Zero(m);

  const Vec aty = A.transpose() * y;
  if (aty.cwiseAbs().maxCoeff() <= half) {
    code.residual_norm = y.norm();
    code.converged = true;
    return code;
  }

  const int apg_budget = std::min(cfg.max_iter, cfg.warm_start_iter);
  Scalar lipschitz = apg_budget > 0 ? Scalar(2) * spectral_norm_squared(A) * Scalar(1.01) : Scalar(1);
  if (!(lipschitz > Scalar(0))) lipschitz = Scalar(1);

  Vec x = Vec::Zero(m);
  Vec x_prev = x;
  Vec ax = Vec::Zero(A.rows());
  Vec ax_prev = ax;
  Scalar fx = y.squaredNorm();
  Scalar t = 1;
  Scalar t_prev = 1;

  constexpr int kCheckEvery = 5;
  std::vector<Eigen::Index> last_support;
  int stable_checks = 0;
  bool polished_this_support = false;

  int it = 0;
  for (; it < apg_budget; ++it) {
    const Scalar beta = (t_prev - Scalar(1)) / t;
    const Vec w = x + beta * (x - x_prev);
    const Vec aw = ax + beta * (ax - ax_prev);
    const Vec rw = y - aw;
    const Scalar fw = rw.squaredNorm();
    const Vec grad = Scalar(-2) * (A.transpose() * rw);

    Vec z;
    Vec az;
    Scalar smooth_z = 0;
    for (int bt = 0; bt < 60; ++bt) {
      z = detail::soft_threshold<Scalar>(w - grad / lipschitz, lambda / lipschitz);
      az = A * z;
      smooth_z = (y - az).squaredNorm();
      const Vec step = z - w;
      const Scalar bound = fw + grad.dot(step) + Scalar(0.5) * lipschitz * step.squaredNorm();
      if (smooth_z <= bound + Scalar(1e-12) * std::max(Scalar(1), fw)) break;
      lipschitz *= Scalar(1.5);
    }
    const Scalar fz = smooth_z + lambda * z.template lpNorm<1>();

    if (fz <= fx) {
      x_prev.swap(x);
      ax_prev.swap(ax);
      x = std::move(z);
      ax = std::move(az);
      fx = fz;
      t_prev = t;
      t = (Scalar(1) + std::sqrt(Scalar(1) + Scalar(4) * t * t)) / Scalar(2);
    } else {
      // Restart momentum; the next step is a plain proximal step from x.
      x_prev = x;
      ax_prev = ax;
      t_prev = 1;
      t = 1;
    }
    if (observer) observer(it + 1, fx);

    if ((it + 1) % kCheckEvery != 0) continue;
    const Vec g = A.transpose() * (y - ax);
    Scalar worst = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar v = x(j) != Scalar(0)
                           ? std::abs(g(j) - half * (x(j) > 0 ? Scalar(1) : Scalar(-1)))
                           : std::max(Scalar(0), std::abs(g(j)) - half);
      worst = std::max(worst, v);
    }
    if (worst <= tol) {
      code.converged = true;
      ++it;
      break;
    }

    auto support = detail::support_of(x);
    if (support == last_support) {
      ++stable_checks;
    } else {
      last_support = std::move(support);
      stable_checks = 0;
      polished_this_support = false;
    }
    if (stable_checks >= 2 && !polished_this_support) {
      polished_this_support = true;
      Vec polished;
      if (detail::polish_on_support(A, y, x, last_support, lambda, tol, polished)) {
        const Scalar fp = l1_objective(A, y, polished, lambda);
        if (fp <= fx) {
          x = std::move(polished);
          fx = fp;
          if (observer) observer(it + 1, fx);
          code.converged = true;
          ++it;
          break;
        }
      }
    }
  }

  if (!code.converged && apg_budget < cfg.max_iter) {
    int steps = 0;
    code.converged = detail::feature_sign_refine(A, y, x, fx, lambda, tol, cfg.max_iter - it, steps,
                                                 it, observer);
    it += steps;
  }

  code.iterations = it;
  code.residual_norm = (y - A * x).norm();
  code.coefficients = std::move(x);
  return code;
}

/// Result of exhaustive sparse least squares.
template <typename Scalar>
struct BasicL0Solution {
  std::vector<Eigen::Index> support;  // ascending column indices
  DynamicVector<Scalar> coefficients;  // full length, zero off the support
  Scalar residual_norm = 0;
};

using L0Solution = BasicL0Solution<double>;

inline double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Exhaustive search over all supports with at most K columns for the least
/// squares fit of y. Supports whose residuals agree within a relative 1e-10
/// are ties; ties go to the smaller support, then the lexicographically
/// smallest one.
template <typename DerivedA, typename DerivedY>
BasicL0Solution<typename DerivedA::Scalar> solve_l0_exact(const Eigen::MatrixBase<DerivedA>& A,
                                                         const Eigen::MatrixBase<DerivedY>& y,
                                                         Eigen::Index K,
                                                         double max_supports = 1e6) {
  using Scalar = typename DerivedA::Scalar;
  using Vec = DynamicVector<Scalar>;
  const Eigen::Index m = A.cols();
  require(A.rows() > 0 && m > 0, ErrorCode::kInvalidArgument, "solve_l0_exact: empty dictionary");
  require(y.size() == A.rows(), ErrorCode::kDimensionMismatch,
          "solve_l0_exact: query dimension does not match dictionary rows");
  require(detail::all_finite(A) && detail::all_finite(y), ErrorCode::kNonFinite,
          "solve_l0_exact: non-finite input");
  require(K >= 1 && K <= m, ErrorCode::kInvalidArgument, "solve_l0_exact: K outside [1, M]");
  require(binomial(m, K) <= max_supports, ErrorCode::kEnumerationLimit,
          "solve_l0_exact: C(" + std::to_string(m) + ", " + std::to_string(K) +
              ") supports exceed the enumeration limit");

  const Scalar tie = Scalar(1e-10) * std::max(Scalar(1), y.norm());
  BasicL0Solution<Scalar> best;
  best.coefficients = Vec::Zero(m);
  best.residual_norm = y.norm();

  std::vector<Eigen::Index> idx;
  DynamicMatrix<Scalar> sub;
  for (Eigen::Index k = 1; k <= K; ++k) {
    idx.resize(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    sub.resize(A.rows(), k);
    while (true) {
      for (Eigen::Index i = 0; i < k; ++i) sub.col(i) = A.col(idx[static_cast<std::size_t>(i)]);
      Eigen::CompleteOrthogonalDecomposition<DynamicMatrix<Scalar>> cod(sub);
      const Vec coef = cod.solve(y);
      const Scalar res = (y - sub * coef).norm();
      if (res < best.residual_norm - tie) {
        best.residual_norm = res;
        best.support = idx;
        best.coefficients.setZero();
        for (Eigen::Index i = 0; i < k; ++i) best.coefficients(idx[static_cast<std::size_t>(i)]) = coef(i);
      }
      // Next combination in lexicographic order.
      Eigen::Index pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (Eigen::Index i = pos + 1; i < k; ++i) {
        idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
      }
    }
  }
  return best;
}

}  // namespace sparsever

#endif  // SPARSEVER_SOLVER_HPP_
