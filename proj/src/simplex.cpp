#include "jrp/simplex.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jrp/model.hpp"

namespace jrp {

int LinearProgram::add_column(double c, double lo, double up) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(up);
  return n_cols() - 1;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr double kDegenerateStep = 1e-12;

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Column = std::vector<std::pair<int, double>>;

struct Eta {
  int row;
  double pivot;
  Column others;
};

// Bounded-variable revised simplex. Columns are the structurals, then one
// slack per row (a·x + s = b), then phase-one artificials.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& options)
      : lp_(lp), opt_(options), n_(lp.n_cols()), m_(lp.n_rows()) {}

  SimplexResult run() {
    setup();
    if (n_art_ > 0) {
      phase_ = 1;
      iterate();
      double infeasibility = 0.0;
      for (int j = n_ + m_; j < total(); ++j) infeasibility += x_[j];
      double scale = 1.0;
      for (const LpRow& row : lp_.rows) scale = std::max(scale, std::abs(row.rhs));
      if (infeasibility > 1e-8 * scale) throw Error(Errc::kInfeasible, "linear program has no feasible point");
      drive_out_artificials();
    }
    phase_ = 2;
    for (int j = 0; j < total(); ++j) cost_[j] = j < n_ ? lp_.cost[j] : 0.0;
    iterate();
    factor();
    recompute_basics();
    iterate();
    return result();
  }

 private:
  int total() const { return n_ + m_ + n_art_; }

  void setup() {
    cols_.assign(n_ + m_, {});
    for (int r = 0; r < m_; ++r) {
      for (auto [j, a] : lp_.rows[r].coeffs) {
        if (j < 0 || j >= n_) throw Error(Errc::kInternal, "row references unknown column");
        if (a != 0.0) cols_[j].push_back({r, a});
      }
    }
    for (int j = 0; j < n_; ++j) {
      std::sort(cols_[j].begin(), cols_[j].end());
      // Merge duplicate entries of the same row.
      Column merged;
      for (auto e : cols_[j]) {
        if (!merged.empty() && merged.back().first == e.first) {
          merged.back().second += e.second;
        } else {
          merged.push_back(e);
        }
      }
      cols_[j] = std::move(merged);
    }
    lo_.assign(n_ + m_, 0.0);
    up_.assign(n_ + m_, 0.0);
    x_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp_.lower[j];
      up_[j] = lp_.upper[j];
      if (lo_[j] > up_[j]) throw Error(Errc::kInfeasible, "column with empty bound interval");
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        x_[j] = up_[j];
      } else {
        throw Error(Errc::kInternal, "free columns are not supported");
      }
    }
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      for (auto [r, a] : cols_[j]) activity[r] += a * x_[j];
    }
    basis_.assign(m_, -1);
    for (int r = 0; r < m_; ++r) {
      int s = n_ + r;
      cols_[s] = {{r, 1.0}};
      switch (lp_.rows[r].sense) {
        case Sense::kLe: lo_[s] = 0.0; up_[s] = kInf; break;
        case Sense::kGe: lo_[s] = -kInf; up_[s] = 0.0; break;
        case Sense::kEq: lo_[s] = 0.0; up_[s] = 0.0; break;
      }
      double res = lp_.rows[r].rhs - activity[r];
      if (res >= lo_[s] - opt_.feasibility_tol && res <= up_[s] + opt_.feasibility_tol) {
        x_[s] = res;
        basis_[r] = s;
        continue;
      }
      double bound = res < lo_[s] ? lo_[s] : up_[s];
      x_[s] = bound;
      double gap = res - bound;
      cols_.push_back({{r, gap > 0 ? 1.0 : -1.0}});
      lo_.push_back(0.0);
      up_.push_back(kInf);
      x_.push_back(std::abs(gap));
      basis_[r] = static_cast<int>(cols_.size()) - 1;
      ++n_art_;
    }
    pos_.assign(total(), -1);
    for (int r = 0; r < m_; ++r) pos_[basis_[r]] = r;
    cost_.assign(total(), 0.0);
    for (int j = n_ + m_; j < total(); ++j) cost_[j] = 1.0;
    factor();
  }

  void factor() {
    etas_.clear();
    since_factor_ = 0;
    if (m_ == 0) return;
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < m_; ++r) {
      for (auto [i, a] : cols_[basis_[r]]) trips.emplace_back(i, r, a);
    }
    SpMat b(m_, m_);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() != Eigen::Success) throw Error(Errc::kInternal, "singular simplex basis");
  }

  void recompute_basics() {
    if (m_ == 0) return;
    Vec rhs(m_);
    for (int r = 0; r < m_; ++r) rhs[r] = lp_.rows[r].rhs;
    for (int j = 0; j < total(); ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      for (auto [r, a] : cols_[j]) rhs[r] -= a * x_[j];
    }
    Vec xb = ftran_dense(rhs);
    for (int r = 0; r < m_; ++r) x_[basis_[r]] = xb[r];
  }

  Vec ftran_dense(Vec v) const {
    v = lu_.solve(v);
    for (const Eta& e : etas_) {
      double vp = v[e.row] / e.pivot;
      if (vp != 0.0) {
        for (auto [i, a] : e.others) v[i] -= a * vp;
      }
      v[e.row] = vp;
    }
    return v;
  }

  Vec ftran(const Column& col) const {
    Vec v = Vec::Zero(m_);
    for (auto [r, a] : col) v[r] = a;
    return ftran_dense(std::move(v));
  }

  Vec btran(Vec w) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = w[it->row];
      for (auto [i, a] : it->others) s -= w[i] * a;
      w[it->row] = s / it->pivot;
    }
    return lu_.transpose().solve(w);
  }

  Vec duals() const {
    if (m_ == 0) return Vec();
    Vec cb(m_);
    for (int r = 0; r < m_; ++r) cb[r] = cost_[basis_[r]];
    return btran(std::move(cb));
  }

  double reduced_cost(int j, const Vec& pi) const {
    double d = cost_[j];
    for (auto [r, a] : cols_[j]) d -= pi[r] * a;
    return d;
  }

  bool at_upper(int j) const { return std::isfinite(up_[j]) && x_[j] == up_[j] && x_[j] != lo_[j]; }

  void iterate() {
    while (true) {
      if (++iterations_ > opt_.max_iterations) throw Error(Errc::kInternal, "simplex iteration limit");
      if (since_factor_ >= opt_.refactor_interval) {
        factor();
        recompute_basics();
      }
      Vec pi = duals();
      int q = -1;
      double best = 0.0;
      double dq = 0.0;
      for (int j = 0; j < total(); ++j) {
        if (pos_[j] >= 0 || lo_[j] == up_[j]) continue;
        double d = reduced_cost(j, pi);
        double score = 0.0;
        if (at_upper(j)) {
          if (d > opt_.optimality_tol) score = d;
        } else if (d < -opt_.optimality_tol) {
          score = -d;
        }
        if (score <= 0.0) continue;
        if (bland_) {
          q = j;
          dq = d;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
          dq = d;
        }
      }
      if (q < 0) return;
      int dir = dq < 0 ? 1 : -1;
      Vec alpha = ftran(cols_[q]);
      int p = choose_leaving(alpha, dir);
      double flip = up_[q] - lo_[q];
      double theta;
      bool bound_flip;
      if (p < 0) {
        if (!std::isfinite(flip)) throw Error(Errc::kUnbounded, "linear program is unbounded");
        theta = flip;
        bound_flip = true;
      } else {
        theta = std::max(0.0, ratio(p, alpha, dir));
        bound_flip = std::isfinite(flip) && flip <= theta;
        if (bound_flip) theta = flip;
      }
      for (int r = 0; r < m_; ++r) {
        if (alpha[r] != 0.0) x_[basis_[r]] -= theta * dir * alpha[r];
      }
      x_[q] += dir * theta;
      if (theta <= kDegenerateStep) {
        ++degenerate_;
        if (degenerate_ >= opt_.bland_after_degenerate) bland_ = true;
      }
      if (bound_flip) {
        x_[q] = dir > 0 ? up_[q] : lo_[q];
        continue;
      }
      int leaving = basis_[p];
      x_[leaving] = dir * alpha[p] > 0 ? lo_[leaving] : up_[leaving];
      pos_[leaving] = -1;
      basis_[p] = q;
      pos_[q] = p;
      Eta eta{p, alpha[p], {}};
      for (int r = 0; r < m_; ++r) {
        if (r != p && std::abs(alpha[r]) > kDropTol) eta.others.push_back({r, alpha[r]});
      }
      etas_.push_back(std::move(eta));
      ++since_factor_;
    }
  }

  // Step length at which basic row r reaches a bound, or +inf.
  double ratio(int r, const Vec& alpha, int dir) const {
    int j = basis_[r];
    double a = dir * alpha[r];
    if (a > 0) return std::isfinite(lo_[j]) ? (x_[j] - lo_[j]) / a : kInf;
    return std::isfinite(up_[j]) ? (up_[j] - x_[j]) / (-a) : kInf;
  }

  int choose_leaving(const Vec& alpha, int dir) const {
    if (bland_) {
      int best = -1;
      double best_ratio = kInf;
      for (int r = 0; r < m_; ++r) {
        if (std::abs(alpha[r]) <= kPivotTol) continue;
        double t = ratio(r, alpha, dir);
        if (!std::isfinite(t)) continue;
        if (best < 0 || t < best_ratio - 1e-12 ||
            (t <= best_ratio + 1e-12 && basis_[r] < basis_[best])) {
          best = r;
          best_ratio = std::min(best_ratio, t);
        }
      }
      return best;
    }
    // Harris two-pass test: relaxed bound first, then the largest pivot
    // among rows whose exact ratio fits under it.
    double tmax = kInf;
    for (int r = 0; r < m_; ++r) {
      if (std::abs(alpha[r]) <= kPivotTol) continue;
      int j = basis_[r];
      double a = dir * alpha[r];
      if (a > 0 && std::isfinite(lo_[j])) {
        tmax = std::min(tmax, (x_[j] - lo_[j] + opt_.feasibility_tol) / a);
      } else if (a < 0 && std::isfinite(up_[j])) {
        tmax = std::min(tmax, (up_[j] - x_[j] + opt_.feasibility_tol) / (-a));
      }
    }
    if (!std::isfinite(tmax)) return -1;
    int best = -1;
    double best_abs = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (std::abs(alpha[r]) <= kPivotTol) continue;
      double t = ratio(r, alpha, dir);
      if (t <= tmax && std::abs(alpha[r]) > best_abs) {
        best_abs = std::abs(alpha[r]);
        best = r;
      }
    }
    return best;
  }

  // Pivots zero-valued basic artificials out where possible, then pins all
  // artificials at zero.
  void drive_out_artificials() {
    factor();
    recompute_basics();
    for (int r = 0; r < m_; ++r) {
      int j = basis_[r];
      if (j < n_ + m_) continue;
      Vec e = Vec::Zero(m_);
      e[r] = 1.0;
      Vec rho = btran(std::move(e));
      int q = -1;
      double best = 1e-7;
      for (int k = 0; k < n_ + m_; ++k) {
        if (pos_[k] >= 0) continue;
        double a = 0.0;
        for (auto [i, v] : cols_[k]) a += rho[i] * v;
        if (std::abs(a) > best) {
          best = std::abs(a);
          q = k;
        }
      }
      if (q < 0) continue;
      Vec alpha = ftran(cols_[q]);
      pos_[j] = -1;
      x_[j] = 0.0;
      basis_[r] = q;
      pos_[q] = r;
      Eta eta{r, alpha[r], {}};
      for (int i = 0; i < m_; ++i) {
        if (i != r && std::abs(alpha[i]) > kDropTol) eta.others.push_back({i, alpha[i]});
      }
      etas_.push_back(std::move(eta));
      if (++since_factor_ >= opt_.refactor_interval) factor();
    }
    for (int j = n_ + m_; j < total(); ++j) {
      up_[j] = 0.0;
      if (pos_[j] < 0) x_[j] = 0.0;
    }
    factor();
    recompute_basics();
  }

  SimplexResult result() const {
    SimplexResult res;
    res.iterations = iterations_;
    res.degenerate_pivots = degenerate_;
    res.used_bland = bland_;
    res.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      // Nonbasic values sit exactly on a bound; basic values are clamped
      // against round-off only.
      if (pos_[j] < 0) continue;
      if (std::isfinite(lo_[j]) && res.x[j] < lo_[j]) res.x[j] = lo_[j];
      if (std::isfinite(up_[j]) && res.x[j] > up_[j]) res.x[j] = up_[j];
    }
    res.state.resize(n_);
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] >= 0) {
        res.state[j] = VarState::kBasic;
      } else {
        res.state[j] = at_upper(j) ? VarState::kAtUpper : VarState::kAtLower;
      }
    }
    res.row_activity.assign(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      for (auto [r, a] : cols_[j]) res.row_activity[r] += a * res.x[j];
    }
    res.row_slack_basic.assign(m_, false);
    for (int r = 0; r < m_; ++r) {
      int j = basis_[r];
      if (j >= n_) res.row_slack_basic[j < n_ + m_ ? j - n_ : cols_[j][0].first] = true;
    }
    Vec pi = duals();
    res.row_duals.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) res.row_duals[r] = pi[r];
    res.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) res.reduced_costs[j] = reduced_cost(j, pi);
    res.objective = 0.0;
    for (int j = 0; j < n_; ++j) res.objective += lp_.cost[j] * res.x[j];
    return res;
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  int n_;
  int m_;
  int n_art_ = 0;
  int phase_ = 1;
  std::vector<Column> cols_;
  std::vector<double> lo_, up_, x_, cost_;
  std::vector<int> basis_, pos_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int since_factor_ = 0;
  long iterations_ = 0;
  long degenerate_ = 0;
  bool bland_ = false;
};

}  // namespace

SimplexResult solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  for (const LpRow& row : lp.rows) {
    if (!std::isfinite(row.rhs)) throw Error(Errc::kInternal, "row with non-finite right-hand side");
  }
  Simplex simplex(lp, options);
  return simplex.run();
}

}  // namespace jrp
