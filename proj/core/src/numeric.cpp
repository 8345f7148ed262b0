#include "framemul/numeric.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

namespace framemul {

namespace {

i64 fdiv(i64 a, i64 b) {
  i64 q = a / b, r = a % b;
  return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

// number of emitted entries sum_{u=1..U} max(count(u), 0)
i64 reps_total(const Affine& cnt, i64 U) {
  if (U < 1) return 0;
  if (cnt.a == 0) return std::max<i64>(0, cnt.b) * U;
  i64 u0 = std::max<i64>(1, -fdiv(cnt.b - 1, cnt.a));
  if (u0 > U) return 0;
  i64 n = U - u0 + 1;
  return cnt.a * ((u0 + U) * n / 2) + cnt.b * n;
}

// Signed cell accumulator: one rational sum per radical monomial, plus a
// certified interval for contributions without a closed exact form.
struct CellAcc {
  std::map<std::map<i64, Rat>, Rat> buckets;
  bool has_iv = false;
  Rat iv_lo{0}, iv_hi{0};

  void add_exact(const ExactScalar& v) {
    if (v.is_zero()) return;
    Rat& q = buckets[v.radical];
    q = Rat(q + Rat(Rat(v.sign) * v.coeff));
  }
  void add_interval(const Rat& lo, const Rat& hi) {
    has_iv = true;
    iv_lo = Rat(iv_lo + lo);
    iv_hi = Rat(iv_hi + hi);
  }

  double to_double() const {
    double d = 0.0;
    for (const auto& [mono, q] : buckets) {
      int s = sgn_rat(q);
      if (s == 0) continue;
      d += make_canonical(s, Rat(abs(q)), mono).to_double();
    }
    if (has_iv) d += (iv_lo.get_d() + iv_hi.get_d()) / 2;
    return d;
  }

  std::pair<Rat, Rat> enclosure(int bits) const {
    Rat lo(0), hi(0);
    for (const auto& [mono, q] : buckets) {
      int s = sgn_rat(q);
      if (s == 0) continue;
      if (mono.empty()) {
        lo = Rat(lo + q);
        hi = Rat(hi + q);
      } else {
        ScalarInterval si = eval_interval(make_canonical(s, Rat(abs(q)), mono), bits);
        lo = Rat(lo + si.lo);
        hi = Rat(hi + si.hi);
      }
    }
    if (has_iv) {
      lo = Rat(lo + iv_lo);
      hi = Rat(hi + iv_hi);
    }
    return {lo, hi};
  }
};

struct ExactWindow {
  i64 N = 0;
  i64 used = 0;
  std::map<std::pair<i64, i64>, CellAcc> cells;
  std::optional<Rat> tail = Rat(0);
};

ExactWindow build_window(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                         const BlockSequenceSpec& psi, i64 N, i64 budget) {
  if (N < 1) throw Error(Error::ShapeMismatch, "truncate: window must be positive");
  if (budget < 1) throw Error(Error::BudgetTooSmall, "truncate: empty block budget");
  AggregateOperator op = build_aggregates(m, phi, psi);
  ExactWindow w;
  w.N = N;

  for (const auto& fc : op.fixed) {
    if (fc.row < 1 || fc.row > N || fc.col < 1 || fc.col > N) continue;
    w.cells[{fc.row, fc.col}].add_exact(fc.value);
    ++w.used;
  }

  // families cancelling in exact +/- pairs contribute zero at every u
  std::vector<bool> skip(op.families.size(), false);
  for (size_t i = 0; i < op.families.size(); ++i) {
    if (skip[i]) continue;
    for (size_t j = i + 1; j < op.families.size(); ++j) {
      if (skip[j]) continue;
      const CellFamily &a = op.families[i], &b = op.families[j];
      if (a.row == b.row && a.col == b.col && a.block == b.block && a.term == tneg(b.term)) {
        skip[i] = skip[j] = true;
        break;
      }
    }
  }

  for (size_t i = 0; i < op.families.size(); ++i) {
    if (skip[i]) continue;
    const CellFamily& f = op.families[i];
    i64 u_budget = fdiv(budget - f.block.b, f.block.a);
    bool rmov = f.row.a != 0, cmov = f.col.a != 0;
    if (!rmov && (f.row.b < 1 || f.row.b > N)) continue;
    if (!cmov && (f.col.b < 1 || f.col.b > N)) continue;

    if (rmov || cmov) {
      i64 u_hi = std::numeric_limits<i64>::max();
      if (rmov) u_hi = std::min(u_hi, fdiv(N - f.row.b, f.row.a));
      if (cmov) u_hi = std::min(u_hi, fdiv(N - f.col.b, f.col.a));
      if (u_hi < 1) continue;
      if (u_hi > u_budget)
        throw Error(Error::BudgetTooSmall, "window entries extend to block " +
                                               std::to_string(f.block.at(u_hi)) +
                                               ", beyond the budget");
      for (i64 u = 1; u <= u_hi; ++u) {
        ExactScalar v = eval_at(f.term, u);
        if (!v.is_zero()) w.cells[{f.row.at(u), f.col.at(u)}].add_exact(v);
      }
      w.used += reps_total(f.term.count, u_hi);
      continue;
    }

    // fixed-cell series: consume the whole budget, certify the remainder
    if (u_budget < 1)
      throw Error(Error::BudgetTooSmall, "no admissible block for cell " +
                                             std::to_string(f.row.b) + "," +
                                             std::to_string(f.col.b));
    CellAcc& cell = w.cells[{f.row.b, f.col.b}];
    if (f.term.powers.empty()) {
      ExactScalar g = ExactScalar::one();
      bool geo1 = f.term.geo.is_one();
      for (i64 u = 1; u <= u_budget; ++u) {
        if (!geo1) g = mul(g, f.term.geo);
        i64 reps = f.term.count.trivial() ? 1 : f.term.count.at(u);
        if (reps == 0) continue;
        ExactScalar v = geo1 ? f.term.constant : mul(f.term.constant, g);
        if (reps != 1) v = mul(v, ExactScalar::from_int(reps));
        cell.add_exact(v);
      }
    } else {
      ScalarInterval si = partial_sum_interval(f.term, u_budget, 320);
      cell.add_interval(si.lo, si.hi);
    }
    w.used += reps_total(f.term.count, u_budget);
    SeriesVerdict sv = classify_series(tabs(f.term));
    if (sv.converges()) {
      if (w.tail) w.tail = Rat(*w.tail + sv.tail(u_budget));
    } else {
      w.tail.reset();
    }
  }
  return w;
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr double kEigTol = 1e-10;
constexpr int kEigCap = 100000;

Vector start_vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = 0.5 + std::fmod(static_cast<double>(i + 1) * 0.6180339887498949, 1.0);
  return v.normalized();
}

[[noreturn]] void stall(const Matrix& A, const Vector& v, double lam) {
  double res = (A * v - lam * v).norm();
  throw Error(Error::NoConvergence,
              "eigen iteration cap reached, residual " + std::to_string(res));
}

// Rayleigh quotient with residual stopping: for symmetric A, some eigenvalue
// lies within ||Av - lv|| of l, so the result carries relative error <= kEigTol.
double rayleigh_top(const Matrix& A) {
  Vector v = start_vector(A.rows());
  double lam = 0.0;
  for (int it = 0; it < kEigCap; ++it) {
    Vector w = A * v;
    lam = v.dot(w);
    if ((w - lam * v).norm() <= kEigTol * std::max(std::abs(lam), 1e-300)) return lam;
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
  }
  stall(A, v, lam);
}

double rayleigh_bottom(const Matrix& A) {
  Eigen::PartialPivLU<Matrix> lu(A);
  Vector v = start_vector(A.rows());
  double lam = 0.0;
  for (int it = 0; it < kEigCap; ++it) {
    Vector w = A * v;
    lam = v.dot(w);
    if ((w - lam * v).norm() <= kEigTol * std::max(std::abs(lam), 1e-300)) return lam;
    Vector s = lu.solve(v);
    if (!s.allFinite()) return 0.0;  // rank-deficient window
    double ns = s.norm();
    if (ns == 0.0 || !std::isfinite(ns)) return 0.0;
    v = s / ns;
  }
  stall(A, v, lam);
}

}  // namespace

double TruncationResult::at(i64 row, i64 col) const {
  if (row < 1 || row > dimension || col < 1 || col > dimension)
    throw Error(Error::ShapeMismatch, "matrix index outside the window");
  return matrix[static_cast<size_t>(row - 1) * dimension + (col - 1)];
}

TruncationResult truncate_matrix(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                                 const BlockSequenceSpec& psi, i64 N, i64 block_budget) {
  ExactWindow w = build_window(m, phi, psi, N, block_budget);
  TruncationResult tr;
  tr.dimension = N;
  tr.entries_used = w.used;
  tr.matrix.assign(static_cast<size_t>(N) * N, 0.0);
  for (const auto& [rc, cell] : w.cells)
    tr.matrix[static_cast<size_t>(rc.first - 1) * N + (rc.second - 1)] = cell.to_double();
  tr.tail_bound = w.tail;
  return tr;
}

std::pair<double, double> frame_bounds_numeric(const BlockSequenceSpec& phi, i64 N) {
  if (N < 1) throw Error(Error::ShapeMismatch, "frame bounds: window must be positive");
  CoefficientProfile p = coefficient_profile(phi);
  Matrix A = Matrix::Zero(N, N);
  bool zero_diag = false;
  for (i64 k = 1; k <= N; ++k) {
    Extremum e = profile_value_at(p, k);
    if (e.unbounded)
      throw Error(Error::ValueUnknown,
                  "frame operator entry diverges at index " + std::to_string(k));
    if (e.exact && e.value.is_zero()) zero_diag = true;
    A(k - 1, k - 1) = e.to_double();
  }
  double top = rayleigh_top(A);
  double bottom = zero_diag ? 0.0 : rayleigh_bottom(A);
  return {bottom, top};
}

std::pair<double, double> singular_range(const TruncationResult& tr) {
  i64 n = tr.dimension;
  Matrix A(n, n);
  for (i64 r = 0; r < n; ++r)
    for (i64 c = 0; c < n; ++c) A(r, c) = tr.matrix[static_cast<size_t>(r) * n + c];
  Matrix G = A.transpose() * A;
  double top = rayleigh_top(G);
  double bottom = rayleigh_bottom(G);
  return {std::sqrt(std::max(0.0, bottom)), std::sqrt(std::max(0.0, top))};
}

DeviationReport identity_deviation(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                                   const BlockSequenceSpec& psi, i64 N, i64 block_budget) {
  ExactWindow w = build_window(m, phi, psi, N, block_budget);
  if (!w.tail)
    throw Error(Error::ValueUnknown, "series tail not certified; deviation bound unavailable");
  Rat dev(0);
  for (i64 k = 1; k <= N; ++k)
    if (!w.cells.count({k, k})) dev = std::max(dev, Rat(1));
  for (const auto& [rc, cell] : w.cells) {
    Rat delta(rc.first == rc.second ? 1 : 0);
    auto [lo, hi] = cell.enclosure(320);
    Rat a = Rat(abs(Rat(lo - delta)));
    Rat b = Rat(abs(Rat(hi - delta)));
    Rat d = a > b ? a : b;
    if (d > dev) dev = d;
  }
  DeviationReport rep;
  rep.bound = *w.tail;
  rep.deviation = dev.get_d();
  rep.pass = dev <= rep.bound;
  return rep;
}

double rearrangement_stress(const BlockSequenceSpec& m, const BlockSequenceSpec& phi,
                            const BlockSequenceSpec& psi, const TermExpr& f,
                            StressStrategy strategy, i64 blocks) {
  AggregateOperator op = build_aggregates(m, phi, psi);
  std::map<i64, double> acc;
  auto fval = [&](i64 j) { return eval_at(f, j).to_double(); };
  auto keep = [&](double s) {
    if (strategy == StressStrategy::AlternatingWorst) return std::abs(s);
    return s > 0.0 ? s : 0.0;
  };
  for (const auto& fc : op.fixed) acc[fc.row] += keep(fc.value.to_double() * fval(fc.col));
  for (const auto& fam : op.families)
    for (i64 u = 1; fam.block.at(u) <= blocks; ++u) {
      double s = eval_at(fam.term, u).to_double() * fval(fam.col.at(u));
      acc[fam.row.at(u)] += keep(s);
    }
  double ss = 0.0;
  for (const auto& [k, v] : acc) ss += v * v;
  return std::sqrt(ss);
}

void export_matrix_csv(const TruncationResult& tr, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error(Error::IoError, "cannot open " + path);
  for (i64 r = 0; r < tr.dimension; ++r) {
    for (i64 c = 0; c < tr.dimension; ++c)
      std::fprintf(fp, c ? ",%.17g" : "%.17g",
                   tr.matrix[static_cast<size_t>(r) * tr.dimension + c]);
    std::fputc('\n', fp);
  }
  bool bad = std::ferror(fp) != 0;
  std::fclose(fp);
  if (bad) throw Error(Error::IoError, "write failed: " + path);
}

}  // namespace framemul
