#include "delaybt/balance.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

namespace dbt {

namespace {

std::vector<Eigen::MatrixXd> delay_matrices(const DelaySystem& sys) {
  std::vector<Eigen::MatrixXd> Ns;
  Ns.reserve(sys.delays.size());
  for (const auto& t : sys.delays) Ns.push_back(t.N);
  return Ns;
}

std::vector<Eigen::MatrixXd> delay_matrices_T(const DelaySystem& sys) {
  std::vector<Eigen::MatrixXd> Ns;
  Ns.reserve(sys.delays.size());
  for (const auto& t : sys.delays) Ns.push_back(t.N.transpose());
  return Ns;
}

}  // namespace

GramianPair compute_gramians(const DelaySystem& sys, GramianVariant variant, double tol) {
  require_valid(sys);
  const auto Ns = delay_matrices(sys);
  const Eigen::MatrixXd BBt = sys.B * sys.B.transpose();
  const Eigen::MatrixXd BinBint = sys.B_in * sys.B_in.transpose();

  GramianPair g;
  g.variant = variant;
  if (variant == GramianVariant::BilinearRule) {
    auto sol = solve_generalized(sys.A, Ns, BBt + BinBint, tol);
    g.P = std::move(sol.X);
    g.res_P = sol.rel_residual;
    g.iterations_P = sol.iterations;
  } else {
    auto sol = solve_generalized(sys.A, Ns, BBt, tol);
    g.P = sol.X + BinBint;
    g.res_P = lyapunov_residual(sys.A, Ns, BBt, g.P - BinBint);
    g.iterations_P = sol.iterations;
  }
  auto solO = solve_generalized(sys.A.transpose(), delay_matrices_T(sys),
                                sys.C.transpose() * sys.C, tol);
  g.O = std::move(solO.X);
  g.res_O = solO.rel_residual;
  g.iterations_O = solO.iterations;
  return g;
}

Factor psd_factor(const Eigen::MatrixXd& M, Factor::Kind kind, double rank_tol) {
  if (M.rows() != M.cols()) throw std::invalid_argument("psd_factor: matrix not square");
  const Eigen::Index d = M.rows();
  const double sym_err = (M - M.transpose()).norm();
  if (sym_err > 1e-10 * std::max(1.0, M.norm()))
    throw std::invalid_argument("psd_factor: matrix not symmetric");
  if (rank_tol < 0.0) rank_tol = static_cast<double>(d) * std::numeric_limits<double>::epsilon();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  if (es.info() != Eigen::Success) throw SolverBreakdownError("psd_factor: eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();  // ascending
  const double lmax = std::max(0.0, w(d - 1));
  if (w(0) < -10.0 * rank_tol * std::max(lmax, 1.0))
    throw IndefiniteMatrixError("psd_factor: matrix is indefinite (min eigenvalue " +
                                std::to_string(w(0)) + "); upstream solver likely failed");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d; ++i)
    if (w(i) > rank_tol * lmax) keep.push_back(i);
  Eigen::MatrixXd F(d, static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c)
    F.col(static_cast<Eigen::Index>(c)) =
        es.eigenvectors().col(keep[c]) * std::sqrt(w(keep[c]));
  Factor f;
  f.kind = kind;
  f.M = kind == Factor::Kind::Right ? F : Eigen::MatrixXd(F.transpose());
  return f;
}

BalancedRealization balance_transform(const DelaySystem& sys, const GramianPair& gram) {
  const Factor R = psd_factor(gram.P, Factor::Kind::Right);
  const Factor W = psd_factor(gram.O, Factor::Kind::Left);
  if (R.rank() == 0 || W.rank() == 0)
    throw RankCollapseError("balance_transform: zero Gramian");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W.M * R.M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s(0);
  const double cut = smax * static_cast<double>(sys.dim()) * std::numeric_limits<double>::epsilon();
  Eigen::Index r0 = 0;
  while (r0 < s.size() && s(r0) > cut) ++r0;
  if (r0 == 0) throw RankCollapseError("balance_transform: Hankel rank collapse");

  const Eigen::VectorXd sqrt_inv = s.head(r0).array().sqrt().inverse();
  BalancedRealization bal;
  bal.hsv = s.head(r0);
  bal.Q = sqrt_inv.asDiagonal() * svd.matrixU().leftCols(r0).transpose() * W.M;
  bal.Qinv = R.M * svd.matrixV().leftCols(r0) * sqrt_inv.asDiagonal();

  DelaySystem b;
  b.kind = sys.kind;
  b.A = bal.Q * sys.A * bal.Qinv;
  b.B = bal.Q * sys.B;
  b.B_in = bal.Q * sys.B_in;
  b.C = sys.C * bal.Qinv;
  for (const auto& t : sys.delays) b.delays.push_back({bal.Q * t.N * bal.Qinv, t.tau});
  bal.balanced = std::move(b);
  return bal;
}

ReducedModel truncate(const BalancedRealization& bal, Eigen::Index r) {
  const Eigen::Index r0 = bal.hsv.size();
  if (r < 1 || r > r0) throw std::out_of_range("truncate: r outside 1..r0");
  ReducedModel red;
  red.transform = bal.Q.topRows(r);
  red.inverse = bal.Qinv.leftCols(r);
  red.hsv_tail = bal.hsv.tail(r0 - r);
  red.gap_warning = r < r0 && (bal.hsv(r - 1) - bal.hsv(r)) < 1e-8 * bal.hsv(0);

  const DelaySystem& b = bal.balanced;
  DelaySystem s;
  s.kind = b.kind;
  s.A = b.A.topLeftCorner(r, r);
  s.B = b.B.topRows(r);
  s.B_in = b.B_in.topRows(r);
  s.C = b.C.leftCols(r);
  for (const auto& t : b.delays) s.delays.push_back({t.N.topLeftCorner(r, r), t.tau});
  red.sys = std::move(s);
  return red;
}

DelaySystem build_error_system(const DelaySystem& sys1, const DelaySystem& sys2) {
  if (sys1.n_controls() != sys2.n_controls() || sys1.n_init() != sys2.n_init() ||
      sys1.n_outputs() != sys2.n_outputs())
    throw std::invalid_argument("error system: input/output dimension mismatch");
  if (sys1.delays.size() != sys2.delays.size())
    throw std::invalid_argument("error system: delay multiset mismatch");

  // Pair delay terms by exactly equal tau.
  auto idx1 = std::vector<size_t>(sys1.delays.size());
  auto idx2 = std::vector<size_t>(sys2.delays.size());
  for (size_t i = 0; i < idx1.size(); ++i) idx1[i] = idx2[i] = i;
  auto by_tau1 = [&](size_t a, size_t b) { return sys1.delays[a].tau < sys1.delays[b].tau; };
  auto by_tau2 = [&](size_t a, size_t b) { return sys2.delays[a].tau < sys2.delays[b].tau; };
  std::sort(idx1.begin(), idx1.end(), by_tau1);
  std::sort(idx2.begin(), idx2.end(), by_tau2);
  for (size_t i = 0; i < idx1.size(); ++i)
    if (sys1.delays[idx1[i]].tau != sys2.delays[idx2[i]].tau)
      throw std::invalid_argument("error system: delay multiset mismatch");

  const Eigen::Index d1 = sys1.dim(), d2 = sys2.dim();
  DelaySystem err;
  err.kind = sys1.kind;
  err.A = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
  err.A.topLeftCorner(d1, d1) = sys1.A;
  err.A.bottomRightCorner(d2, d2) = sys2.A;
  err.B.resize(d1 + d2, sys1.n_controls());
  err.B << sys1.B, sys2.B;
  err.B_in.resize(d1 + d2, sys1.n_init());
  err.B_in << sys1.B_in, sys2.B_in;
  err.C.resize(sys1.n_outputs(), d1 + d2);
  err.C << sys1.C, -sys2.C;
  for (size_t i = 0; i < idx1.size(); ++i) {
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
    N.topLeftCorner(d1, d1) = sys1.delays[idx1[i]].N;
    N.bottomRightCorner(d2, d2) = sys2.delays[idx2[i]].N;
    err.delays.push_back({std::move(N), sys1.delays[idx1[i]].tau});
  }
  return err;
}

HankelSpectrum error_hankel(const DelaySystem& sys1, const DelaySystem& sys2,
                            GramianVariant variant, double tol) {
  const DelaySystem err = build_error_system(sys1, sys2);
  const GramianPair gram = compute_gramians(err, variant, tol);
  const Factor R = psd_factor(gram.P, Factor::Kind::Right);
  const Factor W = psd_factor(gram.O, Factor::Kind::Left);
  HankelSpectrum spec;
  if (R.rank() == 0 || W.rank() == 0) {
    spec.values.resize(0);
    spec.trace_norm = 0.0;
    return spec;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W.M * R.M);
  spec.values = svd.singularValues();
  spec.trace_norm = spec.values.sum();
  return spec;
}

}  // namespace dbt
