#include "pamlab/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pamlab/errors.hpp"
#include "pamlab/fft.hpp"
#include "pamlab/rng.hpp"

namespace pamlab {

namespace {

constexpr std::size_t kDenseLimit = 2048;

Eigen::MatrixXd dense_operator(const Field& V, double kappa) {
  const Grid& g = V.grid();
  const std::size_t N = g.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  std::vector<double> e(N, 0.0), col(N);
  for (std::size_t j = 0; j < N; ++j) {
    e[j] = 1.0;
    apply_laplacian(g, e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < N; ++i) A(i, j) = kappa * col[i];
    A(j, j) += V[j];
  }
  return A;
}

SpectralDecomposition from_vectors(const Field& V, double kappa, const Eigen::VectorXd& vals,
                                   const Eigen::MatrixXd& vecs) {
  // vals/vecs in decreasing order, Euclidean-normalised columns
  SpectralDecomposition dec;
  dec.kappa = kappa;
  const double scale = 1.0 / std::sqrt(V.grid().cell_volume());
  for (Eigen::Index c = 0; c < vals.size(); ++c) {
    dec.eigenvalues.push_back(vals[c]);
    Field e(V.grid());
    double total = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      e[i] = vecs(i, c) * scale;
      total += e[i];
    }
    if (total < 0.0) e *= -1.0;
    dec.eigenfunctions.push_back(std::move(e));
  }
  return dec;
}

SpectralDecomposition dense_eigens(const Field& V, double kappa, int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_operator(V, kappa));
  if (es.info() != Eigen::Success) throw EigensolveFailure("dense symmetric eigensolver failed");
  const Eigen::Index N = es.eigenvalues().size();
  Eigen::VectorXd vals(k);
  Eigen::MatrixXd vecs(N, k);
  for (int c = 0; c < k; ++c) {
    vals[c] = es.eigenvalues()[N - 1 - c];
    vecs.col(c) = es.eigenvectors().col(N - 1 - c);
  }
  return from_vectors(V, kappa, vals, vecs);
}

// Thick-restart Lanczos with full reorthogonalisation for the top k pairs.
SpectralDecomposition lanczos_eigens(const Field& V, double kappa, int k) {
  const Grid& g = V.grid();
  const Eigen::Index N = static_cast<Eigen::Index>(g.size());
  const int m = static_cast<int>(std::min<Eigen::Index>(N, std::max(2 * k + 20, k + 60)));
  const int keep = std::min(m - 1, k + std::max(10, k / 2));
  std::vector<double> x(N), y(N);
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    for (Eigen::Index i = 0; i < N; ++i) x[i] = in[i];
    apply_laplacian(g, x, y);
    for (Eigen::Index i = 0; i < N; ++i) out[i] = kappa * y[i] + V[i] * in[i];
  };

  Eigen::MatrixXd Q(N, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, m + 1);
  CounterRng rng(0x5eed, 0);
  Eigen::VectorXd v(N);
  for (Eigen::Index i = 0; i < N; ++i) v[i] = 1.0 + 0.01 * rng.normal();
  Q.col(0) = v.normalized();
  int start = 0;
  Eigen::VectorXd w(N);
  const int max_restarts = 500;
  for (int restart = 0; restart < max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = start; j < m; ++j) {
      apply(Q.col(j), w);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd h = Q.leftCols(j + 1).transpose() * w;
        w -= Q.leftCols(j + 1) * h;
        if (pass == 0)
          for (int i = 0; i <= j; ++i) {
            if (i >= start || i == j) {
              T(i, j) = h[i];
              T(j, i) = h[i];
            }
          }
      }
      beta = w.norm();
      if (beta < 1e-300) {
        // invariant subspace; continue with a fresh orthogonal direction
        for (Eigen::Index i = 0; i < N; ++i) w[i] = rng.normal();
        for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
        Q.col(j + 1) = w.normalized();
        beta = 0.0;
      } else {
        Q.col(j + 1) = w / beta;
      }
      if (j + 1 < m) {
        T(j + 1, j) = beta;
        T(j, j + 1) = beta;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
    if (es.info() != Eigen::Success) throw EigensolveFailure("projected eigenproblem failed");
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& S = es.eigenvectors();
    bool done = true;
    for (int c = 0; c < k; ++c) {
      const int col = m - 1 - c;
      const double resid = std::abs(beta * S(m - 1, col));
      if (resid > 1e-10 * std::max(1.0, std::abs(theta[col]))) done = false;
    }
    if (done) {
      Eigen::VectorXd vals(k);
      Eigen::MatrixXd vecs(N, k);
      for (int c = 0; c < k; ++c) {
        vals[c] = theta[m - 1 - c];
        vecs.col(c) = (Q.leftCols(m) * S.col(m - 1 - c)).normalized();
      }
      return from_vectors(V, kappa, vals, vecs);
    }
    // thick restart on the top `keep` Ritz vectors
    Eigen::MatrixXd Y = Q.leftCols(m) * S.rightCols(keep);
    Eigen::VectorXd b = beta * S.row(m - 1).tail(keep).transpose();
    const Eigen::VectorXd next = Q.col(m);
    T.setZero();
    for (int i = 0; i < keep; ++i) {
      Q.col(i) = Y.col(i);
      T(i, i) = theta[m - keep + i];
      T(i, keep) = b[i];
      T(keep, i) = b[i];
    }
    Q.col(keep) = next;
    start = keep;
  }
  throw EigensolveFailure("lanczos did not converge");
}

} // namespace

SpectralDecomposition dirichlet_eigens(const Field& V, double kappa, int k) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const std::size_t N = V.size();
  if (k < 1 || static_cast<std::size_t>(k) > N) throw InvalidArgument("need 1 <= k <= n^d");
  if (N <= kDenseLimit || static_cast<std::size_t>(k) * 4 > N) return dense_eigens(V, kappa, k);
  return lanczos_eigens(V, kappa, k);
}

SpectralSolution spectral_solution(const SpectralDecomposition& dec, double t) {
  if (t < 0.0) throw InvalidArgument("t must be >= 0");
  if (dec.eigenfunctions.empty()) throw InvalidArgument("empty decomposition");
  const Grid& g = dec.eigenfunctions.front().grid();
  Field one(g, 1.0);
  Field u(g);
  Field remainder = one;
  for (std::size_t c = 0; c < dec.eigenfunctions.size(); ++c) {
    const Field& e = dec.eigenfunctions[c];
    const double coef = e.dot(one);
    const double growth = std::exp(t * dec.eigenvalues[c]);
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += growth * coef * e[i];
      remainder[i] -= coef * e[i];
    }
  }
  SpectralSolution out;
  out.truncation_bound = std::exp(t * dec.eigenvalues.back()) * remainder.l2_norm();
  if (dec.eigenfunctions.size() < g.size() && out.truncation_bound > 0.01 * u.l2_norm())
    throw TruncationDominates("truncation bound " + std::to_string(out.truncation_bound) + " vs solution norm " +
                              std::to_string(u.l2_norm()));
  out.u = std::move(u);
  return out;
}

std::pair<double, double> eigen_rescaling_check(const Field& xi_eps, const RescaledNoiseParams& params, double R,
                                                double kappa, int points) {
  if (!(R > 0.0)) throw InvalidArgument("R must be positive");
  const Grid& src = xi_eps.grid();
  const int m = points > 0 ? points : src.n;
  const double pt = params.p * params.t;
  const Grid big(src.dim, R * params.alpha, m);
  if (big.radius > src.radius * (1.0 + 1e-12)) throw DomainTooSmall("Q_{R alpha} exceeds the sampled box");
  const Field V = resample(xi_eps, big);
  const Field Xi = rescale_noise(xi_eps, params, Grid(src.dim, R, m));
  const double lam_big = dirichlet_eigens(V, kappa, 1).eigenvalues[0];
  const double lam_small = dirichlet_eigens(Xi, kappa, 1).eigenvalues[0];
  const double beta = pt / (params.alpha * params.alpha);
  return {pt * lam_big, params.H + beta * lam_small};
}

void write_eigenvalues_csv(std::ostream& os, const SpectralDecomposition& dec) {
  os << "index,eigenvalue\n";
  os.precision(17);
  for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) os << i + 1 << ',' << dec.eigenvalues[i] << '\n';
}

} // namespace pamlab
