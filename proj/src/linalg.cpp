#include "ratesvol/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ratesvol/error.hpp"

namespace ratesvol::linalg {
namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& symmetric, double rel_tol, int max_sweeps) {
  if (symmetric.rows() != symmetric.cols())
    throw Error(ErrorCode::InvalidArgument, "jacobi_eigen needs a square matrix");
  const Eigen::Index n = symmetric.rows();
  Eigen::MatrixXd a = 0.5 * (symmetric + symmetric.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(std::abs(a.trace()), a.norm());

  SymmetricEigen out;
  for (;;) {
    if (off_diagonal_norm(a) <= rel_tol * scale) break;
    if (out.sweeps == max_sweeps)
      throw Error(ErrorCode::NoConvergence, "Jacobi iteration did not converge in " + std::to_string(max_sweeps) + " sweeps");
    ++out.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k != p && k != q) {
            const double akp = a(k, p);
            const double akq = a(k, q);
            a(k, p) = a(p, k) = c * akp - s * akq;
            a(k, q) = a(q, k) = s * akp + c * akq;
          }
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Eigen::MatrixXd hessenberg(const Eigen::MatrixXd& input) {
  Eigen::MatrixXd a = input;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    Eigen::VectorXd x = a.block(k + 1, k, n - k - 1, 1);
    const double norm = x.norm();
    if (norm == 0.0) continue;
    const double alpha = -sign_of(norm, x(0));
    Eigen::VectorXd v = x;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // a <- H a H with H = I - 2 v v^T acting on rows/cols k+1..n-1
    auto rows = a.middleRows(k + 1, n - k - 1);
    rows -= 2.0 * v * (v.transpose() * rows);
    auto cols = a.middleCols(k + 1, n - k - 1);
    cols -= 2.0 * (cols * v) * v.transpose();
    a.block(k + 2, k, n - k - 2, 1).setZero();
    a(k + 1, k) = alpha;
  }
  return a;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& input) {
  if (input.rows() != input.cols()) throw Error(ErrorCode::InvalidArgument, "eigenvalues needs a square matrix");
  if (!input.allFinite()) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
  const int n = static_cast<int>(input.rows());
  std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
  if (n == 0) return w;

  Eigen::MatrixXd a = hessenberg(input);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const long max_iterations = 100L * n * n;
  long total_iterations = 0;

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    for (;;) {
      int l = nn;
      for (; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {  // one root found
        w[static_cast<std::size_t>(nn)] = x + t;
        --nn;
        break;
      }
      double y = a(nn - 1, nn - 1);
      double ww = a(nn, nn - 1) * a(nn - 1, nn);
      if (l == nn - 1) {  // two roots found
        const double p = 0.5 * (y - x);
        const double q = p * p + ww;
        double z = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign_of(z, p);
          w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
          if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
        } else {
          w[static_cast<std::size_t>(nn)] = {x + p, -z};
          w[static_cast<std::size_t>(nn - 1)] = std::conj(w[static_cast<std::size_t>(nn)]);
        }
        nn -= 2;
        break;
      }
      if (++total_iterations > max_iterations)
        throw Error(ErrorCode::NoConvergence, "shifted QR did not converge in " + std::to_string(max_iterations) + " iterations");
      if (its > 0 && its % 10 == 0) {  // exceptional shift
        t += x;
        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
        y = x = 0.75 * s;
        ww = -0.4375 * s * s;
      }
      ++its;
      int m = nn - 2;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (; m >= l; --m) {
        z = a(m, m);
        r = x - z;
        double s = y - z;
        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
        q = a(m + 1, m + 1) - z - r - s;
        r = a(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
        if (u <= eps * v) break;
      }
      for (int i = m; i < nn - 1; ++i) {
        a(i + 2, i) = 0.0;
        if (i != m) a(i + 2, i - 1) = 0.0;
      }
      for (int k = m; k < nn; ++k) {
        if (k != m) {
          p = a(k, k - 1);
          q = a(k + 1, k - 1);
          r = 0.0;
          if (k + 1 != nn) r = a(k + 2, k - 1);
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) a(k, k - 1) = -a(k, k - 1);
        } else {
          a(k, k - 1) = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {
          p = a(k, j) + q * a(k + 1, j);
          if (k + 1 != nn) {
            p += r * a(k + 2, j);
            a(k + 2, j) -= p * z;
          }
          a(k + 1, j) -= p * y;
          a(k, j) -= p * x;
        }
        const int mmin = nn < k + 3 ? nn : k + 3;
        for (int i = l; i <= mmin; ++i) {
          p = x * a(i, k) + y * a(i, k + 1);
          if (k + 1 != nn) {
            p += z * a(i, k + 2);
            a(i, k + 2) -= p * r;
          }
          a(i, k + 1) -= p * q;
          a(i, k) -= p;
        }
      }
    }
  }
  return w;
}

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "psd_cholesky needs a square matrix");
  const Eigen::Index n = a.rows();
  const double scale = n > 0 ? a.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double tol = rel_tol * std::max(scale, std::numeric_limits<double>::min());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (d < -tol) throw Error(ErrorCode::InvalidModel, "covariance matrix is not positive semidefinite");
    if (d <= tol) continue;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return l;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const auto eig = jacobi_eigen(a.transpose() * a);
  return std::sqrt(std::max(eig.values(0), 0.0));
}

double frobenius_norm(const Eigen::MatrixXd& a) { return std::sqrt((a.transpose() * a).trace()); }

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& b, const Eigen::MatrixXd& d) {
  const Eigen::Index n = b.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n * n, n * n);
  // column-major vec: vec(B S) = (I kron B) vec(S), vec(S B^T) = (B kron I) vec(S)
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) += id(i, j) * b;
      op.block(i * n, j * n, n, n) += b(i, j) * id;
    }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(d.data(), n * n);
  const Eigen::VectorXd s = op.fullPivLu().solve(rhs);
  Eigen::MatrixXd out = Eigen::Map<const Eigen::MatrixXd>(s.data(), n, n);
  return 0.5 * (out + out.transpose());
}

}  // namespace ratesvol::linalg
