#include "lrshrink/kernels.hpp"

#include <cmath>
#include <vector>

#include "lrshrink/error.hpp"

namespace lrshrink::kernels {
namespace {

void require_samples(const Matrix& x, Index min_rows) {
  if (x.rows() < min_rows) {
    throw Error(ErrorCode::TooFewSamples,
                "need at least " + std::to_string(min_rows) + " samples, got " + std::to_string(x.rows()));
  }
}

double sum_in_order(const std::vector<double>& parts) {
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

}  // namespace

Matrix center_columns(const Matrix& x) {
  Matrix xc = x;
  if (x.rows() == 0) return xc;
  const Eigen::RowVectorXd means = x.colwise().mean();
  xc.rowwise() -= means;
  return xc;
}

namespace parallel {

Matrix covariance(const Matrix& x) {
  require_samples(x, 2);
  const Matrix xc = center_columns(x);
  const Index k = x.cols();
  const double denom = static_cast<double>(x.rows() - 1);
  Matrix s(k, k);
#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double v = xc.col(i).dot(xc.col(j)) / denom;
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

DiagonalMoments diagonal_moments(const Matrix& x) {
  require_samples(x, 2);
  const Matrix xc = center_columns(x);
  const Index n = x.rows();
  const Index k = x.cols();
  const double nd = static_cast<double>(n);
  const double scale = nd / ((nd - 1.0) * (nd - 1.0) * (nd - 1.0));
  const double unbias = nd / (nd - 1.0);

  std::vector<double> var_parts(static_cast<std::size_t>(k), 0.0);
  std::vector<double> sq_parts(static_cast<std::size_t>(k), 0.0);
  DiagonalMoments out;
  out.var_diag.resize(k);

#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < k; ++j) {
    const double* cj = xc.col(j).data();
    double var_acc = 0.0;
    double sq_acc = 0.0;
    for (Index i = 0; i <= j; ++i) {
      const double* ci = xc.col(i).data();
      double wsum = 0.0;
      for (Index m = 0; m < n; ++m) wsum += ci[m] * cj[m];
      const double wbar = wsum / nd;
      double dev = 0.0;
      for (Index m = 0; m < n; ++m) {
        const double d = ci[m] * cj[m] - wbar;
        dev += d * d;
      }
      const double var = scale * dev;
      if (i == j) {
        out.var_diag(j) = var;
      } else {
        const double s = unbias * wbar;
        var_acc += 2.0 * var;
        sq_acc += 2.0 * s * s;
      }
    }
    var_parts[static_cast<std::size_t>(j)] = var_acc;
    sq_parts[static_cast<std::size_t>(j)] = sq_acc;
  }
  out.sum_var_offdiag = sum_in_order(var_parts);
  out.sum_sq_offdiag = sum_in_order(sq_parts);
  return out;
}

TargetMoments separable_target_moments(const Matrix& xc, const Vector& u, const Matrix& b) {
  require_samples(xc, 2);
  const Index n = xc.rows();
  const Index k = xc.cols();
  const bool has_b = b.size() > 0;
  if (u.size() != n || (has_b && (b.rows() != n || b.cols() != k))) {
    throw Error(ErrorCode::ShapeMismatch, "target decomposition does not match the data");
  }
  const double nd = static_cast<double>(n);
  const double scale = nd / ((nd - 1.0) * (nd - 1.0) * (nd - 1.0));
  const double unbias = nd / (nd - 1.0);

  const double ubar = u.mean();
  const Vector uc = u.array() - ubar;
  Eigen::RowVectorXd bbar = Eigen::RowVectorXd::Zero(k);
  Matrix bc = Matrix::Zero(n, k);
  if (has_b) {
    bbar = b.colwise().mean();
    bc = b.rowwise() - bbar;
  }

  std::vector<double> var_parts(static_cast<std::size_t>(k), 0.0);
  std::vector<double> cov_parts(static_cast<std::size_t>(k), 0.0);
  std::vector<double> dev_parts(static_cast<std::size_t>(k), 0.0);

#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < k; ++j) {
    const double* cj = xc.col(j).data();
    const double* bj = bc.col(j).data();
    double var_acc = 0.0;
    double cov_acc = 0.0;
    double dev_acc = 0.0;
    for (Index i = 0; i < j; ++i) {
      const double* ci = xc.col(i).data();
      const double* bi = bc.col(i).data();
      double wsum = 0.0;
      for (Index m = 0; m < n; ++m) wsum += ci[m] * cj[m];
      const double wbar = wsum / nd;
      double vv = 0.0;
      double vc = 0.0;
      for (Index m = 0; m < n; ++m) {
        const double dw = ci[m] * cj[m] - wbar;
        const double dt = uc[m] + bi[m] + bj[m];
        vv += dw * dw;
        vc += dw * dt;
      }
      const double tbar = ubar + bbar(i) + bbar(j);
      const double diff = unbias * (wbar - tbar);
      var_acc += 2.0 * scale * vv;
      cov_acc += 2.0 * scale * vc;
      dev_acc += 2.0 * diff * diff;
    }
    var_parts[static_cast<std::size_t>(j)] = var_acc;
    cov_parts[static_cast<std::size_t>(j)] = cov_acc;
    dev_parts[static_cast<std::size_t>(j)] = dev_acc;
  }
  return {sum_in_order(var_parts), sum_in_order(cov_parts), sum_in_order(dev_parts)};
}

}  // namespace parallel

namespace reference {

Matrix covariance(const Matrix& x) {
  require_samples(x, 2);
  const Index n = x.rows();
  const Index k = x.cols();
  std::vector<double> mean(static_cast<std::size_t>(k), 0.0);
  for (Index j = 0; j < k; ++j) {
    for (Index m = 0; m < n; ++m) mean[static_cast<std::size_t>(j)] += x(m, j);
    mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);
  }
  Matrix s(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      double acc = 0.0;
      for (Index m = 0; m < n; ++m) {
        acc += (x(m, i) - mean[static_cast<std::size_t>(i)]) * (x(m, j) - mean[static_cast<std::size_t>(j)]);
      }
      s(i, j) = acc / static_cast<double>(n - 1);
    }
  }
  return s;
}

namespace {

// Explicit per-sample cross products, accumulated entry by entry.
struct CrossProductStats {
  Matrix xc;
  Matrix wbar;
  double n = 0.0;
};

CrossProductStats cross_product_stats(const Matrix& x) {
  CrossProductStats st;
  st.xc = center_columns(x);
  st.n = static_cast<double>(x.rows());
  const Index k = x.cols();
  st.wbar = Matrix::Zero(k, k);
  for (Index m = 0; m < x.rows(); ++m) st.wbar += st.xc.row(m).transpose() * st.xc.row(m);
  st.wbar /= st.n;
  return st;
}

}  // namespace

DiagonalMoments diagonal_moments(const Matrix& x) {
  require_samples(x, 2);
  const CrossProductStats st = cross_product_stats(x);
  const Index k = x.cols();
  const double scale = st.n / std::pow(st.n - 1.0, 3);
  Matrix dev = Matrix::Zero(k, k);
  for (Index m = 0; m < x.rows(); ++m) {
    const Matrix w = st.xc.row(m).transpose() * st.xc.row(m);
    dev += (w - st.wbar).cwiseAbs2();
  }
  const Matrix var = scale * dev;
  const Matrix s = st.n / (st.n - 1.0) * st.wbar;
  DiagonalMoments out;
  out.var_diag = var.diagonal();
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (i == j) continue;
      out.sum_var_offdiag += var(i, j);
      out.sum_sq_offdiag += s(i, j) * s(i, j);
    }
  }
  return out;
}

TargetMoments target_moments(const Matrix& x, const LinearTarget& target) {
  require_samples(x, 2);
  const CrossProductStats st = cross_product_stats(x);
  const Index k = x.cols();
  const double scale = st.n / std::pow(st.n - 1.0, 3);
  const Matrix tbar = target(st.wbar);
  Matrix var = Matrix::Zero(k, k);
  Matrix cov = Matrix::Zero(k, k);
  for (Index m = 0; m < x.rows(); ++m) {
    const Matrix w = st.xc.row(m).transpose() * st.xc.row(m);
    const Matrix dw = w - st.wbar;
    const Matrix dt = target(w) - tbar;
    var += dw.cwiseAbs2();
    cov += dw.cwiseProduct(dt);
  }
  const Matrix s = st.n / (st.n - 1.0) * st.wbar;
  const Matrix ts = target(s);
  TargetMoments out;
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (i == j) continue;
      out.sum_var_offdiag += scale * var(i, j);
      out.sum_cov_offdiag += scale * cov(i, j);
      out.sum_sq_dev_offdiag += (s(i, j) - ts(i, j)) * (s(i, j) - ts(i, j));
    }
  }
  return out;
}

}  // namespace reference

}  // namespace lrshrink::kernels
