#include "hpmetric/geometry_report.hpp"

#include <algorithm>
#include <numeric>

#include "hpmetric/errors.hpp"

namespace hpm {

namespace {

Vector average_ranks(const Vector& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return v(static_cast<Eigen::Index>(a)) < v(static_cast<Eigen::Index>(b));
  });
  Vector ranks(v.size());
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && v(static_cast<Eigen::Index>(idx[end])) == v(static_cast<Eigen::Index>(idx[start]))) ++end;
    const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (std::size_t t = start; t < end; ++t) ranks(static_cast<Eigen::Index>(idx[t])) = rank;
    start = end;
  }
  return ranks;
}

Vector rescale(const Vector& v) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi <= lo) return Vector::Zero(v.size());
  return (v.array() - lo) / (hi - lo);
}

}  // namespace

double spearman(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("spearman needs two vectors of equal length >= 2");
  const Vector rx = average_ranks(x);
  const Vector ry = average_ranks(y);
  const Vector cx = rx.array() - rx.mean();
  const Vector cy = ry.array() - ry.mean();
  const double denom = cx.norm() * cy.norm();
  if (denom == 0.0) return 0.0;
  return cx.dot(cy) / denom;
}

DistanceCurves distance_curves(std::size_t reference, const Matrix& d_half, const Matrix& d_one, const Matrix& ambient) {
  const auto n = static_cast<std::size_t>(d_half.rows());
  if (d_one.rows() != d_half.rows() || ambient.rows() != d_half.rows() || reference >= n || n < 3) {
    throw UsageError("distance curves need matching matrices, n >= 3 and a valid reference");
  }
  DistanceCurves out;
  out.reference = reference;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != reference) out.order.push_back(v);
  }
  const auto r = static_cast<Eigen::Index>(reference);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return d_half(r, static_cast<Eigen::Index>(a)) < d_half(r, static_cast<Eigen::Index>(b));
  });
  const auto m = static_cast<Eigen::Index>(out.order.size());
  Vector h(m), o(m), e(m);
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto v = static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(t)]);
    h(t) = d_half(r, v);
    o(t) = d_one(r, v);
    e(t) = ambient(r, v);
  }
  out.spearman_half = spearman(h, e);
  out.spearman_one = spearman(o, e);
  out.d_half = rescale(h);
  out.d_one = rescale(o);
  out.ambient = rescale(e);
  return out;
}

}  // namespace hpm
