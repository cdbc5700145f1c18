#include "iwatsuka/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "iwatsuka/common.hpp"

namespace iwatsuka {

namespace {

constexpr double kTinyPivot = 1e-300;

struct Gershgorin {
  double lo;
  double hi;
};

Gershgorin gershgorin(std::span<const double> d, std::span<const double> e) {
  const std::size_t n = d.size();
  double lo = d[0], hi = d[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(e[i - 1]);
    if (i + 1 < n) r += std::abs(e[i]);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  return {lo, hi};
}

void check_shape(std::span<const double> d, std::span<const double> e) {
  if (d.empty()) throw std::invalid_argument("tridiagonal: empty diagonal");
  if (e.size() + 1 != d.size())
    throw std::invalid_argument("tridiagonal: offdiag must have size n-1");
}

}  // namespace

double tridiag_scale(std::span<const double> diag,
                     std::span<const double> offdiag) {
  check_shape(diag, offdiag);
  double md = 0.0, me = 0.0;
  for (double v : diag) md = std::max(md, std::abs(v));
  for (double v : offdiag) me = std::max(me, std::abs(v));
  return md + 2.0 * me;
}

int count_below(std::span<const double> diag, std::span<const double> offdiag,
                double lambda) {
  check_shape(diag, offdiag);
  int count = 0;
  double q = diag[0] - lambda;
  if (q == 0.0) q = -kTinyPivot;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    q = (diag[i] - lambda) - offdiag[i - 1] * (offdiag[i - 1] / q);
    if (q == 0.0) q = -kTinyPivot;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(std::span<const double> diag,
                                       std::span<const double> offdiag, int k,
                                       double tol) {
  check_shape(diag, offdiag);
  const int n = static_cast<int>(diag.size());
  if (k < 1) throw std::invalid_argument("lowest_eigenvalues: k must be >= 1");
  if (k > n)
    throw std::invalid_argument(
        "lowest_eigenvalues: k exceeds the matrix dimension");
  const double scale = tridiag_scale(diag, offdiag);
  const double width_tol = tol > 0.0 ? tol : 1e-10 * std::max(scale, 1.0);
  const Gershgorin g = gershgorin(diag, offdiag);

  std::vector<double> values(k);
  for (int j = 1; j <= k; ++j) {
    double lo = g.lo, hi = g.hi;
    while (hi - lo > width_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (count_below(diag, offdiag, mid) >= j)
        hi = mid;
      else
        lo = mid;
    }
    values[j - 1] = 0.5 * (lo + hi);
  }
  return values;
}

namespace {

// y = (M - lambda) x for symmetric tridiagonal M
void resid_apply(std::span<const double> d, std::span<const double> e,
                 double lambda, const std::vector<double>& x,
                 std::vector<double>& y) {
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = (d[i] - lambda) * x[i];
    if (i > 0) v += e[i - 1] * x[i - 1];
    if (i + 1 < n) v += e[i] * x[i + 1];
    y[i] = v;
  }
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Solve (M - lambda) out = rhs by LU with partial pivoting; the fill-in of
// row swaps needs one extra superdiagonal band.
void tridiag_solve_shifted(std::span<const double> d,
                           std::span<const double> e, double lambda,
                           double pivot_floor, std::vector<double>& rhs) {
  const std::size_t n = d.size();
  std::vector<double> a(n), b(n, 0.0), c(n, 0.0);  // diag, super1, super2
  std::vector<double> sub(n, 0.0);                 // subdiagonal (mutable)
  for (std::size_t i = 0; i < n; ++i) a[i] = d[i] - lambda;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b[i] = e[i];
    sub[i + 1] = e[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(sub[i + 1]) > std::abs(a[i])) {
      std::swap(a[i], sub[i + 1]);
      std::swap(b[i], a[i + 1]);
      std::swap(c[i], b[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    double piv = a[i];
    if (std::abs(piv) < pivot_floor)
      piv = piv < 0.0 ? -pivot_floor : pivot_floor;
    const double m = sub[i + 1] / piv;
    a[i + 1] -= m * b[i];
    b[i + 1] -= m * c[i];
    rhs[i + 1] -= m * rhs[i];
    a[i] = piv;
  }
  if (std::abs(a[n - 1]) < pivot_floor)
    a[n - 1] = a[n - 1] < 0.0 ? -pivot_floor : pivot_floor;
  for (std::size_t ii = n; ii-- > 0;) {
    double v = rhs[ii];
    if (ii + 1 < n) v -= b[ii] * rhs[ii + 1];
    if (ii + 2 < n) v -= c[ii] * rhs[ii + 2];
    rhs[ii] = v / a[ii];
  }
}

void fix_sign(std::vector<double>& v) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

std::vector<double> eigenvector(std::span<const double> diag,
                                std::span<const double> offdiag, double lambda,
                                double resid_tol, int max_iter) {
  check_shape(diag, offdiag);
  const std::size_t n = diag.size();
  const double scale = tridiag_scale(diag, offdiag);
  const double tol = resid_tol > 0.0 ? resid_tol : 1e-8 * std::max(scale, 1.0);
  const double pivot_floor = 1e-18 * std::max(scale, 1.0);

  // reproducible start vector; raw engine output scaled to (0,1) to stay
  // independent of distribution implementations
  std::mt19937_64 rng(0x5EED);
  std::vector<double> v(n);
  for (double& x : v)
    x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  const double nv = norm2(v);
  for (double& x : v) x /= nv;

  std::vector<double> work(n);
  double resid = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    tridiag_solve_shifted(diag, offdiag, lambda, pivot_floor, v);
    const double nw = norm2(v);
    if (!(nw > 0.0) || !std::isfinite(nw))
      throw NumericalError("inverse iteration produced a non-finite vector");
    for (double& x : v) x /= nw;
    resid_apply(diag, offdiag, lambda, v, work);
    resid = norm2(work);
    if (resid <= tol) {
      fix_sign(v);
      return v;
    }
  }
  throw NumericalError("inverse iteration did not converge: residual " +
                       format_double(resid) + " > tolerance " +
                       format_double(tol));
}

namespace {

// Characteristic polynomial p_k(lambda) of the leading k x k block, by the
// three-term recurrence with rescaling; only the sign and rough magnitude
// matter.
double charpoly(std::span<const double> d, std::span<const double> e,
                std::size_t k, double lambda) {
  double pm = 1.0;
  double p = d[0] - lambda;
  for (std::size_t i = 1; i < k; ++i) {
    double pn = (d[i] - lambda) * p - e[i - 1] * e[i - 1] * pm;
    pm = p;
    p = pn;
    const double m = std::abs(p);
    if (m > 1e120 || (m > 0.0 && m < 1e-120)) {
      p /= m;
      pm /= m;
    }
  }
  return p;
}

// Roots of p_k bracketed by the roots of p_{k-1} (strict interlacing holds
// for irreducible blocks); bisection on the sign of p_k in each bracket.
std::vector<double> block_spectrum(std::span<const double> d,
                                   std::span<const double> e) {
  const std::size_t m = d.size();
  std::vector<double> prev{d[0]};
  const Gershgorin g = gershgorin(d, e);
  const double pad = 1.0 + (g.hi - g.lo);
  for (std::size_t k = 2; k <= m; ++k) {
    std::vector<double> bounds;
    bounds.reserve(k + 1);
    bounds.push_back(g.lo - pad);
    bounds.insert(bounds.end(), prev.begin(), prev.end());
    bounds.push_back(g.hi + pad);
    std::vector<double> cur(k);
    for (std::size_t i = 0; i < k; ++i) {
      double a = bounds[i], b = bounds[i + 1];
      double fa = charpoly(d, e, k, a);
      const double fb = charpoly(d, e, k, b);
      if ((fa < 0.0) == (fb < 0.0)) {
        // clustered roots collapsed the bracket; take the nearer endpoint
        cur[i] = std::abs(fa) <= std::abs(fb) ? a : b;
        continue;
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        const double fm = charpoly(d, e, k, mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      cur[i] = 0.5 * (a + b);
    }
    prev = std::move(cur);
  }
  return prev;
}

}  // namespace

std::vector<double> dense_oracle(std::span<const double> diag,
                                 std::span<const double> offdiag) {
  check_shape(diag, offdiag);
  const std::size_t n = diag.size();
  if (n > 64)
    throw std::invalid_argument("dense_oracle: dimension capped at 64");

  std::vector<double> all;
  all.reserve(n);
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= n - 1; ++i) {
    const bool split = (i == n - 1) || (offdiag[i] == 0.0);
    if (!split) continue;
    const std::size_t len = i - begin + 1;
    const auto spec = block_spectrum(diag.subspan(begin, len),
                                     offdiag.subspan(begin, len - 1));
    all.insert(all.end(), spec.begin(), spec.end());
    begin = i + 1;
  }
  std::sort(all.begin(), all.end());
  return all;
}

EigenResult lowest_eigenpairs(std::span<const double> diag,
                              std::span<const double> offdiag, int k,
                              double tol, bool with_vectors) {
  EigenResult r;
  r.values = lowest_eigenvalues(diag, offdiag, k, tol);
  if (with_vectors) {
    r.vectors.reserve(r.values.size());
    r.residuals.reserve(r.values.size());
    std::vector<double> work(diag.size());
    for (double lambda : r.values) {
      r.vectors.push_back(eigenvector(diag, offdiag, lambda));
      resid_apply(diag, offdiag, lambda, r.vectors.back(), work);
      r.residuals.push_back(norm2(work));
    }
  }
  return r;
}

}  // namespace iwatsuka
