#ifndef FLK_SPLINE_HPP
#define FLK_SPLINE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

// Natural cubic spline on a strictly increasing abscissa grid.

namespace flk {

class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    size_t n = x_.size();
    if (n < 3 || y_.size() != n)
      throw std::invalid_argument("CubicSpline: need >= 3 matched points");
    // solve the tridiagonal system for second derivatives (natural BCs)
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    m_.assign(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (size_t i = 1; i < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
  }

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  double operator()(double xv) const {
    size_t i = segment(xv);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - xv) / h, B = (xv - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

  double deriv(double xv) const {
    size_t i = segment(xv);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - xv) / h, B = (xv - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h -
           (3.0 * A * A - 1.0) / 6.0 * h * m_[i] +
           (3.0 * B * B - 1.0) / 6.0 * h * m_[i + 1];
  }

  double deriv2(double xv) const {
    size_t i = segment(xv);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - xv) / h, B = (xv - x_[i]) / h;
    return A * m_[i] + B * m_[i + 1];
  }

 private:
  size_t segment(double xv) const {
    if (xv < x_.front() || xv > x_.back())
      throw std::out_of_range("CubicSpline: query outside table");
    size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (x_[mid] <= xv ? lo : hi) = mid;
    }
    return lo;
  }
  std::vector<double> x_, y_, m_;
};

}  // namespace flk

#endif  // FLK_SPLINE_HPP
