#pragma once

#include <Eigen/Dense>
#include <vector>
#include <cassert>

namespace plab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense order-3 tensor with value semantics. Symmetry is not enforced by the
// container; potentials produce index-symmetric tensors by construction.
class Tensor3 {
 public:
  Tensor3() : n_(0) {}
  explicit Tensor3(int n) : n_(n), a_(static_cast<size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }

  double& operator()(int i, int j, int k) {
    return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
  }
  double operator()(int i, int j, int k) const {
    return a_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

  bool all_finite() const {
    for (double v : a_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int n_;
  std::vector<double> a_;
};

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Compensated (Kahan) accumulator for long deterministic reductions.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  void merge(const KahanSum& o) {
    add(o.s_);
    add(-o.c_);
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace plab
