#pragma once

#include <vector>

#include "mrtc/matrix.hpp"

namespace mrtc {

struct Shape3 {
  index_t i1 = 0;
  index_t i2 = 0;
  index_t i3 = 0;

  index_t size() const { return i1 * i2 * i3; }
  index_t dim(int mode) const;           // mode in {1,2,3}
  Shape3 with_dim(int mode, index_t n) const;
  bool operator==(const Shape3&) const = default;
};

// Order-3 dense tensor, row-major: entry (i,j,k) at ((i*I2)+j)*I3+k.
class DenseTensor3 {
 public:
  DenseTensor3() = default;
  explicit DenseTensor3(Shape3 shape);

  Shape3 shape() const { return shape_; }
  index_t size() const { return shape_.size(); }

  double& operator()(index_t i, index_t j, index_t k) {
    return data_[(i * shape_.i2 + j) * shape_.i3 + k];
  }
  double operator()(index_t i, index_t j, index_t k) const {
    return data_[(i * shape_.i2 + j) * shape_.i3 + k];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  Shape3 shape_;
  std::vector<double> data_;
};

// Mode-n matricization. Row index is the mode-n index; column layout keeps
// the remaining indices in mode order with the last one fastest:
//   mode 1: (i, j*I3 + k)   mode 2: (j, i*I3 + k)   mode 3: (k, i*I2 + j)
Matrix unfold(const DenseTensor3& t, int mode);

// Inverse of unfold for the given mode and target shape.
DenseTensor3 refold(const Matrix& m, int mode, Shape3 shape);

// Tensor-times-matrix along one mode: unfold, left-multiply by p, refold.
// p.cols() must equal the tensor's size along that mode.
DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& p, int mode);

// unfold(t, mode) * khatri_rao(f1, f2) without materializing either product.
// f1, f2 are the factors of the two non-target modes, in mode order.
Matrix mttkrp_dense(const DenseTensor3& t, const Matrix& f1, const Matrix& f2, int mode);

double frobenius_norm(const DenseTensor3& t);

// ||a - b||_F; requires equal shapes.
double frobenius_norm_diff(const DenseTensor3& a, const DenseTensor3& b);

}  // namespace mrtc
