#include "agsp/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "agsp/errors.hpp"

namespace agsp {

Tensor::Tensor(std::vector<long> dims) : dims_(std::move(dims)) {
  long total = 1;
  for (long d : dims_) {
    if (d < 0) throw ShapeMismatch("Tensor: negative dimension");
    total *= d;
  }
  data_.assign(static_cast<size_t>(total), Complex(0, 0));
}

long Tensor::row_extent(int split) const {
  long rows = 1;
  for (int k = 0; k < split; ++k) rows *= dims_[static_cast<size_t>(k)];
  return rows;
}

Eigen::Map<Matrix> Tensor::mat(int split) {
  long rows = row_extent(split);
  long cols = rows ? size() / rows : 0;
  return Eigen::Map<Matrix>(data_.data(), rows, cols);
}

Eigen::Map<const Matrix> Tensor::mat(int split) const {
  long rows = row_extent(split);
  long cols = rows ? size() / rows : 0;
  return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

Tensor Tensor::from_matrix(const Matrix& m, std::vector<long> dims,
                           int split) {
  Tensor t(std::move(dims));
  if (t.row_extent(split) != m.rows() || t.size() != m.size())
    throw ShapeMismatch("Tensor::from_matrix: shape mismatch");
  t.mat(split) = m;
  return t;
}

Tensor Tensor::reshaped(std::vector<long> new_dims) const {
  Tensor t(std::move(new_dims));
  if (t.size() != size())
    throw ShapeMismatch("Tensor::reshaped: element count changed");
  std::copy(data(), data() + size(), t.data());
  return t;
}

Tensor Tensor::permuted(const std::vector<int>& perm) const {
  const int r = rank();
  if (static_cast<int>(perm.size()) != r)
    throw ShapeMismatch("Tensor::permuted: wrong permutation length");
  std::vector<long> out_dims(perm.size());
  for (int k = 0; k < r; ++k)
    out_dims[static_cast<size_t>(k)] = dims_[static_cast<size_t>(perm[k])];
  Tensor out(out_dims);

  // Stride of source index j in the source layout, then the stride that the
  // same source index has in the destination layout.
  std::vector<long> src_stride(static_cast<size_t>(r), 1);
  for (int j = 1; j < r; ++j)
    src_stride[static_cast<size_t>(j)] =
        src_stride[static_cast<size_t>(j - 1)] * dims_[static_cast<size_t>(j - 1)];
  std::vector<long> dst_stride_of_src(static_cast<size_t>(r), 0);
  long s = 1;
  for (int k = 0; k < r; ++k) {
    dst_stride_of_src[static_cast<size_t>(perm[k])] = s;
    s *= out_dims[static_cast<size_t>(k)];
  }

  std::vector<long> idx(static_cast<size_t>(r), 0);
  const Complex* src = data();
  Complex* dst = out.data();
  long dst_lin = 0;
  for (long lin = 0; lin < size(); ++lin) {
    dst[dst_lin] = src[lin];
    for (int j = 0; j < r; ++j) {
      idx[static_cast<size_t>(j)]++;
      dst_lin += dst_stride_of_src[static_cast<size_t>(j)];
      if (idx[static_cast<size_t>(j)] < dims_[static_cast<size_t>(j)]) break;
      dst_lin -= dst_stride_of_src[static_cast<size_t>(j)] *
                 dims_[static_cast<size_t>(j)];
      idx[static_cast<size_t>(j)] = 0;
    }
  }
  return out;
}

}  // namespace agsp
