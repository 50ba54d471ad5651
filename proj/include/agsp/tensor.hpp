#pragma once

#include <vector>

#include "agsp/linalg.hpp"

namespace agsp {

/// Dense multi-index array with the FIRST index fastest (so a split into
/// (leading indices | trailing indices) is exactly a column-major matrix
/// and can be handed to Eigen without copying).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<long> dims);  // zero-initialized

  const std::vector<long>& dims() const { return dims_; }
  long dim(int k) const { return dims_[static_cast<size_t>(k)]; }
  int rank() const { return static_cast<int>(dims_.size()); }
  long size() const { return static_cast<long>(data_.size()); }

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  /// Matrix view with rows = product of dims[0..split) and columns the rest.
  Eigen::Map<Matrix> mat(int split);
  Eigen::Map<const Matrix> mat(int split) const;

  /// Rebuild a tensor from a matrix laid out as mat(split) would be.
  static Tensor from_matrix(const Matrix& m, std::vector<long> dims,
                            int split);

  /// Tensor with indices reordered: out index k is this tensor's index
  /// perm[k]. O(size) strided copy.
  Tensor permuted(const std::vector<int>& perm) const;

  /// Same linear data under a different (size-preserving) index split.
  Tensor reshaped(std::vector<long> new_dims) const;

  long row_extent(int split) const;

 private:
  std::vector<long> dims_;
  std::vector<Complex> data_;
};

}  // namespace agsp
