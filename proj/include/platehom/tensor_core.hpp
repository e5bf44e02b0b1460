#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace platehom {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularTensorError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input or output file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Number of independent components of a symmetric d x d tensor.
constexpr int mandel_size(int dim) { return dim * (dim + 1) / 2; }

using MandelVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using MandelMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Index pair (i, j), i <= j, stored at Mandel position k.
///
/// Ordering: diagonal entries first, then off-diagonals. For d = 2 this is
/// (11, 22, 12); for d = 3 it is (11, 22, 33, 23, 13, 12).
struct IndexPair {
  int i;
  int j;
};
IndexPair mandel_pair(int dim, int k);

/// Mandel position of the unordered pair (i, j).
int mandel_index(int dim, int i, int j);

/// Weight applied to the tensor component at Mandel position k (1 or sqrt 2).
double mandel_weight(int dim, int k);

/// Symmetric second-order tensor in Mandel (orthonormal Kelvin) form.
class SymTensor2 {
 public:
  SymTensor2() : SymTensor2(2) {}
  explicit SymTensor2(int dim);

  static SymTensor2 from_mandel(int dim, const MandelVector& components);
  /// Rejects matrices whose asymmetry exceeds 1e-12 relative.
  static SymTensor2 from_dense(const DenseMatrix& matrix);
  static SymTensor2 identity(int dim);
  /// k-th unit vector of the Mandel basis.
  static SymTensor2 basis(int dim, int k);

  int dim() const { return dim_; }
  int size() const { return mandel_size(dim_); }
  const MandelVector& mandel() const { return v_; }
  double operator[](int k) const { return v_(k); }

  /// Tensor component t_ij (not the Mandel coordinate).
  double component(int i, int j) const;
  DenseMatrix dense() const;
  double trace() const;
  /// Frobenius norm, sqrt(t : t).
  double norm() const { return v_.norm(); }

  SymTensor2& operator+=(const SymTensor2& other);
  SymTensor2& operator-=(const SymTensor2& other);
  SymTensor2& operator*=(double s);

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend bool operator==(const SymTensor2& a, const SymTensor2& b) {
    return a.dim_ == b.dim_ && a.v_ == b.v_;
  }

 private:
  int dim_;
  MandelVector v_;
};

/// Full double contraction a : b.
double inner(const SymTensor2& a, const SymTensor2& b);

/// Fourth-order tensor with major and minor symmetries, stored as its
/// symmetric Mandel matrix.
class StiffTensor4 {
 public:
  StiffTensor4() : StiffTensor4(2) {}
  explicit StiffTensor4(int dim);

  /// Accepts Mandel matrices that are symmetric to 1e-12 relative and stores
  /// the symmetric part.
  static StiffTensor4 from_mandel(const MandelMatrix& matrix);
  static StiffTensor4 identity(int dim);
  /// c times the identity on symmetric tensors.
  static StiffTensor4 scalar(int dim, double c);
  /// The trace reference xi -> lambda0 Tr(xi) I. Singular by construction.
  static StiffTensor4 trace_reference(int dim, double lambda0);

  int dim() const { return dim_; }
  int size() const { return mandel_size(dim_); }
  const MandelMatrix& mandel() const { return m_; }

  /// Tensor component C_ijkl.
  double component(int i, int j, int k, int l) const;

  /// Largest absolute eigenvalue of the Mandel matrix.
  double operator_norm() const;

  StiffTensor4& operator+=(const StiffTensor4& other);
  StiffTensor4& operator-=(const StiffTensor4& other);
  StiffTensor4& operator*=(double s);

  friend StiffTensor4 operator+(StiffTensor4 a, const StiffTensor4& b) { return a += b; }
  friend StiffTensor4 operator-(StiffTensor4 a, const StiffTensor4& b) { return a -= b; }
  friend StiffTensor4 operator*(double s, StiffTensor4 a) { return a *= s; }
  friend bool operator==(const StiffTensor4& a, const StiffTensor4& b) {
    return a.dim_ == b.dim_ && a.m_ == b.m_;
  }

 private:
  int dim_;
  MandelMatrix m_;
};

/// The map e -> C : e.
SymTensor2 double_contract(const StiffTensor4& c, const SymTensor2& e);

/// Eigenvalues of the Mandel matrix, ascending.
std::vector<double> eigenvalues(const StiffTensor4& c);

/// Throws SingularTensorError when min |mu| <= 1e-12 max |mu|.
StiffTensor4 invert(const StiffTensor4& c);

}  // namespace platehom
