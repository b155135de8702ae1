#ifndef DPP_TYPES_HPP
#define DPP_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace dpp {

using Matrix = Eigen::MatrixXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace dpp

#endif  // DPP_TYPES_HPP
