#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace hemofem {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat66 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Base for all errors raised by this library. Subclasses indicate which
// stage failed so the driver can report a structured diagnostic.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct MeshError : Error {
  using Error::Error;
};

// Nonlinear or linear solve failure; carries the residual history.
struct SolveError : Error {
  std::vector<double> residual_history;
  SolveError(const std::string& msg, std::vector<double> history = {})
      : Error(msg), residual_history(std::move(history)) {}
};

struct CouplingError : Error {
  using Error::Error;
};

struct OracleError : Error {
  using Error::Error;
};

}  // namespace hemofem
