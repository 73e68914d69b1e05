#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tnqst {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// PEPS describes a pure state vector, PEPO a (density) matrix.
enum class NetworkKind { Peps, Pepo };

const char* to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& name);

}  // namespace tnqst
