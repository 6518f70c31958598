#pragma once

#include <string>

#include <Eigen/Dense>

#include "thermowave/model.hpp"

namespace thermowave {

/// Modal semi-discretization z' = A z with z = (u, v, theta), each block n long.
struct DiscreteDynamic {
    Eigen::MatrixXd matrix;
    SystemId system = SystemId::weak;
    int n = 0;
    double gamma = 0.0;
    BlockConvention convention = BlockConvention::dissipative;

    /// Offsets of the u, v, theta blocks inside the state vector.
    int u_offset() const { return 0; }
    int v_offset() const { return n; }
    int theta_offset() const { return 2 * n; }

    /// "A_<i>_<n>_<gamma>", used for filenames and error messages.
    std::string label() const;
};

/// diag(1, 2, ..., n).
Eigen::MatrixXd build_D(int n);

/// Coupling matrix. Strong system: -4/pi * ij/(i^2-j^2) for |i-j| odd, 0 otherwise.
/// Weak system: identity.
Eigen::MatrixXd build_F(SystemId system, int n);
Eigen::MatrixXd build_F(int system_id, int n);

DiscreteDynamic assemble_dynamic(const ModelParameters& params);

}  // namespace thermowave
