#include "thermowave/spectral_assembly.hpp"

#include <numbers>
#include <stdexcept>

#include "thermowave/io.hpp"

namespace thermowave {

std::string DiscreteDynamic::label() const {
    return "A_" + std::to_string(static_cast<int>(system)) + "_" + std::to_string(n) + "_" + format_double(gamma);
}

Eigen::MatrixXd build_D(int n) {
    if (n < 1) throw std::invalid_argument("build_D: n must be >= 1");
    return Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n)).asDiagonal();
}

Eigen::MatrixXd build_F(SystemId system, int n) {
    if (n < 1) throw std::invalid_argument("build_F: n must be >= 1");
    switch (system) {
        case SystemId::weak:
            return Eigen::MatrixXd::Identity(n, n);
        case SystemId::strong: {
            Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j <= n; ++j) {
                    if ((i - j) % 2 == 0) continue;
                    const double di = i;
                    const double dj = j;
                    F(i - 1, j - 1) = -4.0 / std::numbers::pi * di * dj / (di * di - dj * dj);
                }
            }
            return F;
        }
    }
    throw std::invalid_argument("build_F: unknown system id");
}

Eigen::MatrixXd build_F(int system_id, int n) { return build_F(system_from_int(system_id), n); }

DiscreteDynamic assemble_dynamic(const ModelParameters& params) {
    params.validate();
    const int n = params.n_modes;
    const Eigen::MatrixXd D = build_D(n);
    const Eigen::MatrixXd F = build_F(params.system, n);

    DiscreteDynamic dyn;
    dyn.system = params.system;
    dyn.n = n;
    dyn.gamma = params.gamma;
    dyn.convention = params.convention;

    auto& A = dyn.matrix;
    A = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    A.block(0, n, n, n) = D;
    A.block(n, 0, n, n) = -D;
    A.block(n, 2 * n, n, n) = -params.gamma * F;
    if (params.convention == BlockConvention::dissipative)
        A.block(2 * n, n, n, n) = params.gamma * F.transpose();
    else
        A.block(2 * n, n, n, n) = params.gamma * F;
    A.block(2 * n, 2 * n, n, n) = -(D * D);
    return dyn;
}

}  // namespace thermowave
