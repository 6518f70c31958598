#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace thermowave {

// ----------------------------------------------------------------------------
// Periodic profiles
// ----------------------------------------------------------------------------

struct ConstantProfile {
    double value = 1.0;
};

// p + q sin(2 pi y)
struct AffineSineProfile {
    double p = 0.0;
    double q = 0.0;
};

// p + q cos(2 pi y)
struct AffineCosProfile {
    double p = 0.0;
    double q = 0.0;
};

// Piecewise constant over a uniform partition of [0,1); cell k is [k/N, (k+1)/N).
struct TableProfile {
    std::vector<double> values;
};

using ProfileKind = std::variant<ConstantProfile, AffineSineProfile, AffineCosProfile, TableProfile>;

/// A 1-periodic scalar function of one variable.
class ScalarProfile {
public:
    ScalarProfile() = default;
    ScalarProfile(ProfileKind kind);  // NOLINT: implicit by intent

    static ScalarProfile constant(double value) { return {ConstantProfile{value}}; }
    static ScalarProfile affine_sine(double p, double q) { return {AffineSineProfile{p, q}}; }
    static ScalarProfile affine_cos(double p, double q) { return {AffineCosProfile{p, q}}; }
    static ScalarProfile table(std::vector<double> values) { return {TableProfile{std::move(values)}}; }

    double operator()(double y) const;

    bool is_constant() const;
    bool is_table() const { return std::holds_alternative<TableProfile>(kind_); }

    /// Breakpoints of a table profile inside [0,1], including 0 and 1. Empty for smooth kinds.
    std::vector<double> breakpoints() const;

    const ProfileKind& kind() const { return kind_; }
    std::string describe() const;

private:
    ProfileKind kind_ = ConstantProfile{};
};

/// y - floor(y), in [0,1).
double frac(double y);

/// Integral of g(profile(y)) over [y0, y1] (any real interval). Table profiles
/// are integrated exactly cell by cell; smooth kinds use `panels` Gauss-Legendre
/// panels of 4 points.
double integrate(const ScalarProfile& profile, double y0, double y1, double (*g)(double), std::size_t panels = 1);

inline double identity_fn(double v) { return v; }
inline double reciprocal_fn(double v) { return 1.0 / v; }

// ----------------------------------------------------------------------------
// Coefficient fields
// ----------------------------------------------------------------------------

/// Which structural bound a field must satisfy.
enum class FieldRole {
    elliptic,  // alpha <= f <= 1/alpha  (a, b, c, d)
    coupling,  // 0 < f < 1              (gamma)
};

enum class TensorRank { scalar, diagonal2 };

enum class Axis { y1, y2 };

/// Y-periodic coefficient. Scalar fields use `first`; diagonal 2x2 fields carry
/// diag(first(y_axis1), second(y_axis2)).
struct CoefficientField {
    std::string name;
    FieldRole role = FieldRole::elliptic;
    double alpha = 1.0;
    TensorRank rank = TensorRank::scalar;
    ScalarProfile first;
    std::optional<ScalarProfile> second;
    Axis first_axis = Axis::y1;
    Axis second_axis = Axis::y1;

    static CoefficientField scalar(std::string name, ScalarProfile profile, double alpha,
                                   FieldRole role = FieldRole::elliptic);
    static CoefficientField coupling(std::string name, ScalarProfile profile);
    static CoefficientField diagonal(std::string name, ScalarProfile a11, ScalarProfile a22,
                                     double alpha, Axis axis11 = Axis::y1, Axis axis22 = Axis::y1);

    /// Laminate in y1: no component depends on y2.
    bool is_laminate() const;
};

/// Scalar sample. Throws std::invalid_argument for diagonal fields.
double sample(const CoefficientField& field, double y);

/// Diagonal sample at (y1, y2). Scalar fields return {f(y1), f(y1)}.
std::array<double, 2> sample_diagonal(const CoefficientField& field, double y1, double y2);

struct Violation {
    std::string bound;
    double witness_y = 0.0;
    double value = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t samples = 0;

    bool passed() const { return violations.empty(); }
    std::string summary() const;
};

/// Minimum sampling density used by `validate`.
inline constexpr std::size_t kValidationSamples = std::size_t{1} << 12;

/// Check periodic-coefficient hypotheses on a uniform grid of `samples` points.
/// One violation is reported per failing bound (first witness).
ValidationReport validate(const CoefficientField& field, std::size_t samples = kValidationSamples);

/// Smallest alpha consistent with the sampled range of an elliptic field.
double consistent_alpha(const ScalarProfile& profile, std::size_t samples = kValidationSamples);

// ----------------------------------------------------------------------------
// Spectral problem parameters
// ----------------------------------------------------------------------------

enum class SystemId : int {
    strong = 1,  // u_tt - u_xx + gamma theta_x = 0
    weak = 2,    // u_tt - u_xx + gamma theta = 0
};

SystemId system_from_int(int id);

/// How the (3,2) coupling block is assembled.
enum class BlockConvention {
    dissipative,    // gamma F^T: exact energy identity
    literal,        // gamma F, not dissipative for the strong system
};

inline constexpr int kMaxModes = 512;

struct ModelParameters {
    SystemId system = SystemId::weak;
    double gamma = 0.5;
    int n_modes = 8;
    BlockConvention convention = BlockConvention::dissipative;

    /// 0 <= gamma < 1 (gamma = 0 is the uncoupled control), 1 <= n_modes <= kMaxModes.
    void validate() const;
};

}  // namespace thermowave
