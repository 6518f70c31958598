#include "thermowave/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace thermowave {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double frac(double y) {
    double f = y - std::floor(y);
    // y slightly below an integer can round up to exactly 1.0
    return f >= 1.0 ? 0.0 : f;
}

ScalarProfile::ScalarProfile(ProfileKind kind) : kind_(std::move(kind)) {
    if (const auto* t = std::get_if<TableProfile>(&kind_); t && t->values.empty())
        throw std::invalid_argument("table profile needs at least one value");
}

double ScalarProfile::operator()(double y) const {
    const double s = frac(y);
    return std::visit(overloaded{
                          [](const ConstantProfile& c) { return c.value; },
                          [s](const AffineSineProfile& f) { return f.p + f.q * std::sin(kTwoPi * s); },
                          [s](const AffineCosProfile& f) { return f.p + f.q * std::cos(kTwoPi * s); },
                          [s](const TableProfile& t) {
                              const auto n = t.values.size();
                              auto k = static_cast<std::size_t>(s * static_cast<double>(n));
                              return t.values[std::min(k, n - 1)];
                          },
                      },
                      kind_);
}

bool ScalarProfile::is_constant() const {
    return std::visit(overloaded{
                          [](const ConstantProfile&) { return true; },
                          [](const AffineSineProfile& f) { return f.q == 0.0; },
                          [](const AffineCosProfile& f) { return f.q == 0.0; },
                          [](const TableProfile& t) {
                              return std::all_of(t.values.begin(), t.values.end(),
                                                 [&](double v) { return v == t.values.front(); });
                          },
                      },
                      kind_);
}

std::vector<double> ScalarProfile::breakpoints() const {
    const auto* t = std::get_if<TableProfile>(&kind_);
    if (!t) return {};
    const auto n = t->values.size();
    std::vector<double> pts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) pts[k] = static_cast<double>(k) / static_cast<double>(n);
    return pts;
}

std::string ScalarProfile::describe() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const ConstantProfile& c) { os << "constant(" << c.value << ")"; },
                   [&](const AffineSineProfile& f) { os << "affine-sine(" << f.p << "," << f.q << ")"; },
                   [&](const AffineCosProfile& f) { os << "affine-cos(" << f.p << "," << f.q << ")"; },
                   [&](const TableProfile& t) {
                       os << "table[";
                       for (std::size_t k = 0; k < t.values.size(); ++k) os << (k ? "," : "") << t.values[k];
                       os << "]";
                   },
               },
               kind_);
    return os.str();
}

CoefficientField CoefficientField::scalar(std::string name, ScalarProfile profile, double alpha, FieldRole role) {
    CoefficientField f;
    f.name = std::move(name);
    f.role = role;
    f.alpha = alpha;
    f.first = std::move(profile);
    return f;
}

CoefficientField CoefficientField::coupling(std::string name, ScalarProfile profile) {
    return scalar(std::move(name), std::move(profile), 1.0, FieldRole::coupling);
}

CoefficientField CoefficientField::diagonal(std::string name, ScalarProfile a11, ScalarProfile a22, double alpha,
                                            Axis axis11, Axis axis22) {
    CoefficientField f;
    f.name = std::move(name);
    f.alpha = alpha;
    f.rank = TensorRank::diagonal2;
    f.first = std::move(a11);
    f.second = std::move(a22);
    f.first_axis = axis11;
    f.second_axis = axis22;
    return f;
}

bool CoefficientField::is_laminate() const {
    auto depends_on_y2 = [](const ScalarProfile& p, Axis axis) { return axis == Axis::y2 && !p.is_constant(); };
    if (depends_on_y2(first, first_axis)) return false;
    if (second && depends_on_y2(*second, second_axis)) return false;
    return true;
}

double sample(const CoefficientField& field, double y) {
    if (field.rank != TensorRank::scalar)
        throw std::invalid_argument("field '" + field.name + "' is a tensor; use sample_diagonal");
    return field.first(y);
}

std::array<double, 2> sample_diagonal(const CoefficientField& field, double y1, double y2) {
    auto at = [&](const ScalarProfile& p, Axis axis) { return p(axis == Axis::y1 ? y1 : y2); };
    if (field.rank == TensorRank::scalar) {
        const double v = field.first(y1);
        return {v, v};
    }
    return {at(field.first, field.first_axis), at(*field.second, field.second_axis)};
}

std::string ValidationReport::summary() const {
    if (passed()) return "pass (" + std::to_string(samples) + " samples)";
    std::ostringstream os;
    os << "fail:";
    for (const auto& v : violations) os << " [" << v.bound << " at y=" << v.witness_y << ", value " << v.value << "]";
    return os.str();
}

namespace {

void check_profile(const CoefficientField& field, const ScalarProfile& profile, const std::string& label,
                   std::size_t samples, ValidationReport& report) {
    const bool coupling = field.role == FieldRole::coupling;
    const std::string lower = coupling ? "0<" + label : "alpha<=" + label;
    const std::string upper = coupling ? label + "<1" : label + "<=1/alpha";
    const std::string both = coupling ? "0<" + label + "<1 violated" : "alpha<=" + label + "<=1/alpha violated";
    bool low_hit = false;
    bool high_hit = false;
    bool periodic_hit = false;

    auto check = [&](double y) {
        const double v = profile(y);
        const bool low_bad = coupling ? !(v > 0.0) : !(v >= field.alpha);
        const bool high_bad = coupling ? !(v < 1.0) : !(v <= 1.0 / field.alpha);
        if (low_bad && !low_hit) {
            low_hit = true;
            report.violations.push_back({both + " (" + lower + ")", y, v});
        }
        if (high_bad && !high_hit) {
            high_hit = true;
            report.violations.push_back({both + " (" + upper + ")", y, v});
        }
        if (!periodic_hit && std::abs(profile(y + 1.0) - v) > 1e-14) {
            periodic_hit = true;
            report.violations.push_back({"periodicity of " + label, y, v});
        }
    };

    for (std::size_t k = 0; k < samples; ++k) check(static_cast<double>(k) / static_cast<double>(samples));
    if (const auto* t = std::get_if<TableProfile>(&profile.kind())) {
        const auto n = static_cast<double>(t->values.size());
        for (std::size_t k = 0; k < t->values.size(); ++k) check((static_cast<double>(k) + 0.5) / n);
    }
    report.samples += samples;
}

}  // namespace

ValidationReport validate(const CoefficientField& field, std::size_t samples) {
    ValidationReport report;
    samples = std::max(samples, kValidationSamples);
    if (field.role == FieldRole::elliptic && !(field.alpha > 0.0 && field.alpha <= 1.0)) {
        report.violations.push_back({"0<alpha<=1 violated", 0.0, field.alpha});
        return report;
    }
    if (field.role == FieldRole::coupling && field.rank != TensorRank::scalar) {
        report.violations.push_back({"coupling field must be scalar", 0.0, 0.0});
        return report;
    }
    const std::string base = field.role == FieldRole::coupling ? "gamma" : (field.name.empty() ? "f" : field.name);
    if (field.rank == TensorRank::scalar) {
        check_profile(field, field.first, base, samples, report);
    } else {
        if (!field.second) {
            report.violations.push_back({"diagonal field missing second component", 0.0, 0.0});
            return report;
        }
        check_profile(field, field.first, base + "11", samples, report);
        check_profile(field, *field.second, base + "22", samples, report);
    }
    return report;
}

double consistent_alpha(const ScalarProfile& profile, std::size_t samples) {
    double lo = profile(0.0);
    double hi = lo;
    auto visit = [&](double y) {
        const double v = profile(y);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (std::size_t k = 0; k < samples; ++k) visit(static_cast<double>(k) / static_cast<double>(samples));
    if (const auto* t = std::get_if<TableProfile>(&profile.kind()))
        for (double v : t->values) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!(lo > 0.0)) throw std::invalid_argument("profile " + profile.describe() + " is not positive");
    return std::min({1.0, lo, 1.0 / hi});
}

SystemId system_from_int(int id) {
    if (id == 1) return SystemId::strong;
    if (id == 2) return SystemId::weak;
    throw std::invalid_argument("unknown system id " + std::to_string(id) + " (expected 1 or 2)");
}

void ModelParameters::validate() const {
    if (system != SystemId::strong && system != SystemId::weak)
        throw std::invalid_argument("unknown system id");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("gamma must lie in [0,1), got " + std::to_string(gamma));
    if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
    if (n_modes > kMaxModes)
        throw std::invalid_argument("n_modes " + std::to_string(n_modes) + " exceeds the dense limit " +
                                    std::to_string(kMaxModes));
}

}  // namespace thermowave

namespace thermowave {

double integrate(const ScalarProfile& profile, double y0, double y1, double (*g)(double), std::size_t panels) {
    if (y1 < y0) return -integrate(profile, y1, y0, g, panels);
    if (y1 == y0) return 0.0;
    if (const auto* t = std::get_if<TableProfile>(&profile.kind())) {
        const auto n = static_cast<long long>(t->values.size());
        const double dn = static_cast<double>(n);
        const auto k0 = static_cast<long long>(std::floor(y0 * dn));
        const auto k1 = static_cast<long long>(std::ceil(y1 * dn));
        double sum = 0.0;
        for (long long k = k0; k < k1; ++k) {
            const double a = std::max(y0, static_cast<double>(k) / dn);
            const double b = std::min(y1, static_cast<double>(k + 1) / dn);
            if (b <= a) continue;
            const long long idx = ((k % n) + n) % n;
            sum += g(t->values[static_cast<std::size_t>(idx)]) * (b - a);
        }
        return sum;
    }
    // 4-point Gauss-Legendre
    static constexpr double nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
    static constexpr double weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                          0.3478548451374538};
    panels = std::max<std::size_t>(panels, 1);
    const double width = (y1 - y0) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = y0 + (static_cast<double>(p) + 0.5) * width;
        double local = 0.0;
        for (int q = 0; q < 4; ++q) local += weights[q] * g(profile(mid + 0.5 * width * nodes[q]));
        sum += 0.5 * width * local;
    }
    return sum;
}

}  // namespace thermowave
