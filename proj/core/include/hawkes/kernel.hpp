#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace hawkes {

// Piecewise-constant interaction function. Bin j covers (knots[j], knots[j+1]]
// and carries heights[j]; knots[0] == 0 and knots.back() is the support length.
struct StepKernel {
    std::vector<double> knots;
    std::vector<double> heights;
};

// scale * exp(-rate * t) on (0, support].
struct ExponentialKernel {
    double scale = 0.0;
    double rate = 0.0;
    double support = 0.0;
};

// amplitude * N(t; center, width^2) on (0, support]. The Gaussian density is
// not renormalised for the truncation.
struct TruncGaussKernel {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 0.0;
    double support = 0.0;
};

struct NullKernel {};

/// One interaction function h_{l,k}, supported on [0, A].
///
/// Immutable value type. Construct through the named factories, which validate
/// the variant's invariants and throw ConfigError on violation.
class Kernel {
public:
    using Variant = std::variant<NullKernel, StepKernel, ExponentialKernel, TruncGaussKernel>;

    Kernel() = default;

    static Kernel null();
    static Kernel step(std::vector<double> knots, std::vector<double> heights);
    // Single bin of value `height` on (lo, hi], zero elsewhere on [0, support].
    static Kernel indicator(double height, double lo, double hi, double support);
    static Kernel exponential(double scale, double rate, double support);
    static Kernel trunc_gauss(double amplitude, double center, double width, double support);

    const Variant& variant() const noexcept { return v_; }
    bool is_null() const noexcept { return std::holds_alternative<NullKernel>(v_); }
    bool is_step() const noexcept { return std::holds_alternative<StepKernel>(v_); }
    const StepKernel* as_step() const noexcept { return std::get_if<StepKernel>(&v_); }

    // Upper end of the support; 0 for the null kernel.
    double support() const noexcept;

    // h(t); zero for t <= 0 or t > support().
    double operator()(double t) const noexcept;

    // Exact integral of h over [lo, hi] ∩ [0, support]. Throws ConfigError if lo > hi.
    double integral(double lo, double hi) const;

    // Total mass ∫ h.
    double mass() const noexcept;

    // sup_t h(t), in closed form.
    double sup() const noexcept;

    // Points in (0, support) where h is discontinuous or otherwise non-smooth.
    std::vector<double> breakpoints() const;

    std::string_view type_name() const noexcept;

    friend bool operator==(const Kernel& a, const Kernel& b);

private:
    explicit Kernel(Variant v) : v_(std::move(v)) {}
    Variant v_{NullKernel{}};
};

bool operator==(const StepKernel& a, const StepKernel& b);
bool operator==(const ExponentialKernel& a, const ExponentialKernel& b);
bool operator==(const TruncGaussKernel& a, const TruncGaussKernel& b);
inline bool operator==(const NullKernel&, const NullKernel&) { return true; }

inline double kernel_eval(const Kernel& kernel, double t) noexcept { return kernel(t); }
inline double kernel_integral(const Kernel& kernel, double lo, double hi) {
    return kernel.integral(lo, hi);
}

// Integral over [lo, hi] of a step function given by knots/heights, same bin
// convention as StepKernel. Exposed for the likelihood workspace.
double step_integral(std::span<const double> knots, std::span<const double> heights,
                     double lo, double hi) noexcept;

// Index j of the bin (knots[j], knots[j+1]] containing t, or -1 outside (0, knots.back()].
int step_bin(std::span<const double> knots, double t) noexcept;

}  // namespace hawkes
