#include "hawkes/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hawkes/errors.hpp"

namespace hawkes {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

int step_bin(std::span<const double> knots, double t) noexcept {
    if (knots.size() < 2 || !(t > knots.front()) || t > knots.back()) return -1;
    auto it = std::lower_bound(knots.begin(), knots.end(), t);
    return static_cast<int>(it - knots.begin()) - 1;
}

double step_integral(std::span<const double> knots, std::span<const double> heights, double lo,
                     double hi) noexcept {
    double total = 0.0;
    lo = std::max(lo, knots.front());
    hi = std::min(hi, knots.back());
    if (!(hi > lo)) return 0.0;
    for (std::size_t j = 0; j < heights.size(); ++j) {
        const double a = std::max(lo, knots[j]);
        const double b = std::min(hi, knots[j + 1]);
        if (b > a) total += heights[j] * (b - a);
    }
    return total;
}

Kernel Kernel::null() { return Kernel(NullKernel{}); }

Kernel Kernel::step(std::vector<double> knots, std::vector<double> heights) {
    require(knots.size() >= 2, "step kernel needs at least two knots");
    require(heights.size() + 1 == knots.size(), "step kernel needs knots.size() == heights.size() + 1");
    require(knots.front() == 0.0, "step kernel knots must start at 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
        require(std::isfinite(knots[i]) && knots[i] > knots[i - 1],
                "step kernel knots must be strictly increasing");
    for (double h : heights)
        require(std::isfinite(h) && h >= 0.0, "step kernel heights must be finite and non-negative");
    return Kernel(StepKernel{std::move(knots), std::move(heights)});
}

Kernel Kernel::indicator(double height, double lo, double hi, double support) {
    require(0.0 <= lo && lo < hi && hi <= support, "indicator needs 0 <= lo < hi <= support");
    std::vector<double> knots{0.0};
    std::vector<double> heights;
    if (lo > 0.0) {
        knots.push_back(lo);
        heights.push_back(0.0);
    }
    knots.push_back(hi);
    heights.push_back(height);
    if (hi < support) {
        knots.push_back(support);
        heights.push_back(0.0);
    }
    return step(std::move(knots), std::move(heights));
}

Kernel Kernel::exponential(double scale, double rate, double support) {
    require(std::isfinite(scale) && scale >= 0.0, "exponential kernel scale must be >= 0");
    require(std::isfinite(rate) && rate >= 0.0, "exponential kernel rate must be >= 0");
    require(std::isfinite(support) && support > 0.0, "kernel support must be > 0");
    return Kernel(ExponentialKernel{scale, rate, support});
}

Kernel Kernel::trunc_gauss(double amplitude, double center, double width, double support) {
    require(std::isfinite(amplitude) && amplitude >= 0.0, "gaussian kernel amplitude must be >= 0");
    require(std::isfinite(center), "gaussian kernel center must be finite");
    require(std::isfinite(width) && width > 0.0, "gaussian kernel width must be > 0");
    require(std::isfinite(support) && support > 0.0, "kernel support must be > 0");
    return Kernel(TruncGaussKernel{amplitude, center, width, support});
}

double Kernel::support() const noexcept {
    return std::visit(overloaded{
                          [](const NullKernel&) { return 0.0; },
                          [](const StepKernel& s) { return s.knots.back(); },
                          [](const ExponentialKernel& e) { return e.support; },
                          [](const TruncGaussKernel& g) { return g.support; },
                      },
                      v_);
}

double Kernel::operator()(double t) const noexcept {
    return std::visit(
        overloaded{
            [](const NullKernel&) { return 0.0; },
            [t](const StepKernel& s) {
                const int j = step_bin(s.knots, t);
                return j < 0 ? 0.0 : s.heights[static_cast<std::size_t>(j)];
            },
            [t](const ExponentialKernel& e) {
                if (!(t > 0.0) || t > e.support) return 0.0;
                return e.scale * std::exp(-e.rate * t);
            },
            [t](const TruncGaussKernel& g) {
                if (!(t > 0.0) || t > g.support) return 0.0;
                const double z = (t - g.center) / g.width;
                return g.amplitude * std::exp(-0.5 * z * z) /
                       (g.width * std::sqrt(2.0 * std::numbers::pi));
            },
        },
        v_);
}

double Kernel::integral(double lo, double hi) const {
    if (lo > hi) throw ConfigError("kernel integral requires lo <= hi");
    const double s = support();
    lo = std::max(lo, 0.0);
    hi = std::min(hi, s);
    if (!(hi > lo)) return 0.0;
    return std::visit(overloaded{
                          [](const NullKernel&) { return 0.0; },
                          [lo, hi](const StepKernel& k) {
                              return step_integral(k.knots, k.heights, lo, hi);
                          },
                          [lo, hi](const ExponentialKernel& e) {
                              if (e.rate == 0.0) return e.scale * (hi - lo);
                              // a/b (e^{-b lo} - e^{-b hi}), written to avoid cancellation
                              return e.scale / e.rate * std::exp(-e.rate * lo) *
                                     -std::expm1(-e.rate * (hi - lo));
                          },
                          [lo, hi](const TruncGaussKernel& g) {
                              return g.amplitude * (normal_cdf((hi - g.center) / g.width) -
                                                    normal_cdf((lo - g.center) / g.width));
                          },
                      },
                      v_);
}

double Kernel::mass() const noexcept {
    if (is_null()) return 0.0;
    return integral(0.0, support());
}

double Kernel::sup() const noexcept {
    return std::visit(overloaded{
                          [](const NullKernel&) { return 0.0; },
                          [](const StepKernel& s) {
                              return *std::max_element(s.heights.begin(), s.heights.end());
                          },
                          [](const ExponentialKernel& e) { return e.scale; },
                          [this](const TruncGaussKernel& g) {
                              const double peak = g.amplitude / (g.width * std::sqrt(2.0 * std::numbers::pi));
                              if (g.center > 0.0 && g.center <= g.support) return peak;
                              if (g.center <= 0.0) {
                                  const double z = g.center / g.width;
                                  return peak * std::exp(-0.5 * z * z);
                              }
                              return (*this)(g.support);
                          },
                      },
                      v_);
}

std::vector<double> Kernel::breakpoints() const {
    if (const auto* s = as_step()) return {s->knots.begin() + 1, s->knots.end() - 1};
    return {};
}

std::string_view Kernel::type_name() const noexcept {
    return std::visit(overloaded{
                          [](const NullKernel&) { return std::string_view{"null"}; },
                          [](const StepKernel&) { return std::string_view{"step"}; },
                          [](const ExponentialKernel&) { return std::string_view{"exponential"}; },
                          [](const TruncGaussKernel&) { return std::string_view{"trunc_gauss"}; },
                      },
                      v_);
}

bool operator==(const StepKernel& a, const StepKernel& b) {
    return a.knots == b.knots && a.heights == b.heights;
}
bool operator==(const ExponentialKernel& a, const ExponentialKernel& b) {
    return a.scale == b.scale && a.rate == b.rate && a.support == b.support;
}
bool operator==(const TruncGaussKernel& a, const TruncGaussKernel& b) {
    return a.amplitude == b.amplitude && a.center == b.center && a.width == b.width &&
           a.support == b.support;
}
bool operator==(const Kernel& a, const Kernel& b) { return a.v_ == b.v_; }

}  // namespace hawkes
