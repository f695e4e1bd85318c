#include "hawkes/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hawkes/errors.hpp"

namespace hawkes {

HawkesModel::HawkesModel(double support, std::vector<double> nu, std::vector<Kernel> kernels)
    : support_(support), nu_(std::move(nu)), kernels_(std::move(kernels)) {
    if (!(std::isfinite(support_) && support_ > 0.0)) throw ConfigError("support A must be > 0");
    if (nu_.empty()) throw ConfigError("model needs at least one process");
    if (kernels_.size() != nu_.size() * nu_.size())
        throw ConfigError("model needs K*K kernels, got " + std::to_string(kernels_.size()) +
                          " for K=" + std::to_string(nu_.size()));
    for (double v : nu_)
        if (!(std::isfinite(v) && v > 0.0)) throw ConfigError("spontaneous rates nu must be > 0");
    for (const auto& h : kernels_) {
        if (h.is_null()) continue;
        if (h.support() > support_ * (1.0 + 1e-12))
            throw ConfigError("kernel support exceeds the model support A");
    }
}

HawkesModel HawkesModel::poisson(double support, std::vector<double> nu) {
    const std::size_t k = nu.size();
    return HawkesModel(support, std::move(nu), std::vector<Kernel>(k * k));
}

HawkesModel HawkesModel::with_nu(std::vector<double> nu) const {
    return HawkesModel(support_, std::move(nu), kernels_);
}

HawkesModel HawkesModel::with_kernel(std::size_t l, std::size_t k, Kernel h) const {
    auto kernels = kernels_;
    kernels.at(l * dim() + k) = std::move(h);
    return HawkesModel(support_, nu_, std::move(kernels));
}

bool HawkesModel::all_step() const noexcept {
    for (const auto& h : kernels_)
        if (!h.is_null() && !h.is_step()) return false;
    return true;
}

Eigen::MatrixXd branching_matrix(const HawkesModel& model) {
    const auto k = static_cast<Eigen::Index>(model.dim());
    Eigen::MatrixXd rho(k, k);
    for (Eigen::Index l = 0; l < k; ++l)
        for (Eigen::Index m = 0; m < k; ++m)
            rho(l, m) = model.kernel(static_cast<std::size_t>(l), static_cast<std::size_t>(m))
                            .integral(0.0, model.support());
    return rho;
}

namespace {

struct PowerResult {
    double value = 0.0;
    int iterations = 0;
};

// Strongly connected components of the graph with an edge i -> j when m(i, j) > 0.
std::vector<std::vector<Eigen::Index>> strong_components(const Eigen::MatrixXd& m) {
    const auto n = m.rows();
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack;
    std::vector<std::vector<Eigen::Index>> components;
    int counter = 0;

    auto visit = [&](auto&& self, Eigen::Index v) -> void {
        const auto vi = static_cast<std::size_t>(v);
        index[vi] = low[vi] = counter++;
        stack.push_back(v);
        on_stack[vi] = true;
        for (Eigen::Index w = 0; w < n; ++w) {
            if (!(m(v, w) > 0.0)) continue;
            const auto wi = static_cast<std::size_t>(w);
            if (index[wi] < 0) {
                self(self, w);
                low[vi] = std::min(low[vi], low[wi]);
            } else if (on_stack[wi]) {
                low[vi] = std::min(low[vi], index[wi]);
            }
        }
        if (low[vi] == index[vi]) {
            std::vector<Eigen::Index> component;
            Eigen::Index w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = false;
                component.push_back(w);
            } while (w != v);
            std::sort(component.begin(), component.end());
            components.push_back(std::move(component));
        }
    };
    for (Eigen::Index v = 0; v < n; ++v)
        if (index[static_cast<std::size_t>(v)] < 0) visit(visit, v);
    return components;
}

// Perron root of a non-negative matrix. The root of a reducible matrix is the
// largest root over its irreducible diagonal blocks; each block is iterated as
// (block + c I) with c its max row sum, which is primitive, so the dominant eigenvalue is simple and
// strictly dominant in modulus. Uniform start vector, L1 normalisation.
PowerResult power_iteration(const Eigen::MatrixXd& m, const PowerIterationOptions& opts,
                            const char* what) {
    PowerResult best;
    for (const auto& component : strong_components(m)) {
        const auto n = static_cast<Eigen::Index>(component.size());
        if (n == 1) {
            best.value = std::max(best.value, m(component[0], component[0]));
            continue;
        }
        Eigen::MatrixXd shifted(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                shifted(i, j) = m(component[static_cast<std::size_t>(i)],
                                  component[static_cast<std::size_t>(j)]);
        // Shift by the max row sum so the contraction rate is scale-free.
        const double shift = shifted.rowwise().sum().maxCoeff();
        shifted.diagonal().array() += shift;
        Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        bool converged = false;
        double estimate = 0.0;
        for (int it = 1; it <= opts.max_iterations; ++it) {
            // Row-vector iteration v <- v B keeps the left Perron vector, same root.
            Eigen::VectorXd w = shifted.transpose() * v;
            estimate = w.lpNorm<1>();
            w /= estimate;
            const double change = (w - v).lpNorm<Eigen::Infinity>();
            v = std::move(w);
            ++best.iterations;
            if (change <= opts.tolerance) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw NumericError(std::string("power iteration did not converge for ") + what,
                               std::vector<double>(v.data(), v.data() + v.size()));
        best.value = std::max(best.value, estimate - shift);
    }
    return best;
}

}  // namespace

SpectralReport spectral_check(const Eigen::MatrixXd& rho, PowerIterationOptions opts) {
    if (rho.rows() != rho.cols()) throw ConfigError("branching matrix must be square");
    if ((rho.array() < 0.0).any()) throw ConfigError("branching matrix must be non-negative");
    SpectralReport report;
    const auto radius = power_iteration(rho, opts, "spectral radius");
    const Eigen::MatrixXd gram = rho.transpose() * rho;
    const auto norm2 = power_iteration(gram, opts, "spectral norm");
    report.spectral_radius = radius.value;
    report.spectral_norm = std::sqrt(norm2.value);
    report.radius_iterations = radius.iterations;
    report.norm_iterations = norm2.iterations;
    report.stationary = report.spectral_radius < 1.0;
    return report;
}

SpectralReport spectral_check(const HawkesModel& model, PowerIterationOptions opts) {
    return spectral_check(branching_matrix(model), opts);
}

namespace {

Eigen::MatrixXd stationary_system(const HawkesModel& model, const char* what) {
    const Eigen::MatrixXd rho = branching_matrix(model);
    const auto report = spectral_check(rho);
    if (!report.stationary)
        throw NumericError(std::string(what) + ": model is not stationary (spectral radius " +
                               std::to_string(report.spectral_radius) + ")",
                           {report.spectral_radius, report.spectral_norm});
    const auto k = rho.rows();
    return Eigen::MatrixXd::Identity(k, k) - rho.transpose();
}

}  // namespace

Eigen::VectorXd mean_intensity(const HawkesModel& model) {
    const Eigen::MatrixXd system = stationary_system(model, "mean_intensity");
    const Eigen::VectorXd nu = Eigen::Map<const Eigen::VectorXd>(
        model.nu().data(), static_cast<Eigen::Index>(model.dim()));
    return system.partialPivLu().solve(nu);
}

double expected_cluster_size(const HawkesModel& model, std::size_t ell) {
    if (ell >= model.dim()) throw ConfigError("expected_cluster_size: mark out of range");
    const Eigen::MatrixXd system = stationary_system(model, "expected_cluster_size");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(system.rows());
    e(static_cast<Eigen::Index>(ell)) = 1.0;
    return system.partialPivLu().solve(e).sum();
}

}  // namespace hawkes
