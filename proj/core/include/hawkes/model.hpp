#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "hawkes/kernel.hpp"

namespace hawkes {

/// Parameter f = (nu, h) of a K-variate linear Hawkes process.
///
/// Marks are 0-based in the API (mark m here is process m+1 in files and
/// reports). kernel(l, k) is the influence of process l on process k, so
/// lambda^k_t = nu_k + sum_l sum_{s < t} h_{l,k}(t - s).
class HawkesModel {
public:
    HawkesModel() = default;

    // Kernels given row-major, kernels[l * K + k]. Throws ConfigError when
    // sizes disagree, a rate is not positive, or a kernel extends past A.
    HawkesModel(double support, std::vector<double> nu, std::vector<Kernel> kernels);

    // All-null model (homogeneous Poisson).
    static HawkesModel poisson(double support, std::vector<double> nu);

    std::size_t dim() const noexcept { return nu_.size(); }
    double support() const noexcept { return support_; }
    const std::vector<double>& nu() const noexcept { return nu_; }
    double nu(std::size_t k) const { return nu_[k]; }
    const Kernel& kernel(std::size_t l, std::size_t k) const { return kernels_[l * dim() + k]; }
    const std::vector<Kernel>& kernels() const noexcept { return kernels_; }

    HawkesModel with_nu(std::vector<double> nu) const;
    HawkesModel with_kernel(std::size_t l, std::size_t k, Kernel h) const;

    bool all_step() const noexcept;

    friend bool operator==(const HawkesModel&, const HawkesModel&) = default;

private:
    double support_ = 0.0;
    std::vector<double> nu_;
    std::vector<Kernel> kernels_;
};

// rho(l, k) = integral of h_{l,k} over [0, A].
Eigen::MatrixXd branching_matrix(const HawkesModel& model);

struct SpectralReport {
    double spectral_radius = 0.0;
    double spectral_norm = 0.0;
    bool stationary = true;
    int radius_iterations = 0;
    int norm_iterations = 0;
};

struct PowerIterationOptions {
    double tolerance = 1e-12;
    int max_iterations = 10000;
};

// Power iteration for the Perron root of a non-negative matrix and for the
// largest singular value (via rho^T rho). Throws NumericError carrying the last
// iterate when either iteration fails to converge.
SpectralReport spectral_check(const Eigen::MatrixXd& rho, PowerIterationOptions opts = {});
SpectralReport spectral_check(const HawkesModel& model, PowerIterationOptions opts = {});

// Stationary mean intensity: solves (I - rho^T) mu = nu. Throws NumericError
// for a non-stationary model.
Eigen::VectorXd mean_intensity(const HawkesModel& model);

// Expected number of points in a cluster rooted at a single ancestor of
// mark `ell`, ancestor included: 1^T (I - rho^T)^{-1} e_ell.
double expected_cluster_size(const HawkesModel& model, std::size_t ell);

}  // namespace hawkes
