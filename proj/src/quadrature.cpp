#include "reslab/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace reslab {

namespace {

void golub_welsch(const Eigen::MatrixXd& jacobi, double mu0, std::vector<double>& nodes,
                  std::vector<double>& weights)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    const int n = static_cast<int>(jacobi.rows());
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

}  // namespace

GaussHermiteRule gauss_hermite(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(0.5 * i);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    GaussHermiteRule rule;
    golub_welsch(jacobi, std::sqrt(M_PI), rule.nodes, rule.weights);
    return rule;
}

GaussLegendreRule gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = static_cast<double>(i) / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    GaussLegendreRule rule;
    golub_welsch(jacobi, 2.0, rule.nodes, rule.weights);
    return rule;
}

}  // namespace reslab
