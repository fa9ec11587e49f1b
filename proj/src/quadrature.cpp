#include "fbd/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace fbd::quad {

namespace {

Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("Golub-Welsch eigen-decomposition failed");
    }
    Rule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
    return rule;
}

template <typename Key, typename Make>
const Rule& cached(std::map<Key, std::unique_ptr<Rule>>& cache, std::mutex& m,
                   const Key& key, Make&& make) {
    std::lock_guard lock(m);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<Rule>(make())).first;
    }
    return *it->second;
}

}  // namespace

const Rule& gauss_laguerre(int n, double alpha) {
    if (n < 1 || alpha <= -1.0) throw std::invalid_argument("gauss_laguerre: bad order");
    static std::map<std::pair<int, double>, std::unique_ptr<Rule>> cache;
    static std::mutex m;
    return cached(cache, m, std::pair{n, alpha}, [&] {
        Eigen::VectorXd diag(n);
        Eigen::VectorXd sub(std::max(n - 1, 0));
        for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + 1.0 + alpha;
        for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(i * (i + alpha));
        return golub_welsch(diag, sub, std::tgamma(alpha + 1.0));
    });
}

const Rule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: bad order");
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex m;
    return cached(cache, m, n, [&] {
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd sub(std::max(n - 1, 0));
        for (int i = 1; i < n; ++i) sub[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
        return golub_welsch(diag, sub, 2.0);
    });
}

}  // namespace fbd::quad
