#include <cmath>

#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

// Strict "a beats b" under the selection order. Scores are compared as
// lambda*c - u, which orders exactly like 1 - u + lambda*c.
bool better(double u_a, double c_a, std::size_t a, double u_b, double c_b, std::size_t b,
            double lambda) {
  const double s_a = lambda * c_a - u_a;
  const double s_b = lambda * c_b - u_b;
  if (s_a != s_b) return s_a < s_b;
  if (c_a != c_b) return c_a < c_b;
  return a < b;
}

}  // namespace

std::size_t select(std::span<const double> u_hat, std::span<const double> c_hat, double lambda,
                   const std::vector<bool>* eligible) {
  if (u_hat.empty()) throw ValidationError("selection over an empty model set");
  if (u_hat.size() != c_hat.size())
    throw ValidationError("utility and cost predictions differ in length");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be finite and nonnegative");
  if (eligible && eligible->size() != u_hat.size())
    throw ValidationError("eligibility mask has the wrong length");

  std::size_t best = u_hat.size();
  for (std::size_t j = 0; j < u_hat.size(); ++j) {
    if (eligible && !(*eligible)[j]) continue;
    if (!std::isfinite(u_hat[j]) || !std::isfinite(c_hat[j]))
      throw ValidationError("non-finite prediction for model " + std::to_string(j));
    if (best == u_hat.size() || better(u_hat[j], c_hat[j], j, u_hat[best], c_hat[best], best, lambda))
      best = j;
  }
  if (best == u_hat.size()) throw ValidationError("no eligible model for an instance");
  return best;
}

std::size_t select(const Eigen::Ref<const Eigen::RowVectorXd>& u_hat,
                   const Eigen::Ref<const Eigen::RowVectorXd>& c_hat, double lambda,
                   const std::vector<bool>* eligible) {
  const Eigen::RowVectorXd u = u_hat;
  const Eigen::RowVectorXd c = c_hat;
  return select(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                std::span<const double>(c.data(), static_cast<std::size_t>(c.size())), lambda,
                eligible);
}

RouterPolicy point_mass_policy(const Prediction& prediction, double lambda,
                               const Eligibility& eligible) {
  const auto n = prediction.u_hat.rows();
  const auto k = prediction.u_hat.cols();
  const bool masked = eligible.size() > 0;
  if (masked && (eligible.rows() != n || eligible.cols() != k))
    throw ValidationError("eligibility shape does not match the predictions");
  RouterPolicy policy = RouterPolicy::Zero(n, k);
  std::vector<bool> row_mask(static_cast<std::size_t>(k), true);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (masked)
      for (Eigen::Index j = 0; j < k; ++j) row_mask[static_cast<std::size_t>(j)] = eligible(i, j);
    const auto j = select(prediction.u_hat.row(i), prediction.c_hat.row(i), lambda,
                          masked ? &row_mask : nullptr);
    policy(i, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return policy;
}

}  // namespace mmroute
