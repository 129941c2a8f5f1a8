#include "logicdepth/approximation.hpp"

#include <cmath>

#include "logicdepth/errors.hpp"
#include "logicdepth/format.hpp"
#include "logicdepth/linear_ops.hpp"

namespace logicdepth {

namespace {

void require_basis(const PredicateFamily& basis, std::size_t inputs, const char* what) {
  if (basis.empty()) throw DomainError(std::string(what) + ": empty basis");
  if (basis.universe()->size() != inputs) {
    throw DomainError(std::string(what) + ": target covers " + std::to_string(inputs) +
                      " inputs, basis universe has " + std::to_string(basis.universe()->size()));
  }
}

}  // namespace

std::string to_string(Embedding e) {
  return e == Embedding::zero_one ? "01" : "pm1";
}

Embedding embedding_from_string(const std::string& s) {
  if (s == "01" || s == "zero_one") return Embedding::zero_one;
  if (s == "pm1" || s == "plus_minus_one") return Embedding::plus_minus_one;
  throw ConfigError("unknown embedding '" + s + "' (expected 01 or pm1)");
}

std::vector<double> embed(const Predicate& p, Embedding e) {
  const double lo = e == Embedding::zero_one ? 0.0 : -1.0;
  std::vector<double> out(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) out[x] = p[x] ? 1.0 : lo;
  return out;
}

LeastSquaresFit fit_least_squares(std::span<const double> target, const PredicateFamily& basis,
                                  const ApproxOptions& opts) {
  require_basis(basis, target.size(), "fit_least_squares");
  const std::size_t n = target.size();

  std::vector<std::vector<double>> cols;
  for (const auto& b : basis) cols.push_back(embed(b, opts.embedding));
  if (opts.affine) cols.emplace_back(n, 1.0);
  const auto k = static_cast<Eigen::Index>(cols.size());

  // alpha = (X^T X)^+ X^T y is the minimum-norm least-squares solution.
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& ci = cols[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < k; ++j) {
      const auto& cj = cols[static_cast<std::size_t>(j)];
      double s = 0.0;
      for (std::size_t x = 0; x < n; ++x) s += ci[x] * cj[x];
      gram(i, j) = gram(j, i) = s;
    }
    double s = 0.0;
    for (std::size_t x = 0; x < n; ++x) s += ci[x] * target[x];
    rhs(i) = s;
  }
  const Eigen::VectorXd coef = pseudoinverse(LinearOperator(gram)).entries() * rhs;

  LeastSquaresFit fit;
  fit.fitted.assign(n, 0.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& ci = cols[static_cast<std::size_t>(i)];
    for (std::size_t x = 0; x < n; ++x) fit.fitted[x] += coef(i) * ci[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    const double r = target[x] - fit.fitted[x];
    fit.residual_sse += r * r;
  }
  fit.alpha.assign(coef.data(), coef.data() + static_cast<Eigen::Index>(basis.size()));
  if (opts.affine) fit.intercept = coef(k - 1);
  return fit;
}

ApproxReport approximate(const Predicate& p, const PredicateFamily& basis,
                         const ApproxOptions& opts) {
  require_basis(basis, p.size(), "approximate");
  if (!(p.universe() == *basis.universe())) {
    throw DomainError("approximate: target and basis live in different universes");
  }
  const auto y = embed(p, opts.embedding);
  const auto fit = fit_least_squares(y, basis, opts);

  ApproxReport r;
  r.target_id = p.label();
  r.basis_ids = basis.ids();
  r.alpha = fit.alpha;
  r.intercept = fit.intercept;
  r.in_span = fit.residual_sse <= opts.span_tol;
  r.residual_sse = r.in_span ? 0.0 : fit.residual_sse;
  r.rms_score = std::sqrt(r.residual_sse) / std::sqrt(static_cast<double>(p.size()));
  r.depth_target = p.depth();
  r.depth_basis_max = basis.max_depth();
  r.affine = opts.affine;
  r.embedding = opts.embedding;
  return r;
}

double hallucination_score(const Predicate& p, const PredicateFamily& basis,
                           const ApproxOptions& opts) {
  return approximate(p, basis, opts).rms_score;
}

std::vector<std::vector<std::string>> alias_classes(const PredicateFamily& basis,
                                                    const PredicateFamily& candidates,
                                                    const ApproxOptions& opts, double tol) {
  if (basis.empty()) throw DomainError("alias_classes: empty basis");
  struct Class {
    std::vector<double> projection;
    std::vector<std::string> ids;
  };
  std::vector<Class> classes;
  for (const auto& c : candidates) {
    if (!(c.universe() == *basis.universe())) {
      throw DomainError("alias_classes: candidate '" + c.label() + "' lives in another universe");
    }
    auto proj = fit_least_squares(embed(c, opts.embedding), basis, opts).fitted;
    bool placed = false;
    for (auto& cls : classes) {
      double diff = 0.0;
      for (std::size_t x = 0; x < proj.size(); ++x) {
        diff = std::max(diff, std::abs(proj[x] - cls.projection[x]));
      }
      if (diff <= tol) {
        cls.ids.push_back(c.label());
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({std::move(proj), {c.label()}});
  }
  std::vector<std::vector<std::string>> out;
  for (auto& cls : classes) out.push_back(std::move(cls.ids));
  return out;
}

std::string approx_csv_header() {
  return "target,basis_size,residual_sse,rms_score,in_span,depth_target,depth_basis_max";
}

std::string to_csv_row(const ApproxReport& r) {
  return csv_field(r.target_id) + "," + std::to_string(r.basis_ids.size()) + "," +
         format_double(r.residual_sse) + "," + format_double(r.rms_score) + "," +
         (r.in_span ? "true" : "false") + "," + std::to_string(r.depth_target) + "," +
         std::to_string(r.depth_basis_max);
}

nlohmann::json to_json(const ApproxReport& r) {
  nlohmann::json j{{"target", r.target_id},
                   {"basis", r.basis_ids},
                   {"alpha", r.alpha},
                   {"intercept", nullptr},
                   {"residual_sse", r.residual_sse},
                   {"rms_score", r.rms_score},
                   {"in_span", r.in_span},
                   {"depth_target", r.depth_target},
                   {"depth_basis_max", r.depth_basis_max},
                   {"affine", r.affine},
                   {"embedding", to_string(r.embedding)}};
  if (r.intercept) j["intercept"] = *r.intercept;
  return j;
}

}  // namespace logicdepth
