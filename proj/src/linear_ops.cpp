#include "logicdepth/linear_ops.hpp"

#include <charconv>
#include <cmath>

#include "logicdepth/errors.hpp"
#include "logicdepth/format.hpp"

namespace logicdepth {

namespace {

using Svd = Eigen::JacobiSVD<Eigen::MatrixXd>;

int rank_from(const Eigen::VectorXd& sigma, double rank_tol) {
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cutoff = rank_tol * sigma(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++r;
  }
  return r;
}

double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

}  // namespace

LinearOperator::LinearOperator(Eigen::MatrixXd entries, double rank_tol)
    : entries_(std::move(entries)), rank_tol_(rank_tol) {
  if (!entries_.allFinite()) throw DomainError("linear operator has non-finite entries");
  if (!(rank_tol_ >= 0.0)) throw DomainError("rank tolerance must be non-negative");
}

LinearOperator LinearOperator::identity(Eigen::Index n) {
  return LinearOperator(Eigen::MatrixXd::Identity(n, n));
}

LinearOperator LinearOperator::zeros(Eigen::Index rows, Eigen::Index cols) {
  return LinearOperator(Eigen::MatrixXd::Zero(rows, cols));
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& v) const {
  if (v.size() != cols()) {
    throw DomainError("vector of length " + std::to_string(v.size()) + " applied to " +
                      std::to_string(rows()) + "x" + std::to_string(cols()) + " operator");
  }
  return entries_ * v;
}

LinearOperator pseudoinverse(const LinearOperator& a) {
  if (a.rows() == 0 || a.cols() == 0) throw DomainError("pseudoinverse of an empty operator");
  const Svd svd(a.entries(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const int r = rank_from(sigma, a.rank_tol());
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(a.cols(), a.rows());
  for (int i = 0; i < r; ++i) {
    pinv += (svd.matrixV().col(i) / sigma(i)) * svd.matrixU().col(i).transpose();
  }
  return LinearOperator(std::move(pinv), a.rank_tol());
}

int rank(const LinearOperator& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const Svd svd(a.entries());
  return rank_from(svd.singularValues(), a.rank_tol());
}

NullSpaceBasis null_space_basis(const LinearOperator& a) {
  NullSpaceBasis out;
  if (a.cols() == 0) return out;
  if (a.rows() == 0) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.basis.push_back(Eigen::VectorXd::Unit(a.cols(), j));
    }
    return out;
  }
  const Svd svd(a.entries(), Eigen::ComputeFullV);
  const int r = rank_from(svd.singularValues(), a.rank_tol());
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index j = r; j < a.cols(); ++j) {
    Eigen::VectorXd col = v.col(j);
    const double big = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-12 * big) {
        if (col(i) < 0) col = -col;
        break;
      }
    }
    out.basis.push_back(std::move(col));
  }
  return out;
}

std::optional<AliasPair> find_alias_pair(const LinearOperator& a,
                                         std::span<const Eigen::VectorXd> domain, double tol) {
  std::vector<Eigen::VectorXd> images;
  images.reserve(domain.size());
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (domain[i].size() != a.cols()) {
      throw DomainError("domain vector " + std::to_string(i) + " has length " +
                        std::to_string(domain[i].size()) + ", operator has " +
                        std::to_string(a.cols()) + " columns");
    }
    images.push_back(a.entries() * domain[i]);
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    for (std::size_t j = i + 1; j < domain.size(); ++j) {
      if (domain[i] == domain[j]) continue;
      if ((images[i] - images[j]).norm() <= tol) return AliasPair{i, j};
    }
  }
  return std::nullopt;
}

std::string to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd matrix_from_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t col = 0;
    for (;;) {
      const auto comma = line.find(',');
      row.push_back(parse_double(line.substr(0, comma),
                                 "csv line " + std::to_string(line_no) + " column " +
                                     std::to_string(col + 1)));
      ++col;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, found " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("matrix record must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "rows" && key != "cols" && key != "data") {
      throw ConfigError("matrix record: unknown key '" + key + "'");
    }
  }
  if (!j.contains("rows") || !j["rows"].is_number_integer() || !j.contains("cols") ||
      !j["cols"].is_number_integer()) {
    throw ConfigError("matrix record: 'rows' and 'cols' must be integers");
  }
  const auto r = j["rows"].get<Eigen::Index>();
  const auto c = j["cols"].get<Eigen::Index>();
  if (r < 0 || c < 0) throw ConfigError("matrix record: negative dimension");
  if (!j.contains("data") || !j["data"].is_array()) {
    throw ConfigError("matrix record: 'data' must be an array");
  }
  const auto& data = j["data"];
  if (data.size() != static_cast<std::size_t>(r * c)) {
    throw ConfigError("matrix record: " + std::to_string(data.size()) + " entries for " +
                      std::to_string(r) + "x" + std::to_string(c));
  }
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) {
      const auto& v = data[static_cast<std::size_t>(i * c + k)];
      if (!v.is_number()) {
        throw ConfigError("matrix record: data[" + std::to_string(i * c + k) + "] is not a number");
      }
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

}  // namespace logicdepth
