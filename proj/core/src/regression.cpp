#include "herdscope/regression.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include <fmt/format.h>

#include "herdscope/stats.hpp"
#include "json.hpp"
#include "numfmt.hpp"

namespace herdscope {
namespace {

constexpr std::string_view kInterceptLabel = "(Intercept)";

// Field access for one observation, shared by design building and prediction.
struct ObservationView {
  std::function<std::optional<double>(std::string_view)> number;
  std::function<std::optional<std::string>(std::string_view)> level;
};

struct RowError {
  std::string reason;
};

double checked_log(double v, const std::string& field) {
  if (!(v > 0.0)) throw RowError{"log of non-positive " + field};
  return std::log(v);
}

double require_number(const ObservationView& obs, const std::string& field) {
  auto v = obs.number(field);
  if (!v) throw RowError{"missing " + field};
  return *v;
}

std::vector<double> evaluate(const TermEncoding& enc, const ObservationView& obs) {
  const Term& t = enc.term;
  switch (t.kind) {
    case Term::Kind::raw: return {require_number(obs, t.field)};
    case Term::Kind::log: return {checked_log(require_number(obs, t.field), t.field)};
    case Term::Kind::log_offset: return {checked_log(require_number(obs, t.field) + t.offset, t.field)};
    case Term::Kind::dummy: {
      auto lvl = obs.level(t.field);
      if (!lvl) throw RowError{"missing " + t.field};
      std::vector<double> cols(enc.levels.size(), 0.0);
      auto it = std::find(enc.levels.begin(), enc.levels.end(), *lvl);
      if (it != enc.levels.end()) {
        cols[static_cast<std::size_t>(it - enc.levels.begin())] = 1.0;
      } else if (*lvl != enc.reference) {
        throw ComputeError("unknown level '" + *lvl + "' for " + t.field);
      }
      return cols;
    }
    case Term::Kind::interaction: {
      std::vector<double> cols{1.0};
      for (const auto& op : enc.operands) {
        const auto v = evaluate(op, obs);
        std::vector<double> next;
        next.reserve(cols.size() * v.size());
        for (double a : cols) {
          for (double b : v) next.push_back(a * b);
        }
        cols = std::move(next);
      }
      return cols;
    }
  }
  return {};
}

std::vector<std::string> column_labels(const TermEncoding& enc) {
  const Term& t = enc.term;
  switch (t.kind) {
    case Term::Kind::raw:
    case Term::Kind::log:
    case Term::Kind::log_offset: return {t.label()};
    case Term::Kind::dummy: {
      std::vector<std::string> out;
      for (const auto& l : enc.levels) out.push_back(t.field + "[" + l + "]");
      return out;
    }
    case Term::Kind::interaction: {
      std::vector<std::string> labels{""};
      for (const auto& op : enc.operands) {
        std::vector<std::string> next;
        for (const auto& a : labels) {
          for (const auto& b : column_labels(op)) next.push_back(a.empty() ? b : a + " x " + b);
        }
        labels = std::move(next);
      }
      return labels;
    }
  }
  return {};
}

// Sets up dummy levels (from the estimation sample) for a term and its operands.
TermEncoding make_encoding(const Term& term, const DataFrame& data, const std::vector<std::size_t>& rows) {
  TermEncoding enc;
  enc.term = term;
  if (term.kind == Term::Kind::dummy) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t r : rows) {
      if (auto l = data.level(term.field, r)) ++counts[*l];
    }
    if (term.reference_level) {
      if (!counts.contains(*term.reference_level)) {
        throw ConfigError("reference level '" + *term.reference_level + "' of " + term.field +
                          " does not occur in the estimation sample");
      }
      enc.reference = *term.reference_level;
    } else {
      std::size_t best = 0;
      for (const auto& [level, n] : counts) {
        if (n > best) {
          best = n;
          enc.reference = level;
        }
      }
    }
    for (const auto& [level, _] : counts) {
      if (level != enc.reference) enc.levels.push_back(level);
    }
    enc.n_columns = enc.levels.size();
  } else if (term.kind == Term::Kind::interaction) {
    enc.n_columns = 1;
    for (const auto& op : term.operands) {
      enc.operands.push_back(make_encoding(op, data, rows));
      enc.n_columns *= enc.operands.back().n_columns;
    }
  } else {
    enc.n_columns = 1;
  }
  return enc;
}

ObservationView frame_row(const DataFrame& data, std::size_t row) {
  return {[&data, row](std::string_view f) { return data.number(f, row); },
          [&data, row](std::string_view f) { return data.level(f, row); }};
}

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// log(1 + exp(eta)) without overflow.
double softplus(double eta) { return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))); }

struct InformationSolve {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool ok = false;
};

InformationSolve factor_information(const Eigen::MatrixXd& X, const Eigen::VectorXd& mu) {
  const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
  const Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X;
  InformationSolve s;
  s.ldlt.compute(H);
  s.ok = s.ldlt.info() == Eigen::Success && s.ldlt.isPositive() && s.ldlt.rcond() > 1e-14;
  return s;
}

Eigen::VectorXd fitted(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

// Order-preserving rank reveal: a column is kept when its component
// orthogonal to the previously kept columns is non-negligible.
std::vector<std::size_t> independent_columns(const Eigen::MatrixXd& X) {
  std::vector<std::size_t> kept;
  Eigen::MatrixXd Q(X.rows(), 0);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double norm = X.col(j).norm();
    if (norm == 0.0) continue;
    Eigen::VectorXd v = X.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (Q.cols() > 0) v -= Q * (Q.transpose() * v);
    }
    const double residual = v.norm();
    if (residual <= 1e-8 * norm) continue;
    Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
    Q.col(Q.cols() - 1) = v / residual;
    kept.push_back(static_cast<std::size_t>(j));
  }
  return kept;
}

std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace

// ---------------------------------------------------------------- DataFrame

void DataFrame::check_rows(std::size_t n, std::string_view name) {
  if (sized_ && n != rows_) throw std::invalid_argument("column " + std::string(name) + " has the wrong length");
  rows_ = n;
  sized_ = true;
}

void DataFrame::add_numeric(std::string name, std::vector<std::optional<double>> values) {
  check_rows(values.size(), name);
  categorical_.erase(name);
  numeric_[std::move(name)] = std::move(values);
}

void DataFrame::add_categorical(std::string name, std::vector<std::optional<std::string>> values) {
  check_rows(values.size(), name);
  numeric_.erase(name);
  categorical_[std::move(name)] = std::move(values);
}

bool DataFrame::has(std::string_view name) const { return numeric_.contains(name) || categorical_.contains(name); }

bool DataFrame::is_categorical(std::string_view name) const { return categorical_.contains(name); }

const std::vector<std::optional<double>>& DataFrame::numeric(std::string_view name) const {
  auto it = numeric_.find(name);
  if (it == numeric_.end()) throw ConfigError("no numeric field " + std::string(name));
  return it->second;
}

const std::vector<std::optional<std::string>>& DataFrame::categorical(std::string_view name) const {
  auto it = categorical_.find(name);
  if (it == categorical_.end()) throw ConfigError("no categorical field " + std::string(name));
  return it->second;
}

std::optional<double> DataFrame::number(std::string_view name, std::size_t row) const { return numeric(name).at(row); }

std::optional<std::string> DataFrame::level(std::string_view name, std::size_t row) const {
  if (auto it = categorical_.find(name); it != categorical_.end()) return it->second.at(row);
  auto v = numeric(name).at(row);
  if (!v) return std::nullopt;
  return detail::format_real(*v);
}

// --------------------------------------------------------------------- Term

Term Term::raw(std::string field) { return Term{Kind::raw, std::move(field), 0.0, std::nullopt, {}}; }
Term Term::log(std::string field) { return Term{Kind::log, std::move(field), 0.0, std::nullopt, {}}; }
Term Term::log_offset(std::string field, double offset) {
  return Term{Kind::log_offset, std::move(field), offset, std::nullopt, {}};
}
Term Term::dummy(std::string field, std::optional<std::string> reference) {
  return Term{Kind::dummy, std::move(field), 0.0, std::move(reference), {}};
}
Term Term::interaction(Term a, Term b) {
  return Term{Kind::interaction, {}, 0.0, std::nullopt, {std::move(a), std::move(b)}};
}

std::string Term::label() const {
  switch (kind) {
    case Kind::raw: return field;
    case Kind::log: return "log(" + field + ")";
    case Kind::log_offset: return "log(" + field + "+" + detail::format_real(offset) + ")";
    case Kind::dummy: return "dummy(" + field + ")";
    case Kind::interaction: {
      std::string out;
      for (const auto& op : operands) out += (out.empty() ? "" : " x ") + op.label();
      return out;
    }
  }
  return field;
}

void Term::collect_fields(std::set<std::string>& out) const {
  if (kind == Kind::interaction) {
    for (const auto& op : operands) op.collect_fields(out);
  } else {
    out.insert(field);
  }
}

void ModelSpec::validate() const {
  if (outcome.empty()) throw ConfigError("model " + name + ": no outcome field");
  std::set<std::string> labels;
  for (const auto& t : terms) {
    if (!labels.insert(t.label()).second) throw ConfigError("model " + name + ": duplicate term " + t.label());
  }
  for (const auto& t : terms) {
    if (t.kind != Term::Kind::interaction) continue;
    if (t.operands.size() < 2) throw ConfigError("model " + name + ": interaction needs two operands");
    for (const auto& op : t.operands) {
      if (op.kind != Term::Kind::raw && !labels.contains(op.label())) {
        throw ConfigError("model " + name + ": interaction operand " + op.label() + " is not a declared term");
      }
    }
  }
}

std::set<std::string> ModelSpec::fields() const {
  std::set<std::string> out;
  for (const auto& t : terms) t.collect_fields(out);
  return out;
}

// ------------------------------------------------------------ design matrix

DesignMatrix build_design_matrix(const DataFrame& data, const ModelSpec& spec,
                                 const std::set<std::string>& sample_fields) {
  spec.validate();
  std::set<std::string> fields = spec.fields();
  fields.insert(sample_fields.begin(), sample_fields.end());
  fields.insert(spec.outcome);
  for (const auto& f : fields) {
    if (!data.has(f)) throw ConfigError("model " + spec.name + ": unknown field " + f);
  }
  if (data.is_categorical(spec.outcome)) throw ConfigError("outcome " + spec.outcome + " must be numeric 0/1");

  DesignMatrix d;
  d.intercept = spec.include_intercept;

  // Listwise deletion: missing values first, then log domains.
  std::vector<TermEncoding> probe;
  for (const auto& t : spec.terms) {
    TermEncoding e;
    e.term = t;
    probe.push_back(std::move(e));
  }
  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::string missing;
    for (const auto& f : fields) {
      const bool present = data.is_categorical(f) ? data.categorical(f)[r].has_value() : data.numeric(f)[r].has_value();
      if (!present) {
        missing = f;
        break;
      }
    }
    if (!missing.empty()) {
      d.dropped.push_back({r, "missing " + missing});
      continue;
    }
    candidates.push_back(r);
  }

  // Log domains are checked with levels not yet known, so evaluate only the
  // numeric parts of each term.
  std::function<void(const Term&, const ObservationView&)> check_domain = [&](const Term& t, const ObservationView& obs) {
    if (t.kind == Term::Kind::log) checked_log(require_number(obs, t.field), t.field);
    if (t.kind == Term::Kind::log_offset) checked_log(require_number(obs, t.field) + t.offset, t.field);
    if (t.kind == Term::Kind::interaction) {
      for (const auto& op : t.operands) check_domain(op, obs);
    }
  };
  for (std::size_t r : candidates) {
    try {
      const auto obs = frame_row(data, r);
      for (const auto& t : spec.terms) check_domain(t, obs);
      const double y = *data.number(spec.outcome, r);
      if (y != 0.0 && y != 1.0) {
        throw ValidationError("row " + std::to_string(r) + ": outcome " + spec.outcome + " must be 0 or 1");
      }
      d.rows.push_back(r);
    } catch (const RowError& e) {
      d.dropped.push_back({r, e.reason});
    }
  }
  std::sort(d.dropped.begin(), d.dropped.end(), [](const DroppedRow& a, const DroppedRow& b) { return a.row < b.row; });

  std::size_t col = d.intercept ? 1 : 0;
  if (d.intercept) d.column_labels.emplace_back(kInterceptLabel);
  for (const auto& t : spec.terms) {
    auto enc = make_encoding(t, data, d.rows);
    enc.first_column = col;
    col += enc.n_columns;
    for (auto& l : column_labels(enc)) d.column_labels.push_back(std::move(l));
    d.encodings.push_back(std::move(enc));
  }

  d.X.resize(static_cast<Eigen::Index>(d.rows.size()), static_cast<Eigen::Index>(col));
  d.y.resize(static_cast<Eigen::Index>(d.rows.size()));
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto r = d.rows[i];
    const auto obs = frame_row(data, r);
    const auto row = static_cast<Eigen::Index>(i);
    if (d.intercept) d.X(row, 0) = 1.0;
    for (const auto& enc : d.encodings) {
      const auto vals = evaluate(enc, obs);
      for (std::size_t k = 0; k < vals.size(); ++k) d.X(row, static_cast<Eigen::Index>(enc.first_column + k)) = vals[k];
    }
    d.y(row) = *data.number(spec.outcome, r);
  }
  return d;
}

Eigen::RowVectorXd encode_observation(const DesignMatrix& design,
                                      const std::map<std::string, std::string, std::less<>>& levels,
                                      const std::map<std::string, double, std::less<>>& numbers) {
  ObservationView obs{[&](std::string_view f) -> std::optional<double> {
                        auto it = numbers.find(f);
                        if (it == numbers.end()) return std::nullopt;
                        return it->second;
                      },
                      [&](std::string_view f) -> std::optional<std::string> {
                        if (auto it = levels.find(f); it != levels.end()) return it->second;
                        if (auto it = numbers.find(f); it != numbers.end()) return detail::format_real(it->second);
                        return std::nullopt;
                      }};
  Eigen::RowVectorXd x(design.column_labels.size());
  if (design.intercept) x(0) = 1.0;
  for (const auto& enc : design.encodings) {
    std::vector<double> vals;
    try {
      vals = evaluate(enc, obs);
    } catch (const RowError& e) {
      throw ComputeError("cannot encode observation: " + e.reason);
    }
    for (std::size_t k = 0; k < vals.size(); ++k) x(static_cast<Eigen::Index>(enc.first_column + k)) = vals[k];
  }
  return x;
}

// ------------------------------------------------------------------ fitting

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - softplus(eta(i));
  return ll;
}

Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta) {
  return X.transpose() * (y - fitted(X, beta));
}

Eigen::MatrixXd robust_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                  CovarianceFlavor flavor) {
  const Eigen::VectorXd mu = fitted(X, beta);
  const auto info = factor_information(X, mu);
  if (!info.ok) throw ComputeError("singular information matrix");
  const auto k = X.cols();
  const auto n = X.rows();
  const Eigen::MatrixXd bread = info.ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd scores = X.array().colwise() * (y - mu).array();
  const Eigen::MatrixXd meat = scores.transpose() * scores;
  Eigen::MatrixXd cov = bread * meat * bread;
  if (flavor == CovarianceFlavor::hc1) {
    if (n <= k) throw ComputeError("HC1 needs more observations than coefficients");
    cov *= static_cast<double>(n) / static_cast<double>(n - k);
  }
  return (cov + cov.transpose()) / 2.0;
}

ModelFit fit_logistic(const Eigen::MatrixXd& X_full, const Eigen::VectorXd& y, std::span<const std::string> labels,
                      const FitOptions& options) {
  if (static_cast<Eigen::Index>(labels.size()) != X_full.cols()) throw std::invalid_argument("label count mismatch");
  if (X_full.rows() != y.size()) throw std::invalid_argument("X and y row counts differ");
  const auto n = X_full.rows();
  if (n == 0) throw ComputeError("no observations to fit");
  const double ones = y.sum();
  if (ones == 0.0 || ones == static_cast<double>(n)) {
    throw SeparationError(std::string(kInterceptLabel), "degenerate outcome: every observation has outcome " +
                                                            std::string(ones == 0.0 ? "0" : "1"));
  }

  ModelFit fit;
  fit.flavor = options.flavor;
  fit.kept_columns = independent_columns(X_full);
  for (Eigen::Index j = 0, kept = 0; j < X_full.cols(); ++j) {
    if (kept < static_cast<Eigen::Index>(fit.kept_columns.size()) &&
        fit.kept_columns[static_cast<std::size_t>(kept)] == static_cast<std::size_t>(j)) {
      ++kept;
      fit.labels.push_back(labels[static_cast<std::size_t>(j)]);
    } else {
      fit.dropped_collinear.push_back(labels[static_cast<std::size_t>(j)]);
    }
  }
  const auto k = static_cast<Eigen::Index>(fit.kept_columns.size());
  if (k == 0) throw ComputeError("design matrix has no usable columns");
  if (n <= k) throw ComputeError("need more observations than coefficients");
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index j = 0; j < k; ++j) X.col(j) = X_full.col(static_cast<Eigen::Index>(fit.kept_columns[static_cast<std::size_t>(j)]));

  // Column scales for the separation check; constant columns act as intercepts.
  Eigen::VectorXd scale(k);
  std::vector<bool> constant(static_cast<std::size_t>(k));
  const Eigen::RowVectorXd col_mean = X.colwise().mean();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double sd = std::sqrt((X.col(j).array() - col_mean(j)).square().sum() / static_cast<double>(n));
    constant[static_cast<std::size_t>(j)] = sd == 0.0;
    scale(j) = sd;
  }
  auto check_separation = [&](const Eigen::VectorXd& beta) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!constant[static_cast<std::size_t>(j)] && std::abs(beta(j) * scale(j)) > options.separation_threshold) {
        throw SeparationError(fit.labels[static_cast<std::size_t>(j)],
                              "quasi-separation detected on column " + fit.labels[static_cast<std::size_t>(j)]);
      }
    }
    const double centre = col_mean.dot(beta);
    if (std::abs(centre) > options.separation_threshold) {
      throw SeparationError(std::string(kInterceptLabel), "quasi-separation detected: fitted outcome is constant");
    }
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  const double ybar = ones / static_cast<double>(n);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (constant[static_cast<std::size_t>(j)] && col_mean(j) != 0.0) {
      beta(j) = std::log(ybar / (1.0 - ybar)) / col_mean(j);
      break;
    }
  }

  double deviance = -2.0 * log_likelihood(X, y, beta);
  fit.convergence.deviance_trace.push_back(deviance);
  bool converged = false;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd mu = fitted(X, beta);
    const auto info = factor_information(X, mu);
    if (!info.ok) {
      check_separation(beta);
      throw ComputeError("singular information matrix during fitting");
    }
    Eigen::VectorXd step = info.ldlt.solve(X.transpose() * (y - mu));
    Eigen::VectorXd next = beta + step;
    double next_dev = -2.0 * log_likelihood(X, y, next);
    for (int halvings = 0; halvings < 30 && !(next_dev <= deviance + 1e-12 * std::abs(deviance)); ++halvings) {
      step /= 2.0;
      next = beta + step;
      next_dev = -2.0 * log_likelihood(X, y, next);
    }
    const double change = std::abs(next_dev - deviance);
    beta = next;
    deviance = next_dev;
    fit.convergence.iterations = iter;
    fit.convergence.final_step_norm = step.cwiseAbs().maxCoeff();
    fit.convergence.deviance_trace.push_back(deviance);
    check_separation(beta);
    if (fit.convergence.final_step_norm < options.tol || change < options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError(fit.convergence,
                           "no convergence after " + std::to_string(options.max_iter) + " iterations");
  }

  fit.beta = beta;
  const auto info = factor_information(X, fitted(X, beta));
  if (!info.ok) throw ComputeError("singular information matrix at the optimum");
  fit.model_covariance = info.ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  fit.covariance = robust_covariance(X, y, beta, options.flavor);
  fit.log_likelihood = log_likelihood(X, y, beta);
  fit.null_log_likelihood = ones * std::log(ybar) + (static_cast<double>(n) - ones) * std::log(1.0 - ybar);
  fit.n_observations = static_cast<std::size_t>(n);
  return fit;
}

ModelFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol, int max_iter) {
  std::vector<std::string> labels;
  for (Eigen::Index j = 0; j < X.cols(); ++j) labels.push_back("x" + std::to_string(j));
  FitOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return fit_logistic(X, y, labels, options);
}

ModelFit fit_model(const DesignMatrix& design, const std::string& name, const FitOptions& options) {
  ModelFit fit = fit_logistic(design.X, design.y, design.column_labels, options);
  fit.name = name;
  fit.n_dropped = design.dropped.size();
  return fit;
}

double ModelFit::pseudo_r2() const { return 1.0 - log_likelihood / null_log_likelihood; }

double ModelFit::bic() const {
  return -2.0 * log_likelihood + static_cast<double>(k()) * std::log(static_cast<double>(n_observations));
}

Eigen::VectorXd ModelFit::standard_errors() const { return covariance.diagonal().cwiseMax(0.0).cwiseSqrt(); }

Eigen::VectorXd ModelFit::z_values() const { return beta.cwiseQuotient(standard_errors()); }

Eigen::VectorXd ModelFit::p_values() const {
  return z_values().unaryExpr([](double z) { return normal_two_sided_p(z); });
}

std::optional<std::size_t> ModelFit::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

// ------------------------------------------------------------ model suite

DataFrame join_for_regression(std::span<const MetricsRecord> records, const ListingTable& listings) {
  std::vector<std::optional<double>> repaid, coh, success, n_contrib, momentum, diversity, amount, score, dti, grade,
      words, homeowner;
  std::vector<std::optional<std::string>> year, category;
  for (const auto& r : records) {
    const Listing* l = listings.find(r.listing_id);
    if (l == nullptr) continue;
    repaid.emplace_back(l->repaid() ? 1.0 : 0.0);
    coh.push_back(r.coh);
    success.push_back(r.avg_prior_success);
    n_contrib.emplace_back(static_cast<double>(r.n_contributions));
    momentum.push_back(r.momentum);
    diversity.push_back(r.opinion_diversity);
    amount.emplace_back(static_cast<double>(l->amount_requested_cents) / 100.0);
    score.emplace_back(static_cast<double>(l->prosper_score));
    dti.emplace_back(l->debt_to_income);
    grade.emplace_back(static_cast<double>(l->credit_grade));
    words.emplace_back(l->description_length_hundreds());
    homeowner.emplace_back(l->homeowner ? 1.0 : 0.0);
    year.emplace_back(std::to_string(l->year));
    category.emplace_back(std::string(to_string(l->category)));
  }
  DataFrame df;
  df.add_numeric("repaid", std::move(repaid));
  df.add_numeric("coh", std::move(coh));
  df.add_numeric("avg_prior_success", std::move(success));
  df.add_numeric("n_contributions", std::move(n_contrib));
  df.add_numeric("momentum", std::move(momentum));
  df.add_numeric("opinion_diversity", std::move(diversity));
  df.add_numeric("amount_requested", std::move(amount));
  df.add_numeric("prosper_score", std::move(score));
  df.add_numeric("debt_to_income", std::move(dti));
  df.add_numeric("credit_grade", std::move(grade));
  df.add_numeric("description_length", std::move(words));
  df.add_numeric("homeowner", std::move(homeowner));
  df.add_categorical("year", std::move(year));
  df.add_categorical("category", std::move(category));
  return df;
}

std::vector<ModelSpec> repayment_model_specs() {
  const std::vector<Term> controls{
      Term::log("n_contributions"),  Term::raw("momentum"),       Term::raw("opinion_diversity"),
      Term::log("amount_requested"), Term::raw("prosper_score"),  Term::log_offset("debt_to_income", 0.01),
      Term::raw("credit_grade"),     Term::raw("description_length")};
  const std::vector<Term> fixed{Term::dummy("year"), Term::dummy("category"), Term::raw("homeowner")};

  auto make = [&](std::string name, std::vector<Term> key_terms) {
    ModelSpec spec{std::move(name), "repaid", controls, true};
    spec.terms.insert(spec.terms.end(), key_terms.begin(), key_terms.end());
    spec.terms.insert(spec.terms.end(), fixed.begin(), fixed.end());
    return spec;
  };
  return {make("model_1", {}), make("model_2", {Term::raw("avg_prior_success")}),
          make("model_3", {Term::raw("coh")}),
          make("model_4", {Term::raw("avg_prior_success"), Term::raw("coh"),
                           Term::interaction(Term::raw("avg_prior_success"), Term::raw("coh"))})};
}

SuiteResult run_repayment_suite(const DataFrame& data, std::span<const int> models, const FitOptions& options) {
  const auto specs = repayment_model_specs();
  for (int m : models) {
    if (m < 1 || m > static_cast<int>(specs.size())) {
      throw ConfigError("model number " + std::to_string(m) + " is outside 1-" + std::to_string(specs.size()));
    }
  }
  std::set<std::string> shared;
  for (const auto& s : specs) {
    const auto f = s.fields();
    shared.insert(f.begin(), f.end());
  }
  SuiteResult out;
  out.input_rows = data.rows();
  for (int m : models) {
    const auto& spec = specs[static_cast<std::size_t>(m - 1)];
    out.designs.push_back(build_design_matrix(data, spec, shared));
    out.fits.push_back(fit_model(out.designs.back(), spec.name, options));
  }
  return out;
}

// -------------------------------------------------------------- prediction

std::vector<CurvePoint> predict_repayment_curve(const ModelFit& fit, const DesignMatrix& design, const DataFrame& data,
                                                std::span<const double> coh_grid, std::span<const double> percentiles,
                                                std::string_view herding_field, std::string_view success_field) {
  for (double p : percentiles) {
    if (!(p > 0.0 && p < 100.0)) throw ConfigError("percentile " + detail::format_real(p) + " is outside (0,100)");
  }
  const auto n = design.X.rows();
  if (n == 0) throw ComputeError("empty estimation sample");

  // Baseline row: column means, with 0/1 columns at their mode.
  Eigen::RowVectorXd base = design.X.colwise().mean();
  for (Eigen::Index j = 0; j < design.X.cols(); ++j) {
    const auto col = design.X.col(j).array();
    if (((col == 0.0) || (col == 1.0)).all()) base(j) = base(j) > 0.5 ? 1.0 : 0.0;
  }

  // Sample means of raw numeric fields and modal levels of categorical ones,
  // for evaluating terms that mix focal and other fields.
  std::map<std::string, double, std::less<>> numbers;
  std::map<std::string, std::string, std::less<>> levels;
  std::set<std::string> fields;
  for (const auto& enc : design.encodings) enc.term.collect_fields(fields);
  for (const auto& f : fields) {
    if (data.is_categorical(f)) {
      std::map<std::string, std::size_t> counts;
      for (auto r : design.rows) ++counts[*data.level(f, r)];
      std::size_t best = 0;
      for (const auto& [lvl, c] : counts) {
        if (c > best) {
          best = c;
          levels[f] = lvl;
        }
      }
    } else {
      double s = 0.0;
      for (auto r : design.rows) s += *data.number(f, r);
      numbers[f] = s / static_cast<double>(design.rows.size());
    }
  }
  for (const auto& enc : design.encodings) {
    if (enc.term.kind != Term::Kind::dummy) continue;
    for (std::size_t k = 0; k < enc.levels.size(); ++k) {
      base(static_cast<Eigen::Index>(enc.first_column + k)) = enc.levels[k] == levels[enc.term.field] ? 1.0 : 0.0;
    }
  }

  std::vector<double> success_values;
  for (auto r : design.rows) success_values.push_back(*data.number(success_field, r));

  std::vector<CurvePoint> out;
  for (double pct : percentiles) {
    const double success = percentile(success_values, pct);
    for (double coh : coh_grid) {
      auto nums = numbers;
      nums[std::string(herding_field)] = coh;
      nums[std::string(success_field)] = success;
      const Eigen::RowVectorXd focal = encode_observation(design, levels, nums);
      Eigen::RowVectorXd x = base;
      for (const auto& enc : design.encodings) {
        std::set<std::string> tf;
        enc.term.collect_fields(tf);
        if (!tf.contains(std::string(herding_field)) && !tf.contains(std::string(success_field))) continue;
        for (std::size_t c = 0; c < enc.n_columns; ++c) {
          const auto j = static_cast<Eigen::Index>(enc.first_column + c);
          x(j) = focal(j);
        }
      }
      double eta = 0.0;
      for (std::size_t j = 0; j < fit.kept_columns.size(); ++j) {
        eta += fit.beta(static_cast<Eigen::Index>(j)) * x(static_cast<Eigen::Index>(fit.kept_columns[j]));
      }
      out.push_back({pct, coh, sigmoid(eta)});
    }
  }
  return out;
}

// ----------------------------------------------------------------- reports

void write_fit_report_json(std::ostream& out, std::span<const ModelFit> fits) {
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    const auto se = f.standard_errors();
    const auto z = f.z_values();
    const auto p = f.p_values();
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      terms.push_back({{"label", f.labels[i]}, {"beta", f.beta(j)}, {"se", se(j)}, {"z", z(j)}, {"p", p(j)}});
    }
    nlohmann::ordered_json m;
    m["name"] = f.name;
    m["terms"] = std::move(terms);
    m["pseudo_r2"] = f.pseudo_r2();
    m["bic"] = f.bic();
    m["ll"] = f.log_likelihood;
    m["n"] = f.n_observations;
    m["dropped"] = f.n_dropped;
    m["dropped_collinear"] = f.dropped_collinear;
    models.push_back(std::move(m));
  }
  nlohmann::ordered_json root;
  root["models"] = std::move(models);
  out << root.dump(2) << '\n';
}

void write_fit_table(std::ostream& out, std::span<const ModelFit> fits, std::span<const DesignMatrix> designs) {
  // Row order: first appearance across models, dummies summarised as fixed effects.
  std::vector<std::string> rows;
  std::set<std::string> dummy_columns;
  std::vector<std::string> fixed_effects;
  for (const auto& d : designs) {
    for (const auto& enc : d.encodings) {
      if (enc.term.kind != Term::Kind::dummy) continue;
      for (const auto& l : enc.levels) dummy_columns.insert(enc.term.field + "[" + l + "]");
      if (std::find(fixed_effects.begin(), fixed_effects.end(), enc.term.field) == fixed_effects.end()) {
        fixed_effects.push_back(enc.term.field);
      }
    }
  }
  for (const auto& f : fits) {
    for (const auto& l : f.labels) {
      if (l == kInterceptLabel || dummy_columns.contains(l)) continue;
      if (std::find(rows.begin(), rows.end(), l) == rows.end()) rows.push_back(l);
    }
  }
  std::size_t label_width = 22;
  for (const auto& r : rows) label_width = std::max(label_width, r.size() + 2);
  constexpr int kCol = 14;

  auto line = [&](char c) { out << std::string(label_width + kCol * fits.size(), c) << '\n'; };
  line('=');
  out << fmt::format("{:<{}}", "Dependent variable: repaid (1) / defaulted (0)", label_width) << '\n';
  out << fmt::format("{:<{}}", "", label_width);
  for (const auto& f : fits) out << fmt::format("{:>{}}", f.name, kCol);
  out << '\n';
  line('-');
  for (const auto& r : rows) {
    std::string coef = fmt::format("{:<{}}", r, label_width);
    std::string ses = fmt::format("{:<{}}", "", label_width);
    for (const auto& f : fits) {
      if (auto i = f.index_of(r)) {
        const auto j = static_cast<Eigen::Index>(*i);
        coef += fmt::format("{:>{}}", fmt::format("{:.3f}{}", f.beta(j), stars(f.p_values()(j))), kCol);
        ses += fmt::format("{:>{}}", fmt::format("({:.3f})", f.standard_errors()(j)), kCol);
      } else {
        coef += std::string(kCol, ' ');
        ses += std::string(kCol, ' ');
      }
    }
    out << coef << '\n' << ses << '\n';
  }
  line('-');
  out << "Fixed effects\n";
  for (const auto& fe : fixed_effects) {
    out << fmt::format("{:<{}}", "  " + fe, label_width);
    for (std::size_t i = 0; i < fits.size(); ++i) {
      bool present = false;
      if (i < designs.size()) {
        for (const auto& enc : designs[i].encodings) present |= enc.term.kind == Term::Kind::dummy && enc.term.field == fe;
      }
      out << fmt::format("{:>{}}", present ? "Yes" : "No", kCol);
    }
    out << '\n';
  }
  line('-');
  out << fmt::format("{:<{}}", "Observations", label_width);
  for (const auto& f : fits) out << fmt::format("{:>{}}", f.n_observations, kCol);
  out << '\n' << fmt::format("{:<{}}", "Pseudo R2", label_width);
  for (const auto& f : fits) out << fmt::format("{:>{}.3f}", f.pseudo_r2(), kCol);
  out << '\n' << fmt::format("{:<{}}", "BIC", label_width);
  for (const auto& f : fits) out << fmt::format("{:>{}.1f}", f.bic(), kCol);
  out << '\n';
  line('=');
  out << "Heteroskedasticity-robust standard errors in parentheses. * p<0.05, ** p<0.01, *** p<0.001\n";
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "percentile,coh,probability\n";
  for (const auto& c : curve) {
    out << detail::format_real(c.percentile) << ',' << detail::format_real(c.coh) << ','
        << detail::format_real(c.probability) << '\n';
  }
}

}  // namespace herdscope
