#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "herdscope/error.hpp"
#include "herdscope/metrics.hpp"
#include "herdscope/types.hpp"

namespace herdscope {

/// Column-oriented table of named numeric and categorical fields, one row
/// per observation. Missing values are empty optionals.
class DataFrame {
 public:
  void add_numeric(std::string name, std::vector<std::optional<double>> values);
  void add_categorical(std::string name, std::vector<std::optional<std::string>> values);

  std::size_t rows() const noexcept { return rows_; }
  bool has(std::string_view name) const;
  bool is_categorical(std::string_view name) const;
  const std::vector<std::optional<double>>& numeric(std::string_view name) const;
  const std::vector<std::optional<std::string>>& categorical(std::string_view name) const;
  /// Numeric value or nullopt; throws for categorical or unknown fields.
  std::optional<double> number(std::string_view name, std::size_t row) const;
  /// Level of a field: the category, or the formatted number.
  std::optional<std::string> level(std::string_view name, std::size_t row) const;

 private:
  void check_rows(std::size_t n, std::string_view name);

  std::size_t rows_ = 0;
  bool sized_ = false;
  std::map<std::string, std::vector<std::optional<double>>, std::less<>> numeric_;
  std::map<std::string, std::vector<std::optional<std::string>>, std::less<>> categorical_;
};

/// One model term; expands to one or more design columns.
struct Term {
  enum class Kind { raw, log, log_offset, dummy, interaction };

  Kind kind = Kind::raw;
  std::string field;
  double offset = 0.0;
  /// For dummies; the most frequent level of the estimation sample when unset.
  std::optional<std::string> reference_level;
  std::vector<Term> operands;

  static Term raw(std::string field);
  static Term log(std::string field);
  static Term log_offset(std::string field, double offset);
  static Term dummy(std::string field, std::optional<std::string> reference = std::nullopt);
  static Term interaction(Term a, Term b);

  std::string label() const;
  void collect_fields(std::set<std::string>& out) const;
};

struct ModelSpec {
  std::string name;
  std::string outcome;
  std::vector<Term> terms;
  bool include_intercept = true;

  /// Throws ConfigError on duplicate terms or an interaction operand that
  /// is neither a declared term nor a raw field.
  void validate() const;
  std::set<std::string> fields() const;
};

struct DroppedRow {
  std::size_t row = 0;
  std::string reason;
};

/// How one term maps onto design columns.
struct TermEncoding {
  Term term;
  std::size_t first_column = 0;
  std::size_t n_columns = 0;
  /// Dummy terms: the non-reference levels, one column each, sorted.
  std::vector<std::string> levels;
  std::string reference;
  /// Interaction terms: encodings of the operands.
  std::vector<TermEncoding> operands;
};

struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> column_labels;
  std::vector<TermEncoding> encodings;
  bool intercept = true;
  /// Source rows used for estimation, ascending.
  std::vector<std::size_t> rows;
  std::vector<DroppedRow> dropped;
};

/// Builds X and y. Rows with a missing value in the model's fields or in
/// `sample_fields`, or with the log of a non-positive value, are dropped and
/// reported. The outcome field must be 0/1.
DesignMatrix build_design_matrix(const DataFrame& data, const ModelSpec& spec,
                                 const std::set<std::string>& sample_fields = {});

/// Evaluates the design columns for one observation given by `lookup`
/// (field -> value). Throws ComputeError for an unknown dummy level.
Eigen::RowVectorXd encode_observation(const DesignMatrix& design,
                                      const std::map<std::string, std::string, std::less<>>& levels,
                                      const std::map<std::string, double, std::less<>>& numbers);

enum class CovarianceFlavor { hc0, hc1 };

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 100;
  CovarianceFlavor flavor = CovarianceFlavor::hc1;
  /// |beta_j| on standardized inputs above which data count as separated.
  double separation_threshold = 30.0;
};

struct ConvergenceRecord {
  int iterations = 0;
  double final_step_norm = 0.0;
  std::vector<double> deviance_trace;
};

class SeparationError : public ComputeError {
 public:
  SeparationError(std::string column, const std::string& what) : ComputeError(what), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class ConvergenceError : public ComputeError {
 public:
  ConvergenceError(ConvergenceRecord record, const std::string& what)
      : ComputeError(what), record_(std::move(record)) {}
  const ConvergenceRecord& record() const noexcept { return record_; }

 private:
  ConvergenceRecord record_;
};

struct ModelFit {
  std::string name;
  std::vector<std::string> labels;
  Eigen::VectorXd beta;
  /// Heteroskedasticity-robust (sandwich) covariance.
  Eigen::MatrixXd covariance;
  /// Inverse observed information.
  Eigen::MatrixXd model_covariance;
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  std::size_t n_observations = 0;
  std::size_t n_dropped = 0;
  std::vector<std::string> dropped_collinear;
  /// Design-column index of each coefficient.
  std::vector<std::size_t> kept_columns;
  ConvergenceRecord convergence;
  CovarianceFlavor flavor = CovarianceFlavor::hc1;

  std::size_t k() const noexcept { return static_cast<std::size_t>(beta.size()); }
  /// McFadden: 1 - ll / ll_null.
  double pseudo_r2() const;
  /// -2 ll + k ln(n).
  double bic() const;
  double deviance() const { return -2.0 * log_likelihood; }
  Eigen::VectorXd standard_errors() const;
  Eigen::VectorXd z_values() const;
  Eigen::VectorXd p_values() const;
  std::optional<std::size_t> index_of(std::string_view label) const;
};

/// Logistic regression by iteratively reweighted least squares. Collinear
/// columns are dropped in column order and reported. Throws ComputeError
/// for a constant outcome or too few rows, SeparationError when a
/// standardized coefficient diverges and ConvergenceError after max_iter.
ModelFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const std::string> labels,
                      const FitOptions& options = {});
ModelFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tol = 1e-8, int max_iter = 100);
ModelFit fit_model(const DesignMatrix& design, const std::string& name, const FitOptions& options = {});

/// Bernoulli log-likelihood and its gradient at beta.
double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);

/// Sandwich covariance H^-1 (sum s_i s_i^T) H^-1, times n/(n-k) for HC1.
/// Throws ComputeError for a singular information matrix.
Eigen::MatrixXd robust_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                  CovarianceFlavor flavor = CovarianceFlavor::hc1);

/// Joins metrics with listing covariates into the frame the repayment
/// models read: repaid, coh, avg_prior_success, n_contributions, momentum,
/// opinion_diversity, amount_requested (dollars), prosper_score,
/// debt_to_income, credit_grade, description_length, homeowner, and the
/// categorical year and category. Records without a listing are skipped.
DataFrame join_for_regression(std::span<const MetricsRecord> records, const ListingTable& listings);

/// The four nested repayment models: (1) controls with year/category fixed
/// effects and homeowner, (2) + avg prior success, (3) controls + CoH,
/// (4) + both and their interaction.
std::vector<ModelSpec> repayment_model_specs();

struct SuiteResult {
  std::vector<ModelFit> fits;
  std::vector<DesignMatrix> designs;
  std::size_t input_rows = 0;
};

/// Fits the selected models (1-based numbers) on one shared estimation
/// sample: rows complete in every variable of all four models.
SuiteResult run_repayment_suite(const DataFrame& data, std::span<const int> models = std::vector<int>{1, 2, 3, 4},
                                const FitOptions& options = {});

struct CurvePoint {
  double percentile = 0.0;
  double coh = 0.0;
  double probability = 0.0;
};

/// Predicted repayment probability over a CoH grid with avg prior success
/// fixed at each empirical percentile of the estimation sample. Other
/// continuous columns sit at their sample means; dummy and 0/1 columns at
/// their modal value. Throws ConfigError for percentiles outside (0,100).
std::vector<CurvePoint> predict_repayment_curve(const ModelFit& fit, const DesignMatrix& design,
                                                const DataFrame& data, std::span<const double> coh_grid,
                                                std::span<const double> percentiles,
                                                std::string_view herding_field = "coh",
                                                std::string_view success_field = "avg_prior_success");

void write_fit_report_json(std::ostream& out, std::span<const ModelFit> fits);
void write_fit_table(std::ostream& out, std::span<const ModelFit> fits, std::span<const DesignMatrix> designs);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace herdscope
