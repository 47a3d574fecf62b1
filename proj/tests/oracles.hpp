#pragma once

// Straight-line reference implementations used as test oracles. They share
// no code with the library: plain loops, plain doubles, no clever reuse.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace oracle {

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

inline std::optional<double> lag_rho(const std::vector<double>& a, int lag) {
  std::vector<double> x(a.begin(), a.end() - lag);
  std::vector<double> y(a.begin() + lag, a.end());
  return pearson(x, y);
}

inline std::optional<double> coh_lag_mean(const std::vector<double>& a, int m) {
  if (static_cast<int>(a.size()) < m + 2) return std::nullopt;
  double sum = 0;
  int count = 0;
  for (int lag = 1; lag <= m - 1; ++lag) {
    if (auto r = lag_rho(a, lag)) {
      sum += *r;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

inline std::optional<double> coh_endpoint(const std::vector<double>& a, int m) {
  if (static_cast<int>(a.size()) < m + 2) return std::nullopt;
  return lag_rho(a, m - 1);
}

inline std::optional<double> coh_m_point(const std::vector<double>& a, int m) {
  const int n = static_cast<int>(a.size());
  if (n < m + 2) return std::nullopt;
  const int len = n - m + 1;
  std::vector<double> mu(m), sd(m);
  for (int k = 0; k < m; ++k) {
    double s = 0;
    for (int i = 0; i < len; ++i) s += a[k + i];
    mu[k] = s / len;
    double ss = 0;
    for (int i = 0; i < len; ++i) ss += (a[k + i] - mu[k]) * (a[k + i] - mu[k]);
    sd[k] = std::sqrt(ss / len);
    if (sd[k] == 0) return std::nullopt;
  }
  double total = 0;
  for (int i = 0; i < len; ++i) {
    double prod = 1;
    for (int k = 0; k < m; ++k) prod *= (a[i + k] - mu[k]) / sd[k];
    total += prod;
  }
  return total / len;
}

/// Classic lag-1 memory coefficient of an inter-event sequence.
inline std::optional<double> memory_coefficient(const std::vector<double>& a) {
  const std::size_t n = a.size();
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m1 += a[i];
    m2 += a[i + 1];
  }
  m1 /= (n - 1);
  m2 /= (n - 1);
  double num = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    num += (a[i] - m1) * (a[i + 1] - m2);
    s1 += (a[i] - m1) * (a[i] - m1);
    s2 += (a[i + 1] - m2) * (a[i + 1] - m2);
  }
  return num / std::sqrt(s1 * s2);
}

inline std::optional<double> sample_cv(const std::vector<double>& x) {
  if (x.size() < 2) return std::nullopt;
  double mean = 0;
  for (double v : x) mean += v;
  mean /= x.size();
  if (mean == 0) return std::nullopt;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (x.size() - 1)) / mean;
}

struct Event {
  std::string lender;
  std::int64_t amount;
};

/// Edge set by a double loop over ranks.
inline std::set<std::pair<std::string, std::string>> herding_edges(const std::vector<Event>& ordered, int m) {
  std::set<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (i - j > static_cast<std::size_t>(m - 1)) continue;
      if (ordered[i].amount != ordered[j].amount) continue;
      if (ordered[i].lender == ordered[j].lender) continue;
      edges.insert({ordered[i].lender, ordered[j].lender});
    }
  }
  return edges;
}

/// Dense row-major design for the logistic oracle.
struct Logit {
  std::vector<std::vector<double>> X;
  std::vector<double> y;

  double nll(const std::vector<double>& b) const {
    double s = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      double eta = 0;
      for (std::size_t j = 0; j < b.size(); ++j) eta += X[i][j] * b[j];
      s += std::log1p(std::exp(-std::abs(eta))) + std::max(eta, 0.0) - y[i] * eta;
    }
    return s;
  }

  std::vector<double> nll_grad(const std::vector<double>& b) const {
    std::vector<double> g(b.size(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
      double eta = 0;
      for (std::size_t j = 0; j < b.size(); ++j) eta += X[i][j] * b[j];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t j = 0; j < b.size(); ++j) g[j] += (p - y[i]) * X[i][j];
    }
    return g;
  }
};

/// Minimises the negative log-likelihood with GSL's BFGS2.
inline std::vector<double> gsl_bfgs(const Logit& problem, std::size_t k) {
  struct Ctx {
    const Logit* p;
    std::size_t k;
  } ctx{&problem, k};
  auto to_vec = [](const gsl_vector* v, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(v, i);
    return out;
  };
  gsl_multimin_function_fdf fdf;
  fdf.n = k;
  fdf.params = &ctx;
  fdf.f = [](const gsl_vector* v, void* params) {
    auto* c = static_cast<Ctx*>(params);
    std::vector<double> b(c->k);
    for (std::size_t i = 0; i < c->k; ++i) b[i] = gsl_vector_get(v, i);
    return c->p->nll(b);
  };
  fdf.df = [](const gsl_vector* v, void* params, gsl_vector* g) {
    auto* c = static_cast<Ctx*>(params);
    std::vector<double> b(c->k);
    for (std::size_t i = 0; i < c->k; ++i) b[i] = gsl_vector_get(v, i);
    const auto grad = c->p->nll_grad(b);
    for (std::size_t i = 0; i < c->k; ++i) gsl_vector_set(g, i, grad[i]);
  };
  fdf.fdf = [](const gsl_vector* v, void* params, double* f, gsl_vector* g) {
    auto* c = static_cast<Ctx*>(params);
    std::vector<double> b(c->k);
    for (std::size_t i = 0; i < c->k; ++i) b[i] = gsl_vector_get(v, i);
    *f = c->p->nll(b);
    const auto grad = c->p->nll_grad(b);
    for (std::size_t i = 0; i < c->k; ++i) gsl_vector_set(g, i, grad[i]);
  };

  gsl_vector* x = gsl_vector_calloc(k);
  gsl_multimin_fdfminimizer* s = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, k);
  gsl_multimin_fdfminimizer_set(s, &fdf, x, 0.1, 0.1);
  for (int iter = 0; iter < 10000; ++iter) {
    if (gsl_multimin_fdfminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_gradient(s->gradient, 1e-11) == GSL_SUCCESS) break;
  }
  auto out = to_vec(s->x, k);
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);
  return out;
}

}  // namespace oracle
