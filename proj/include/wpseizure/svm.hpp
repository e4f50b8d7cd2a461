// Copyright 2026 The wpseizure Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary soft-margin SVM with an RBF kernel, trained by sequential minimal
// optimization.
//
// The solver works on the dual in minimization form
//   min_a  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C_i,
// with Q_ij = y_i y_j K(x_i, x_j). Each iteration picks the maximal violating
// pair using second-order gain (Fan, Chen & Lin, JMLR 2005) and stops when
// the pair's violation drops below `tol`.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <list>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wpseizure/common.hpp"
#include "wpseizure/csv.hpp"
#include "wpseizure/features.hpp"

namespace wpseizure {

struct SvmParams {
  double C = 10.0;
  /// nullopt selects the scale rule gamma = 1 / (d * var(X)).
  std::optional<double> gamma;
  double tol = 1e-3;
  /// Iteration cap, in units of the training-set size.
  long max_passes = 1000;
  /// Z-score features with statistics of the training set.
  bool normalize = true;
  /// Scale C for the positive class by n_neg / n_pos.
  bool class_weight = false;
  std::size_t cache_megabytes = 512;
};

inline void check_params(const SvmParams& p) {
  if (!(p.C > 0.0) || !std::isfinite(p.C)) throw InvalidArgument("C must be positive");
  if (p.gamma && (!(*p.gamma > 0.0) || !std::isfinite(*p.gamma))) {
    throw InvalidArgument("gamma must be positive");
  }
  if (!(p.tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (p.max_passes <= 0) throw InvalidArgument("max_passes must be positive");
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) {
    throw InvalidArgument("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

/// 1 / (d * var(X)) over all entries of the row-major matrix `x`.
inline double scale_gamma(std::span<const double> x, std::size_t dimension) {
  if (x.empty() || dimension == 0) throw InvalidArgument("scale_gamma: empty data");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  return var > 0.0 ? 1.0 / (static_cast<double>(dimension) * var) : 1.0;
}

struct SvmModel {
  /// Support vectors in normalized feature space, row-major.
  std::vector<std::vector<double>> support_vectors;
  /// alpha_i * y_i for each support vector.
  std::vector<double> coef;
  double bias = 0.0;
  double gamma = 1.0;
  Normalizer normalizer;

  std::size_t dimension() const { return normalizer.dimension(); }
};

inline double decision_value(const SvmModel& model, std::span<const double> x) {
  const std::vector<double> z = model.normalizer.apply(x);
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.coef[i] * rbf_kernel(model.support_vectors[i], z, model.gamma);
  }
  return f;
}

inline double decision_value(const SvmModel& model, const FeatureVector& x) {
  return decision_value(model, std::span<const double>(x.values));
}

/// Ties at exactly zero go to the negative class.
inline Label predict(const SvmModel& model, const FeatureVector& x) {
  return decision_value(model, x) > 0.0 ? Label::seizure : Label::non_seizure;
}

namespace detail {

// Lazily computed kernel rows with LRU eviction.
class KernelRows {
 public:
  KernelRows(std::span<const double> x, std::size_t n, std::size_t d, double gamma,
             std::size_t budget_bytes)
      : x_(x), n_(n), d_(d), gamma_(gamma), rows_(n) {
    const std::size_t per_row = std::max<std::size_t>(1, n * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / per_row);
  }

  double at(std::size_t i, std::size_t j) const {
    return rbf_kernel(x_.subspan(i * d_, d_), x_.subspan(j * d_, d_), gamma_);
  }

  const std::vector<double>& row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      std::vector<double>().swap(rows_[victim]);
    }
    auto& r = rows_[i];
    r.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) r[j] = at(i, j);
    lru_.push_front(i);
    if (where_.size() < n_) where_.resize(n_);
    where_[i] = lru_.begin();
    return r;
  }

 private:
  std::span<const double> x_;
  std::size_t n_;
  std::size_t d_;
  double gamma_;
  std::size_t capacity_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
};

}  // namespace detail

struct DualSolution {
  std::vector<double> alpha;
  /// Offset b of f(x) = sum_i alpha_i y_i K(x_i, x) + b.
  double bias = 0.0;
  /// Dual objective in maximization form, e'a - 1/2 a'Qa.
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// SMO on a precomputed problem. `x` is row-major n x d, `y` holds +-1 and
/// `upper` the per-sample box bound.
inline DualSolution solve_dual(std::span<const double> x, std::size_t d, std::span<const double> y,
                               std::span<const double> upper, double gamma, double tol,
                               std::size_t max_iterations,
                               std::size_t cache_bytes = std::size_t{512} << 20) {
  const std::size_t n = y.size();
  if (x.size() != n * d || upper.size() != n) throw InvalidArgument("solve_dual: bad sizes");
  constexpr double tau = 1e-12;

  detail::KernelRows kernel(x, n, d, gamma, cache_bytes);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q a - e at a = 0

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < upper[t]) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] < 0 && alpha[t] < upper[t]) || (y[t] > 0 && alpha[t] > 0);
  };

  DualSolution sol;
  std::size_t iter = 0;
  for (; iter < max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && (i == n || -y[t] * grad[t] > gmax)) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    if (i == n) {
      sol.converged = true;
      break;
    }
    // Copied: fetching row j may evict row i.
    const std::vector<double> ki = kernel.row(i);
    double gmin = std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0) {
        double a = 2.0 - 2.0 * ki[t];  // K_ii = K_tt = 1 for RBF
        if (a <= 0) a = tau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (gmax - gmin < tol || j == n) {
      sol.converged = true;
      break;
    }

    const std::vector<double>& kj = kernel.row(j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double ci = upper[i];
    const double cj = upper[j];
    const double kij = ki[j];

    if (y[i] != y[j]) {
      double quad = 2.0 + 2.0 * kij;
      if (quad <= 0) quad = tau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = ci - diff; }
      } else {
        if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = cj + diff; }
      }
    } else {
      double quad = 2.0 - 2.0 * kij;
      if (quad <= 0) quad = tau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = sum - ci; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > cj) {
        if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = sum - cj; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * ki[t] * dai + y[j] * kj[t] * daj);
    }
  }
  sol.iterations = iter;

  // Offset from the free variables, or the midpoint of the feasible interval.
  double sum_free = 0.0;
  std::size_t n_free = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= upper[t]) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  sol.bias = -rho;

  // a'Qa = a'(G + e)
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] - 0.5 * alpha[t] * (grad[t] + 1.0);
  sol.objective = obj;
  sol.alpha = std::move(alpha);
  return sol;
}

struct TrainResult {
  SvmModel model;
  /// Dual variables in the caller's sample order.
  std::vector<double> alpha;
  /// Box bound used for each sample.
  std::vector<double> upper;
  /// Training points in normalized space, caller's order, row-major.
  std::vector<double> normalized;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Trains on labeled vectors. The problem is put in a canonical sample order
/// before solving, so permuting `data` does not change the model. `seed` is
/// accepted for interface stability; the solver itself is deterministic.
inline TrainResult train_detailed(std::span<const FeatureVector> data, const SvmParams& params,
                                  std::uint64_t seed = 0) {
  (void)seed;
  check_params(params);
  if (data.empty()) throw InvalidArgument("training set is empty");
  const std::size_t n = data.size();
  const std::size_t d = data.front().values.size();
  if (d == 0) throw InvalidArgument("feature vectors are empty");
  std::size_t n_pos = 0;
  for (const auto& fv : data) {
    if (fv.values.size() != d) throw InvalidArgument("feature vectors differ in dimension");
    if (!fv.label) throw InvalidArgument("training vector without a label");
    for (double v : fv.values) {
      if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
    }
    n_pos += *fv.label == Label::seizure ? 1 : 0;
  }
  if (n_pos == 0 || n_pos == n) throw InvalidArgument("training set holds a single class");

  TrainResult result;
  SvmModel& model = result.model;
  model.normalizer = params.normalize ? normalizer_fit(data) : identity_normalizer(d);

  result.normalized.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = model.normalizer.apply(std::span<const double>(data[i].values));
    std::copy(z.begin(), z.end(), result.normalized.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  model.gamma = params.gamma ? *params.gamma : scale_gamma(result.normalized, d);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (*data[a].label != *data[b].label) return *data[a].label < *data[b].label;
    return std::lexicographical_compare(data[a].values.begin(), data[a].values.end(),
                                        data[b].values.begin(), data[b].values.end());
  });

  const double n_neg = static_cast<double>(n - n_pos);
  const double c_pos = params.class_weight ? params.C * n_neg / static_cast<double>(n_pos)
                                           : params.C;
  std::vector<double> xs(n * d);
  std::vector<double> ys(n);
  std::vector<double> cs(n);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    std::copy_n(result.normalized.begin() + static_cast<std::ptrdiff_t>(i * d), d,
                xs.begin() + static_cast<std::ptrdiff_t>(p * d));
    ys[p] = sign_of(*data[i].label);
    cs[p] = ys[p] > 0 ? c_pos : params.C;
  }

  const std::size_t max_iter =
      static_cast<std::size_t>(params.max_passes) * std::max<std::size_t>(n, 100);
  DualSolution sol = solve_dual(xs, d, ys, cs, model.gamma, params.tol, max_iter,
                                params.cache_megabytes << 20);

  result.alpha.assign(n, 0.0);
  result.upper.assign(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t i = order[p];
    result.alpha[i] = sol.alpha[p];
    result.upper[i] = cs[p];
    if (sol.alpha[p] > 0.0) {
      model.support_vectors.emplace_back(xs.begin() + static_cast<std::ptrdiff_t>(p * d),
                                         xs.begin() + static_cast<std::ptrdiff_t>((p + 1) * d));
      model.coef.push_back(sol.alpha[p] * ys[p]);
    }
  }
  model.bias = sol.bias;
  result.objective = sol.objective;
  result.iterations = sol.iterations;
  result.converged = sol.converged;
  return result;
}

inline SvmModel train(std::span<const FeatureVector> data, const SvmParams& params,
                      std::uint64_t seed = 0) {
  return train_detailed(data, params, seed).model;
}

// ---------------------------------------------------------------------------
// Text serialization of the SVM part of a model file.

inline void write_svm(std::ostream& os, const SvmModel& m) {
  const std::size_t d = m.dimension();
  os << "gamma " << csv::exact(m.gamma) << '\n';
  os << "bias " << csv::exact(m.bias) << '\n';
  os << "dimension " << d << '\n';
  os << "normalizer_mean";
  for (double v : m.normalizer.mean) os << ' ' << csv::exact(v);
  os << "\nnormalizer_std";
  for (double v : m.normalizer.stdev) os << ' ' << csv::exact(v);
  os << "\nsupport_vectors " << m.support_vectors.size() << '\n';
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
    os << csv::exact(m.coef[i]);
    for (double v : m.support_vectors[i]) os << ' ' << csv::exact(v);
    os << '\n';
  }
}

namespace detail {

inline void expect_key(std::istream& is, const std::string& key) {
  std::string got;
  if (!(is >> got) || got != key) {
    throw LoadError("model file: expected '" + key + "', found '" + got + "'");
  }
}

template <typename T>
T read_value(std::istream& is, const std::string& what) {
  T v{};
  if (!(is >> v)) throw LoadError("model file: cannot read " + what);
  return v;
}

}  // namespace detail

inline SvmModel read_svm(std::istream& is) {
  SvmModel m;
  detail::expect_key(is, "gamma");
  m.gamma = detail::read_value<double>(is, "gamma");
  detail::expect_key(is, "bias");
  m.bias = detail::read_value<double>(is, "bias");
  detail::expect_key(is, "dimension");
  const auto d = detail::read_value<std::size_t>(is, "dimension");
  detail::expect_key(is, "normalizer_mean");
  for (std::size_t i = 0; i < d; ++i) m.normalizer.mean.push_back(detail::read_value<double>(is, "mean"));
  detail::expect_key(is, "normalizer_std");
  for (std::size_t i = 0; i < d; ++i) m.normalizer.stdev.push_back(detail::read_value<double>(is, "std"));
  detail::expect_key(is, "support_vectors");
  const auto count = detail::read_value<std::size_t>(is, "support vector count");
  for (std::size_t s = 0; s < count; ++s) {
    m.coef.push_back(detail::read_value<double>(is, "coefficient"));
    std::vector<double> sv(d);
    for (double& v : sv) v = detail::read_value<double>(is, "support vector");
    m.support_vectors.push_back(std::move(sv));
  }
  return m;
}

}  // namespace wpseizure
