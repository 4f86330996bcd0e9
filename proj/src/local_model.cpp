// Copyright 2026 the pvbell authors
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

#include "local_model.hpp"
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "errors.hpp"

namespace pvbell {

namespace {

constexpr double kPivotTol = 1e-9;   // smallest acceptable pivot element
constexpr double kPriceTol = 1e-10;  // column-generation optimality threshold
constexpr double kNsRouteTol = 1e-10;
constexpr double kModelResidualTol = 1e-7;
constexpr double kFarkasSlackTol = 1e-9;

}  // namespace

// --- StrategySpace ---------------------------------------------------------

StrategySpace::StrategySpace(const Scenario& scenario)
    : d_(scenario.local_dim()), m_(scenario.settings()) {
  const int n = num_parties();
  party_size_.resize(n);
  digits_.resize(n);
  for (int i = 0; i < n; ++i) {
    std::uint64_t size = 1;
    for (int j = 0; j < m_[i]; ++j) size *= d_;
    party_size_[i] = size;
    digits_[i].resize(size * m_[i]);
    for (std::uint64_t code = 0; code < size; ++code) {
      std::uint64_t rem = code;
      for (int j = m_[i] - 1; j >= 0; --j) {
        digits_[i][code * m_[i] + j] = static_cast<std::uint8_t>(rem % d_);
        rem /= d_;
      }
    }
  }
  stride_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * party_size_[i + 1];
  total_ = stride_[0] * party_size_[0];
}

// --- LocalProgram ----------------------------------------------------------

LocalProgram::LocalProgram(const Scenario& scenario, const Behavior& behavior)
    : scenario_(scenario), strategies_(scenario) {
  if (behavior.local_dim != scenario.local_dim() ||
      behavior.settings != scenario.settings())
    fail(Errc::invalid_argument, "behavior does not match scenario");
  marginal_rows_ = scenario.num_setting_tuples() * scenario.num_outcome_tuples();
  rhs_ = behavior.table;
  rhs_.push_back(1.0);  // normalization row
  norm_dev_ = behavior.normalization_deviation();
  ns_dev_ = behavior.no_signaling_deviation();
}

int LocalProgram::matrix_entry(std::int64_t row, std::int64_t var) const {
  if (row == num_rows() - 1) return 1;
  const std::int64_t dn = scenario_.num_outcome_tuples();
  const std::int64_t k_idx = row / dn;
  const std::int64_t r_idx = row % dn;
  const int n = scenario_.num_parties();
  int k[32];
  std::int64_t rem = k_idx;
  for (int i = n - 1; i >= 0; --i) {
    k[i] = static_cast<int>(rem % scenario_.settings_for(i));
    rem /= scenario_.settings_for(i);
  }
  return strategies_.outcome_tuple(static_cast<std::uint64_t>(var), k) == r_idx;
}

void LocalProgram::dump(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
  char buf[40];
  for (std::int64_t row = 0; row < num_rows(); ++row) {
    for (std::int64_t var = 0; var < num_vars(); ++var) {
      out << matrix_entry(row, var) << ' ';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", rhs_[row]);
    out << buf << '\n';
  }
  if (!out) fail(Errc::io_error, "write to '" + path + "' failed");
}

// --- constraint systems ------------------------------------------------

namespace {

// The program as specified: one row per (setting tuple, outcome tuple),
// normalization row last.
struct FullSystem {
  const LocalProgram* lp;
  std::vector<int> tuple_digits;  // decoded setting tuples, n per tuple
  std::vector<double> b;

  explicit FullSystem(const LocalProgram& program) : lp(&program) {
    const Scenario& sc = program.scenario();
    const int n = sc.num_parties();
    tuple_digits.resize(static_cast<std::size_t>(sc.num_setting_tuples()) * n);
    for (std::int64_t k_idx = 0; k_idx < sc.num_setting_tuples(); ++k_idx) {
      std::int64_t rem = k_idx;
      for (int i = n - 1; i >= 0; --i) {
        tuple_digits[k_idx * n + i] = static_cast<int>(rem % sc.settings_for(i));
        rem /= sc.settings_for(i);
      }
    }
    b = program.rhs_vector();
  }

  std::int64_t rows() const { return lp->num_rows(); }
  std::uint64_t vars() const { return lp->strategies().total(); }
  const std::vector<double>& rhs() const { return b; }

  void support(std::uint64_t sigma, std::vector<std::int32_t>& buf) const {
    buf.clear();
    const Scenario& sc = lp->scenario();
    const int n = sc.num_parties();
    const std::int64_t dn = sc.num_outcome_tuples();
    for (std::int64_t k_idx = 0; k_idx < sc.num_setting_tuples(); ++k_idx) {
      const std::int64_t r =
          lp->strategies().outcome_tuple(sigma, &tuple_digits[k_idx * n]);
      buf.push_back(static_cast<std::int32_t>(k_idx * dn + r));
    }
    buf.push_back(static_cast<std::int32_t>(rows() - 1));
  }

  std::pair<std::int64_t, double> price_extreme(const std::vector<double>& y,
                                                bool want_min) const {
    static thread_local std::vector<double> f;
    price(y, f);
    const double sign = want_min ? -1.0 : 1.0;
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_idx = -1;
    for (std::uint64_t sigma = 0; sigma < vars(); ++sigma) {
      if (sign * f[sigma] > best) {
        best = sign * f[sigma];
        best_idx = static_cast<std::int64_t>(sigma);
      }
    }
    return {best_idx, sign * best};
  }

  // F[sigma] = y . A_sigma for every strategy.
  void price(const std::vector<double>& y, std::vector<double>& f) const {
    f.assign(vars(), y[rows() - 1]);
    std::vector<std::int32_t> buf;
    for (std::uint64_t sigma = 0; sigma < vars(); ++sigma) {
      const Scenario& sc = lp->scenario();
      const int n = sc.num_parties();
      const std::int64_t dn = sc.num_outcome_tuples();
      double acc = y[rows() - 1];
      for (std::int64_t k_idx = 0; k_idx < sc.num_setting_tuples(); ++k_idx) {
        const std::int64_t r =
            lp->strategies().outcome_tuple(sigma, &tuple_digits[k_idx * n]);
        acc += y[k_idx * dn + r];
      }
      f[sigma] = acc;
    }
  }
};

// Equivalent program over marginal coordinates.  For a behavior that
// satisfies no-signaling, membership in the local polytope only depends on
// the marginals P(r_S | k_S) with every recorded outcome below d-1; party i
// contributes coordinate 0 ("not measured") or 1 + k(d-1) + r.  This shrinks
// the row count from (prod m_i) d^N + 1 to prod_i (1 + m_i (d-1)) while
// keeping the variable set and the verdict identical.
struct ReducedSystem {
  int n = 0, d = 0;
  std::vector<int> m;
  std::vector<int> csize;            // per-party coordinate count
  std::vector<std::int64_t> cstride;  // party 0 most significant
  std::int64_t rows_ = 1;
  const StrategySpace* strat;
  std::vector<std::uint64_t> party_size;    // d^{m_i}
  std::vector<std::uint64_t> sigma_stride;  // strategy-code strides
  // Option values (party-local coordinates) per per-party strategy code.
  std::vector<std::vector<std::int32_t>> opt_vals;  // per party, flattened
  std::vector<std::vector<std::int32_t>> opt_off;   // per party, code -> offset
  // The same incidence as dense codes x coords 0/1 matrices (fast pricing).
  std::vector<std::vector<double>> compat;
  std::vector<double> b;

  ReducedSystem(const LocalProgram& lp, const Behavior& behavior)
      : strat(&lp.strategies()) {
    const Scenario& sc = lp.scenario();
    n = sc.num_parties();
    d = sc.local_dim();
    m = sc.settings();
    csize.resize(n);
    for (int i = 0; i < n; ++i) {
      csize[i] = 1 + m[i] * (d - 1);
      rows_ *= csize[i];
    }
    cstride.assign(n, 1);
    for (int i = n - 2; i >= 0; --i) cstride[i] = cstride[i + 1] * csize[i + 1];

    opt_vals.resize(n);
    opt_off.resize(n);
    party_size.resize(n);
    for (int i = 0; i < n; ++i) {
      std::uint64_t size = 1;
      for (int j = 0; j < m[i]; ++j) size *= d;
      party_size[i] = size;
      opt_off[i].reserve(size + 1);
      for (std::uint64_t code = 0; code < size; ++code) {
        opt_off[i].push_back(static_cast<std::int32_t>(opt_vals[i].size()));
        opt_vals[i].push_back(0);  // "not measured"
        std::uint64_t rem = code;
        int digit[32];
        for (int j = m[i] - 1; j >= 0; --j) {
          digit[j] = static_cast<int>(rem % d);
          rem /= d;
        }
        for (int j = 0; j < m[i]; ++j)
          if (digit[j] < d - 1)
            opt_vals[i].push_back(1 + j * (d - 1) + digit[j]);
      }
      opt_off[i].push_back(static_cast<std::int32_t>(opt_vals[i].size()));
    }
    sigma_stride.assign(n, 1);
    for (int i = n - 2; i >= 0; --i)
      sigma_stride[i] = sigma_stride[i + 1] * party_size[i + 1];

    compat.resize(n);
    for (int i = 0; i < n; ++i) {
      const std::int64_t codes = static_cast<std::int64_t>(party_size[i]);
      compat[i].assign(codes * csize[i], 0.0);
      for (std::int64_t code = 0; code < codes; ++code)
        for (std::int32_t t = opt_off[i][code]; t < opt_off[i][code + 1]; ++t)
          compat[i][code * csize[i] + opt_vals[i][t]] = 1.0;
    }

    build_rhs(behavior);
  }

  std::int64_t rows() const { return rows_; }
  std::uint64_t vars() const { return strat->total(); }
  const std::vector<double>& rhs() const { return b; }

  void build_rhs(const Behavior& behavior) {
    b.assign(rows_, 0.0);
    std::vector<int> coord(n), k(n), fixed_r(n);
    for (std::int64_t row = 0; row < rows_; ++row) {
      std::int64_t rem = row;
      for (int i = n - 1; i >= 0; --i) {
        coord[i] = static_cast<int>(rem % csize[i]);
        rem /= csize[i];
      }
      std::int64_t k_idx = 0;
      for (int i = 0; i < n; ++i) {
        k[i] = coord[i] == 0 ? 0 : (coord[i] - 1) / (d - 1);
        fixed_r[i] = coord[i] == 0 ? -1 : (coord[i] - 1) % (d - 1);
        k_idx = k_idx * m[i] + k[i];
      }
      // Sum the behavior over the unmeasured parties' outcomes.
      double sum = 0.0;
      std::int64_t free_count = 1;
      for (int i = 0; i < n; ++i)
        if (fixed_r[i] < 0) free_count *= d;
      for (std::int64_t combo = 0; combo < free_count; ++combo) {
        std::int64_t rest = combo, r_idx = 0;
        for (int i = 0; i < n; ++i) {
          int digit;
          if (fixed_r[i] < 0) {
            digit = static_cast<int>(rest % d);
            rest /= d;
          } else {
            digit = fixed_r[i];
          }
          r_idx = r_idx * d + digit;
        }
        sum += behavior.value(k_idx, r_idx);
      }
      b[row] = sum;
    }
  }

  void support(std::uint64_t sigma, std::vector<std::int32_t>& buf) const {
    buf.clear();
    buf.push_back(0);
    // Expand the per-party option lists as a product.  Option value 0 keeps
    // every existing prefix, so only nonzero options append entries.
    for (int i = 0; i < n; ++i) {
      const std::uint64_t code = (sigma / sigma_stride[i]) % party_size[i];
      const std::int32_t* vals = opt_vals[i].data() + opt_off[i][code];
      const std::int32_t count = opt_off[i][code + 1] - opt_off[i][code];
      const std::size_t end = buf.size();
      for (std::int32_t v = 1; v < count; ++v) {
        const std::int64_t add = static_cast<std::int64_t>(vals[v]) * cstride[i];
        for (std::size_t p = 0; p < end; ++p)
          buf.push_back(static_cast<std::int32_t>(buf[p] + add));
      }
    }
  }

  // Tensor-contraction pricing: contracts y against each party's dense
  // code-compatibility matrix in turn, yielding y . A_sigma for all sigma at
  // once in O(sum_i prefix_i * codes_i * cs_i * suffix_i) operations.
  void price(const std::vector<double>& y, std::vector<double>& f) const {
    static thread_local std::vector<double> cur, next;
    cur.assign(y.begin(), y.end());
    std::int64_t prefix = 1;
    std::int64_t suffix = rows_;
    for (int i = 0; i < n; ++i) {
      const std::int64_t cs = csize[i];
      const std::int64_t codes = static_cast<std::int64_t>(party_size[i]);
      const double* cm = compat[i].data();
      suffix /= cs;
      next.resize(static_cast<std::size_t>(prefix) * codes * suffix);
      if (suffix == 1) {
        // Innermost stage: a tiny dense (codes x cs) times vector per block.
        for (std::int64_t p = 0; p < prefix; ++p) {
          const double* src = cur.data() + p * cs;
          double* dst = next.data() + p * codes;
          for (std::int64_t code = 0; code < codes; ++code) {
            const double* w = cm + code * cs;
            double acc = 0.0;
            for (std::int64_t c = 0; c < cs; ++c) acc += w[c] * src[c];
            dst[code] = acc;
          }
        }
      } else {
        for (std::int64_t p = 0; p < prefix; ++p) {
          const double* src = cur.data() + p * cs * suffix;
          double* dst_base = next.data() + p * codes * suffix;
          for (std::int64_t code = 0; code < codes; ++code) {
            double* dst = dst_base + code * suffix;
            const double* w = cm + code * cs;
            for (std::int64_t t = 0; t < suffix; ++t) dst[t] = w[0] * src[t];
            for (std::int64_t c = 1; c < cs; ++c) {
              const double wc = w[c];
              if (wc == 0.0) continue;
              const double* s = src + c * suffix;
              for (std::int64_t t = 0; t < suffix; ++t) dst[t] += s[t];
            }
          }
        }
      }
      cur.swap(next);
      prefix *= codes;
    }
    f.swap(cur);
  }

  // Fused price + extremum: the value and index of the smallest (or largest)
  // y . A_sigma, without materializing the full score vector.
  std::pair<std::int64_t, double> price_extreme(const std::vector<double>& y,
                                                bool want_min) const {
    static thread_local std::vector<double> cur, next;
    cur.assign(y.begin(), y.end());
    std::int64_t prefix = 1;
    std::int64_t suffix = rows_;
    for (int i = 0; i + 1 < n; ++i) {
      const std::int64_t cs = csize[i];
      const std::int64_t codes = static_cast<std::int64_t>(party_size[i]);
      const double* cm = compat[i].data();
      suffix /= cs;
      next.resize(static_cast<std::size_t>(prefix) * codes * suffix);
      for (std::int64_t p = 0; p < prefix; ++p) {
        const double* src = cur.data() + p * cs * suffix;
        double* dst_base = next.data() + p * codes * suffix;
        for (std::int64_t code = 0; code < codes; ++code) {
          double* dst = dst_base + code * suffix;
          const double* w = cm + code * cs;
          for (std::int64_t t = 0; t < suffix; ++t) dst[t] = w[0] * src[t];
          for (std::int64_t c = 1; c < cs; ++c) {
            if (w[c] == 0.0) continue;
            const double* s = src + c * suffix;
            for (std::int64_t t = 0; t < suffix; ++t) dst[t] += s[t];
          }
        }
      }
      cur.swap(next);
      prefix *= codes;
    }
    // Last party fused with the extremum search.
    const int i = n - 1;
    const std::int64_t cs = csize[i];
    const std::int64_t codes = static_cast<std::int64_t>(party_size[i]);
    const double* cm = compat[i].data();
    const double sign = want_min ? -1.0 : 1.0;
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t best_idx = -1;
    for (std::int64_t p = 0; p < prefix; ++p) {
      const double* src = cur.data() + p * cs;
      for (std::int64_t code = 0; code < codes; ++code) {
        const double* w = cm + code * cs;
        double acc = 0.0;
        for (std::int64_t c = 0; c < cs; ++c) acc += w[c] * src[c];
        if (sign * acc > best) {
          best = sign * acc;
          best_idx = p * codes + code;
        }
      }
    }
    return {best_idx, sign * best};
  }
};

// --- basis inverse with product-form update window ------------------------

// Dense m x m basis inverse kept as an anchor matrix (in both layouts) plus
// a short list of pending eta updates.  FTRAN/BTRAN stay cheap within the
// window; a blocked refresh folds the etas into the anchor so the rank-1
// work runs at cache speed instead of streaming the matrix every pivot.
class BasisInverse {
 public:
  void reset_identity(std::int64_t m) {
    m_ = m;
    col_.assign(static_cast<std::size_t>(m) * m, 0.0);
    row_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (std::int64_t i = 0; i < m; ++i) {
      col_[static_cast<std::size_t>(i) * m + i] = 1.0;
      row_[static_cast<std::size_t>(i) * m + i] = 1.0;
    }
    etas_.clear();
  }

  void reset_from_colmajor(const std::vector<double>& binv, std::int64_t m) {
    m_ = m;
    col_ = binv;
    rebuild_row_major();
    etas_.clear();
  }

  // out = B^{-1} (sum of unit vectors on `support`).
  void ftran_support(const std::vector<std::int32_t>& support,
                     std::vector<double>& out) const {
    out.assign(m_, 0.0);
    for (std::int32_t r : support) {
      const double* col = col_.data() + static_cast<std::size_t>(r) * m_;
      for (std::int64_t i = 0; i < m_; ++i) out[i] += col[i];
    }
    apply_etas(out);
  }

  // out = B^{-1} b for a dense b.
  void ftran_dense(const std::vector<double>& b, std::vector<double>& out) const {
    out.assign(m_, 0.0);
    for (std::int64_t j = 0; j < m_; ++j) {
      const double bj = b[j];
      if (bj == 0.0) continue;
      const double* col = col_.data() + static_cast<std::size_t>(j) * m_;
      for (std::int64_t i = 0; i < m_; ++i) out[i] += bj * col[i];
    }
    apply_etas(out);
  }

  // out = e_r^T B^{-1}.
  void btran_row(std::int64_t r, std::vector<double>& out) const {
    // e_r^T E_K ... E_1 stays sparse: one extra nonzero per eta at most.
    scratch_idx_.clear();
    scratch_val_.clear();
    scratch_idx_.push_back(r);
    scratch_val_.push_back(1.0);
    for (std::size_t k = etas_.size(); k-- > 0;) {
      const Eta& e = etas_[k];
      // w^T E_k = w^T - ((w.d - w_r)/p) e_r^T with w supported on few rows.
      double wd = 0.0, at_row = 0.0;
      for (std::size_t t = 0; t < scratch_idx_.size(); ++t) {
        wd += scratch_val_[t] * e.d[scratch_idx_[t]];
        if (scratch_idx_[t] == e.row) at_row = scratch_val_[t];
      }
      const double coeff = (wd - at_row) / e.pivot;
      if (coeff == 0.0) continue;
      bool merged = false;
      for (std::size_t t = 0; t < scratch_idx_.size(); ++t) {
        if (scratch_idx_[t] == e.row) {
          scratch_val_[t] -= coeff;
          merged = true;
          break;
        }
      }
      if (!merged) {
        scratch_idx_.push_back(e.row);
        scratch_val_.push_back(-coeff);
      }
    }
    out.assign(m_, 0.0);
    for (std::size_t t = 0; t < scratch_idx_.size(); ++t) {
      const double w = scratch_val_[t];
      if (w == 0.0) continue;
      const double* row = row_.data() + static_cast<std::size_t>(scratch_idx_[t]) * m_;
      for (std::int64_t j = 0; j < m_; ++j) out[j] += w * row[j];
    }
  }

  // Record the pivot (leaving row r, direction d = current B^{-1}A_q).
  void push(std::int64_t r, const std::vector<double>& d) {
    etas_.push_back(Eta{r, d, d[r]});
    if (etas_.size() >= kWindow) flush();
  }

  // Fold pending etas into the anchor matrices.  Etas are applied in small
  // blocks so each column pass keeps its working set in L1.
  void flush() {
    if (etas_.empty()) return;
    constexpr std::size_t kBlock = 8;
    for (std::size_t first = 0; first < etas_.size(); first += kBlock) {
      const std::size_t last = std::min(first + kBlock, etas_.size());
      for (std::int64_t j = 0; j < m_; ++j) {
        double* col = col_.data() + static_cast<std::size_t>(j) * m_;
        for (std::size_t k = first; k < last; ++k) {
          const Eta& e = etas_[k];
          const double t = col[e.row] / e.pivot;
          if (t != 0.0) {
            const double* d = e.d.data();
            for (std::int64_t i = 0; i < m_; ++i) col[i] -= t * d[i];
            col[e.row] = t;
          }
        }
      }
    }
    etas_.clear();
    rebuild_row_major();
  }

  const std::vector<double>& colmajor_flushed() {
    flush();
    return col_;
  }

  // Row-major anchor rows are exact only when no etas are pending.
  const double* exact_row(std::int64_t r) const {
    return row_.data() + static_cast<std::size_t>(r) * m_;
  }
  bool pending() const { return !etas_.empty(); }

 private:
  static constexpr std::size_t kWindow = 24;

  struct Eta {
    std::int64_t row;
    std::vector<double> d;
    double pivot;
  };

  void apply_etas(std::vector<double>& v) const {
    for (const Eta& e : etas_) {
      const double f = v[e.row] / e.pivot;
      if (f != 0.0) {
        const double* d = e.d.data();
        for (std::int64_t i = 0; i < m_; ++i) v[i] -= f * d[i];
        v[e.row] = f;
      }
    }
  }

  void rebuild_row_major() {
    row_.resize(static_cast<std::size_t>(m_) * m_);
    constexpr std::int64_t kTile = 16;
    for (std::int64_t jb = 0; jb < m_; jb += kTile)
      for (std::int64_t ib = 0; ib < m_; ib += kTile)
        for (std::int64_t j = jb; j < std::min(jb + kTile, m_); ++j)
          for (std::int64_t i = ib; i < std::min(ib + kTile, m_); ++i)
            row_[static_cast<std::size_t>(i) * m_ + j] =
                col_[static_cast<std::size_t>(j) * m_ + i];
  }

  std::int64_t m_ = 0;
  std::vector<double> col_, row_;
  std::vector<Eta> etas_;
  mutable std::vector<std::int64_t> scratch_idx_;
  mutable std::vector<double> scratch_val_;
};

// --- phase-1 simplex ---------------------------------------------------

struct SimplexResult {
  enum class Status { kOptimal, kEarlyFeasible, kIterLimit, kNumeric };
  Status status = Status::kOptimal;
  double objective = 0.0;
  std::int64_t iterations = 0;
  std::vector<std::pair<std::uint64_t, double>> basic_structural;  // (sigma, value)
  std::vector<double> y;  // simplex multipliers at termination
  std::vector<std::int64_t> basis;  // per row: variable id at termination
  std::vector<double> binv;         // column-major basis inverse
};

// Revised phase-1 simplex over the eta-windowed basis inverse.  Every
// iteration prices the complete strategy set (cheap through the systems'
// price() contractions): plain Dantzig pricing with lowest-index tie
// breaking plus a Bland fallback against cycling.  Simplex multipliers are
// carried incrementally and re-derived from the basis at refresh points.
template <class System>
class Phase1Simplex {
 public:
  explicit Phase1Simplex(const System& sys, double tol)
      : sys_(sys), m_(sys.rows()), vars_(sys.vars()), tol_(tol) {}

  SimplexResult run() {
    init();
    SimplexResult res;
    const std::int64_t bland_after = 1000 + 50 * m_;
    const std::int64_t iter_cap = 20000 + 200 * m_;
    while (true) {
      if (objective() <= 0.5 * tol_) {
        res.status = SimplexResult::Status::kEarlyFeasible;
        return finish(res);
      }
      if (iterations_ >= iter_cap) {
        res.status = SimplexResult::Status::kIterLimit;
        return finish(res);
      }
      if (iterations_ > 0 && iterations_ % 512 == 0) refresh_y();
      const bool bland = iterations_ >= bland_after;
      std::int64_t enter = -1;
      double enter_score = 0.0;
      if (bland) {
        sys_.price(y_, scores_);
        for (std::uint64_t sigma = 0; sigma < vars_; ++sigma) {
          if (scores_[sigma] > 1e-12 && basic_row_[sigma] < 0) {
            enter = static_cast<std::int64_t>(sigma);
            enter_score = scores_[sigma];
            break;
          }
        }
      } else {
        // Basic columns price to zero, so the extremum needs no basis check.
        const auto [idx, value] = sys_.price_extreme(y_, /*want_min=*/false);
        if (idx >= 0 && value > kPriceTol) {
          enter = idx;
          enter_score = value;
        }
      }
      if (enter < 0) {
        res.status = SimplexResult::Status::kOptimal;
        return finish(res);
      }
      if (!pivot_on(static_cast<std::uint64_t>(enter), enter_score, bland)) {
        res.status = SimplexResult::Status::kNumeric;
        return finish(res);
      }
    }
  }

 private:
  void init() {
    const std::vector<double>& b = sys_.rhs();
    binv_.reset_identity(m_);
    x_.assign(m_, 0.0);
    y_.assign(m_, 1.0);  // all-artificial basis: c_B B^{-1} = 1
    basic_.resize(m_);
    for (std::int64_t i = 0; i < m_; ++i) {
      x_[i] = std::max(0.0, b[i]);
      basic_[i] = static_cast<std::int64_t>(vars_) + i;  // artificial ids
    }
    basic_row_.assign(vars_, -1);
    iterations_ = 0;
  }

  double objective() const {
    double obj = 0.0;
    for (std::int64_t i = 0; i < m_; ++i)
      if (basic_[i] >= static_cast<std::int64_t>(vars_)) obj += x_[i];
    return obj;
  }

  // Exact y = c_B B^{-1}: sum of the B^{-1} rows holding artificial basics.
  void refresh_y() {
    binv_.flush();
    y_.assign(m_, 0.0);
    for (std::int64_t i = 0; i < m_; ++i) {
      if (basic_[i] < static_cast<std::int64_t>(vars_)) continue;
      const double* row = binv_.exact_row(i);
      for (std::int64_t j = 0; j < m_; ++j) y_[j] += row[j];
    }
  }

  bool pivot_on(std::uint64_t enter, double score, bool bland) {
    sys_.support(enter, support_buf_);
    binv_.ftran_support(support_buf_, direction_);

    std::int64_t leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < m_; ++i) {
      const double d = direction_[i];
      if (d <= kPivotTol) continue;
      const double ratio = std::max(0.0, x_[i]) / d;
      bool take = false;
      if (ratio < best_ratio - 1e-12) {
        take = true;
      } else if (ratio <= best_ratio + 1e-12 && leave >= 0) {
        const std::int64_t cur = basic_[i];
        const std::int64_t prev = basic_[leave];
        if (bland) {
          take = cur < prev;  // lowest variable id, Bland's rule
        } else {
          const bool cur_art = cur >= static_cast<std::int64_t>(vars_);
          const bool prev_art = prev >= static_cast<std::int64_t>(vars_);
          take = cur_art != prev_art ? cur_art : cur < prev;
        }
      }
      if (take) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return false;  // phase-1 cannot be unbounded

    const double piv = direction_[leave];
    const double theta = std::max(0.0, x_[leave]) / piv;
    for (std::int64_t i = 0; i < m_; ++i) {
      x_[i] -= theta * direction_[i];
      if (x_[i] < 0.0) {
        if (x_[i] < -1e-6) return false;
        x_[i] = 0.0;
      }
    }
    x_[leave] = theta;

    // y' = y - (score / pivot) * (old row `leave` of B^{-1}).
    binv_.btran_row(leave, rho_);
    const double f = score / piv;
    for (std::int64_t j = 0; j < m_; ++j) y_[j] -= f * rho_[j];

    binv_.push(leave, direction_);
    const std::int64_t leaving = basic_[leave];
    if (leaving < static_cast<std::int64_t>(vars_)) basic_row_[leaving] = -1;
    basic_[leave] = static_cast<std::int64_t>(enter);
    basic_row_[enter] = static_cast<std::int32_t>(leave);
    ++iterations_;
    return true;
  }

  SimplexResult finish(SimplexResult res) {
    res.objective = objective();
    res.iterations = iterations_;
    refresh_y();
    res.y = y_;
    for (std::int64_t i = 0; i < m_; ++i) {
      if (basic_[i] < static_cast<std::int64_t>(vars_) && x_[i] > 0.0)
        res.basic_structural.emplace_back(static_cast<std::uint64_t>(basic_[i]),
                                          x_[i]);
    }
    res.basis = std::move(basic_);
    res.binv = binv_.colmajor_flushed();
    return res;
  }

  const System& sys_;
  std::int64_t m_;
  std::uint64_t vars_;
  double tol_;

  BasisInverse binv_;
  std::vector<double> x_;                // basic variable values
  std::vector<std::int64_t> basic_;      // per row: variable id
  std::vector<std::int32_t> basic_row_;  // sigma -> basis row or -1
  std::vector<double> y_, direction_, scores_, rho_;
  std::vector<std::int32_t> support_buf_;
  std::int64_t iterations_ = 0;
};

// Restores primal feasibility from a warm structural basis by dual-type
// pivots: repeatedly evict the most negative basic variable, entering the
// eligible strategy column with the largest pivot magnitude.  Succeeds with
// an exact local model, reports infeasibility (phase-1 then quantifies it),
// or gives up on numerical/iteration trouble (phase-1 takes over).
class DualRestore {
 public:
  enum class Status { kFeasible, kInfeasible, kGiveUp };

  DualRestore(const ReducedSystem& sys, const SolveContext& ctx)
      : sys_(sys), m_(sys.rows()), vars_(sys.vars()) {
    binv_.reset_from_colmajor(ctx.warm_binv(), m_);
    basic_ = ctx.warm_basis();
    basic_row_.assign(vars_, -1);
    for (std::int64_t i = 0; i < m_; ++i)
      basic_row_[static_cast<std::uint64_t>(basic_[i])] =
          static_cast<std::int32_t>(i);
  }

  std::int64_t iterations() const { return iterations_; }

  Status run() {
    binv_.ftran_dense(sys_.rhs(), x_);
    const std::int64_t bland_after = 500 + 20 * m_;
    const std::int64_t iter_cap = 4000 + 40 * m_;
    std::vector<double> rho, alpha, dir;
    for (std::int64_t iter = 0; iter < iter_cap; ++iter) {
      iterations_ = iter;
      const bool bland = iter >= bland_after;
      // Leaving row: most negative basic value (Bland: lowest basic id).
      std::int64_t leave = -1;
      double worst = -1e-11;
      for (std::int64_t i = 0; i < m_; ++i) {
        if (bland) {
          if (x_[i] < -1e-11 && (leave < 0 || basic_[i] < basic_[leave]))
            leave = i;
        } else if (x_[i] < worst) {
          worst = x_[i];
          leave = i;
        }
      }
      if (leave < 0) return Status::kFeasible;

      // Pivot row of the tableau, priced against every strategy column.
      // Basic columns never price negative here (their tableau entry is a
      // unit-vector component), so no basis check is needed.
      binv_.btran_row(leave, rho);
      std::int64_t enter = -1;
      if (bland) {
        sys_.price(rho, alpha);
        for (std::uint64_t sigma = 0; sigma < vars_; ++sigma) {
          if (alpha[sigma] < -kPivotTol) {
            enter = static_cast<std::int64_t>(sigma);
            break;
          }
        }
      } else {
        const auto [idx, value] = sys_.price_extreme(rho, /*want_min=*/true);
        if (idx >= 0 && value < -kPivotTol) enter = idx;
      }
      if (enter < 0) return Status::kInfeasible;  // Farkas row found

      sys_.support(static_cast<std::uint64_t>(enter), support_buf_);
      binv_.ftran_support(support_buf_, dir);
      const double piv = dir[leave];
      if (!(piv < -kPivotTol)) return Status::kGiveUp;  // drifted
      const double theta = x_[leave] / piv;  // > 0
      for (std::int64_t i = 0; i < m_; ++i) x_[i] -= theta * dir[i];
      x_[leave] = theta;

      binv_.push(leave, dir);
      basic_row_[static_cast<std::uint64_t>(basic_[leave])] = -1;
      basic_[leave] = enter;
      basic_row_[static_cast<std::uint64_t>(enter)] =
          static_cast<std::int32_t>(leave);
    }
    return Status::kGiveUp;
  }

  // Model weights after a kFeasible run.
  std::vector<std::pair<std::uint64_t, double>> model() const {
    std::vector<std::pair<std::uint64_t, double>> out;
    for (std::int64_t i = 0; i < m_; ++i)
      if (x_[i] > 0.0)
        out.emplace_back(static_cast<std::uint64_t>(basic_[i]), x_[i]);
    return out;
  }

 private:
  const ReducedSystem& sys_;
  std::int64_t m_;
  std::uint64_t vars_;
  BasisInverse binv_;
  std::vector<double> x_;
  std::vector<std::int64_t> basic_;
  std::vector<std::int32_t> basic_row_;
  std::vector<std::int32_t> support_buf_;
  std::int64_t iterations_ = 0;
};

Behavior barycenter_behavior(const Scenario& scenario) {
  Behavior b;
  b.local_dim = scenario.local_dim();
  b.settings = scenario.settings();
  b.num_outcomes = scenario.num_outcome_tuples();
  b.table.assign(static_cast<std::size_t>(scenario.num_setting_tuples()) *
                     scenario.num_outcome_tuples(),
                 1.0 / static_cast<double>(scenario.num_outcome_tuples()));
  return b;
}

// Maps a reduced-row certificate back to the rows of the full program.
std::vector<double> lift_certificate(const ReducedSystem& red,
                                     const LocalProgram& lp,
                                     const std::vector<double>& y_red) {
  const Scenario& sc = lp.scenario();
  const int n = sc.num_parties();
  const int d = sc.local_dim();
  const std::int64_t dn = sc.num_outcome_tuples();
  std::vector<double> y_full(lp.num_rows(), 0.0);
  std::vector<int> k(n), r(n);
  for (std::int64_t k_idx = 0; k_idx < sc.num_setting_tuples(); ++k_idx) {
    std::int64_t rem = k_idx;
    for (int i = n - 1; i >= 0; --i) {
      k[i] = static_cast<int>(rem % sc.settings_for(i));
      rem /= sc.settings_for(i);
    }
    for (std::int64_t r_idx = 0; r_idx < dn; ++r_idx) {
      std::int64_t rr = r_idx;
      for (int i = n - 1; i >= 0; --i) {
        r[i] = static_cast<int>(rr % d);
        rr /= d;
      }
      // Sum y_red over reduced rows compatible with (k, r): party i may be
      // unmeasured (only if its setting is the marginalization reference 0)
      // or recorded as (k_i, r_i) (only if r_i < d-1).
      double acc = 0.0;
      std::int64_t combos = 1;
      int option_count[32];
      std::int64_t option_val[32][2];
      bool possible = true;
      for (int i = 0; i < n; ++i) {
        int cnt = 0;
        if (k[i] == 0) option_val[i][cnt++] = 0;
        if (r[i] < d - 1)
          option_val[i][cnt++] = 1 + k[i] * (d - 1) + r[i];
        if (cnt == 0) {
          possible = false;
          break;
        }
        option_count[i] = cnt;
        combos *= cnt;
      }
      if (possible) {
        for (std::int64_t c = 0; c < combos; ++c) {
          std::int64_t rest = c, row = 0;
          for (int i = 0; i < n; ++i) {
            const int pick = static_cast<int>(rest % option_count[i]);
            rest /= option_count[i];
            row += option_val[i][pick] * red.cstride[i];
          }
          acc += y_red[row];
        }
      }
      y_full[k_idx * dn + r_idx] = acc;
    }
  }
  return y_full;
}

// Expands basis weights into a model vector and reports how well it
// reproduces the behavior (max-norm and total residual over all rows).
void build_model(const LocalProgram& lp,
                 const std::vector<std::pair<std::uint64_t, double>>& basic,
                 std::vector<double>& model_out, double* linf, double* l1) {
  model_out.assign(static_cast<std::size_t>(lp.num_vars()), 0.0);
  std::vector<double> reproduced(lp.num_rows(), 0.0);
  FullSystem full(lp);
  std::vector<std::int32_t> buf;
  for (const auto& [sigma, weight] : basic) {
    const double w = std::max(0.0, weight);
    model_out[sigma] += w;
    full.support(sigma, buf);
    for (std::int32_t row : buf) reproduced[row] += w;
  }
  *linf = 0.0;
  *l1 = 0.0;
  for (std::int64_t row = 0; row < lp.num_rows(); ++row) {
    const double r = std::abs(reproduced[row] - lp.rhs(row));
    *linf = std::max(*linf, r);
    *l1 += r;
  }
}

// Posterior soundness: a LOCAL model must reproduce every behavior entry.
void check_local_model(const LocalProgram& lp,
                       const std::vector<std::pair<std::uint64_t, double>>& basic,
                       double tol, std::vector<double>& model_out) {
  for (const auto& [sigma, weight] : basic) {
    (void)sigma;
    if (weight < -1e-9) fail(Errc::solver_failure, "negative model weight");
  }
  double linf = 0.0, l1 = 0.0;
  build_model(lp, basic, model_out, &linf, &l1);
  if (linf > std::max(kModelResidualTol, tol))
    fail(Errc::solver_failure,
         "local model fails to reproduce the behavior (residual " +
             std::to_string(linf) + ")");
}

// Posterior soundness: a NONLOCAL certificate must be a Farkas witness.
void check_certificate(const LocalProgram& lp, std::vector<double>& y) {
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (scale <= 0.0) fail(Errc::solver_failure, "empty infeasibility certificate");
  for (double& v : y) v /= scale;

  FullSystem full(lp);
  std::vector<double> f;
  full.price(y, f);
  double worst = -std::numeric_limits<double>::infinity();
  for (double v : f) worst = std::max(worst, v);
  if (worst > kFarkasSlackTol)
    fail(Errc::solver_failure,
         "certificate is not a Farkas witness (max y.A = " +
             std::to_string(worst) + ")");
  double yb = 0.0;
  for (std::int64_t row = 0; row < lp.num_rows(); ++row)
    yb += y[row] * lp.rhs(row);
  if (yb <= 0.0)
    fail(Errc::solver_failure, "certificate has nonpositive y.b");
}

}  // namespace


SolveContext::SolveContext(const Scenario& scenario) : scenario_(scenario) {
  // Solve the barycenter (uniform) behavior once and keep its basis; drive
  // any leftover artificial basics out so the basis is purely structural.
  const Behavior uniform = barycenter_behavior(scenario);
  const LocalProgram lp(scenario, uniform);
  const ReducedSystem red(lp, uniform);
  Phase1Simplex<ReducedSystem> simplex(red, kDefaultFeasibilityTol);
  SimplexResult res = simplex.run();
  if (res.status != SimplexResult::Status::kOptimal &&
      res.status != SimplexResult::Status::kEarlyFeasible)
    return;  // leave invalid; solves fall back to plain phase-1

  const std::int64_t m = red.rows();
  const auto vars = static_cast<std::int64_t>(red.vars());
  std::vector<std::int64_t>& basis = res.basis;
  std::vector<double>& binv = res.binv;
  std::vector<std::int32_t> in_basis(red.vars(), 0);
  for (std::int64_t i = 0; i < m; ++i)
    if (basis[i] < vars) in_basis[basis[i]] = 1;

  std::vector<double> rho(m), alpha, dir(m);
  std::vector<std::int32_t> support;
  for (std::int64_t r = 0; r < m; ++r) {
    if (basis[r] < vars) continue;  // structural already
    for (std::int64_t j = 0; j < m; ++j)
      rho[j] = binv[static_cast<std::size_t>(j) * m + r];
    red.price(rho, alpha);
    std::int64_t enter = -1;
    double best = 1e-7;
    for (std::int64_t sigma = 0; sigma < vars; ++sigma) {
      if (in_basis[sigma]) continue;
      const double mag = std::abs(alpha[sigma]);
      if (mag > best) {
        best = mag;
        enter = sigma;
      }
    }
    if (enter < 0) return;  // row not reachable; keep invalid
    red.support(static_cast<std::uint64_t>(enter), support);
    std::fill(dir.begin(), dir.end(), 0.0);
    for (std::int32_t row : support) {
      const double* col = binv.data() + static_cast<std::size_t>(row) * m;
      for (std::int64_t i = 0; i < m; ++i) dir[i] += col[i];
    }
    const double piv = dir[r];
    if (std::abs(piv) < 1e-9) return;
    const double inv = 1.0 / piv;
    for (std::int64_t j = 0; j < m; ++j) {
      double* col = binv.data() + static_cast<std::size_t>(j) * m;
      const double t = col[r] * inv;
      if (t != 0.0) {
        for (std::int64_t i = 0; i < m; ++i) col[i] -= t * dir[i];
        col[r] = t;
      }
    }
    basis[r] = enter;
    in_basis[enter] = 1;
  }
  basis_ = std::move(basis);
  binv_ = std::move(binv);
  valid_ = true;
}

Verdict solve_feasibility(const LocalProgram& lp, double tol,
                          const SolveContext* context) {
  if (!(tol > 0.0)) fail(Errc::invalid_argument, "tolerance must be positive");
  const bool no_signaling = lp.no_signaling_deviation() <= kNsRouteTol &&
                            lp.normalization_deviation() <= kNsRouteTol;
  Verdict verdict;
  if (no_signaling) {
    // Quantum behaviors always take this path; the reduced system has the
    // same feasible strategy mixtures as the full one.
    Behavior view;
    view.local_dim = lp.scenario().local_dim();
    view.settings = lp.scenario().settings();
    view.num_outcomes = lp.scenario().num_outcome_tuples();
    view.table.assign(lp.rhs_vector().begin(), lp.rhs_vector().end() - 1);
    ReducedSystem red(lp, view);

    if (context != nullptr && context->valid() &&
        context->scenario().local_dim() == lp.scenario().local_dim() &&
        context->scenario().settings() == lp.scenario().settings()) {
      DualRestore dual(red, *context);
      const DualRestore::Status status = dual.run();
      if (status == DualRestore::Status::kFeasible) {
        // Accept only when the model is clearly inside the tolerance band,
        // so the verdict matches what a cold phase-1 solve would return.
        double linf = 0.0, l1 = 0.0;
        std::vector<double> model;
        build_model(lp, dual.model(), model, &linf, &l1);
        if (linf <= 0.1 * tol) {
          verdict.kind = VerdictKind::LOCAL;
          verdict.margin = l1;
          verdict.iterations = dual.iterations();
          verdict.model = std::move(model);
          return verdict;
        }
      }
      // Infeasible or inconclusive: fall through to phase-1, which owns the
      // margin and the certificate.
    }

    Phase1Simplex<ReducedSystem> simplex(red, tol);
    SimplexResult res = simplex.run();
    if (res.status == SimplexResult::Status::kIterLimit)
      fail(Errc::solver_failure, "simplex iteration limit exceeded");
    if (res.status == SimplexResult::Status::kNumeric)
      fail(Errc::solver_failure, "simplex lost numerical stability");
    verdict.iterations = res.iterations;
    verdict.margin = res.objective;
    if (res.objective > tol) {
      verdict.kind = VerdictKind::NONLOCAL;
      verdict.certificate = lift_certificate(red, lp, res.y);
      check_certificate(lp, verdict.certificate);
    } else {
      verdict.kind = VerdictKind::LOCAL;
      check_local_model(lp, res.basic_structural, tol, verdict.model);
    }
    return verdict;
  }

  FullSystem full(lp);
  Phase1Simplex<FullSystem> simplex(full, tol);
  SimplexResult res = simplex.run();
  if (res.status == SimplexResult::Status::kIterLimit)
    fail(Errc::solver_failure, "simplex iteration limit exceeded");
  if (res.status == SimplexResult::Status::kNumeric)
    fail(Errc::solver_failure, "simplex lost numerical stability");
  verdict.iterations = res.iterations;
  verdict.margin = res.objective;
  if (res.objective > tol) {
    verdict.kind = VerdictKind::NONLOCAL;
    verdict.certificate = res.y;
    check_certificate(lp, verdict.certificate);
  } else {
    verdict.kind = VerdictKind::LOCAL;
    check_local_model(lp, res.basic_structural, tol, verdict.model);
  }
  return verdict;
}

BellFunctional extract_bell_functional(const Verdict& verdict,
                                       const LocalProgram& lp) {
  if (verdict.kind != VerdictKind::NONLOCAL || verdict.certificate.empty())
    fail(Errc::invalid_argument,
         "Bell functional extraction needs a NONLOCAL verdict");
  BellFunctional bell;
  bell.coefficients.assign(verdict.certificate.begin(),
                           verdict.certificate.end() - 1);
  FullSystem full(lp);
  std::vector<std::int32_t> buf;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t sigma = 0; sigma < full.vars(); ++sigma) {
    full.support(sigma, buf);
    double acc = 0.0;
    for (std::int32_t row : buf)
      if (row < lp.num_marginal_rows()) acc += bell.coefficients[row];
    best = std::max(best, acc);
  }
  bell.local_bound = best;
  double value = 0.0;
  for (std::int64_t row = 0; row < lp.num_marginal_rows(); ++row)
    value += bell.coefficients[row] * lp.rhs(row);
  bell.quantum_value = value;
  return bell;
}

double chsh_max_violation(const Behavior& behavior) {
  if (behavior.num_parties() != 2 || behavior.local_dim != 2 ||
      behavior.settings != std::vector<int>{2, 2})
    fail(Errc::invalid_argument, "CHSH oracle needs the 2x2 qubit scenario");
  double corr[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double e = 0.0;
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          e += ((r + s) % 2 ? -1.0 : 1.0) * behavior.value(2 * i + j, 2 * r + s);
      corr[i][j] = e;
    }
  double worst = 0.0;
  for (int p = 0; p < 4; ++p) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q)
      s += (q == p ? -1.0 : 1.0) * corr[q / 2][q % 2];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

VerdictKind chsh_oracle(const Behavior& behavior) {
  return chsh_max_violation(behavior) > 2.0 + 1e-9 ? VerdictKind::NONLOCAL
                                                   : VerdictKind::LOCAL;
}

// --- vertex membership via Wolfe's min-norm-point algorithm ---------------

VerdictKind vertex_membership_oracle(const Behavior& behavior,
                                     const Scenario& scenario,
                                     double distance_tol) {
  if (behavior.local_dim != scenario.local_dim() ||
      behavior.settings != scenario.settings())
    fail(Errc::invalid_argument, "behavior does not match scenario");
  const std::uint64_t num_vertices = scenario.num_strategies();
  if (num_vertices > 10000)
    fail(Errc::cap_exceeded, "membership oracle limited to 1e4 strategies");
  const int n = scenario.num_parties();
  const int d = scenario.local_dim();
  const std::int64_t dim =
      scenario.num_setting_tuples() * scenario.num_outcome_tuples();
  if (dim * static_cast<std::int64_t>(num_vertices) > 8'000'000)
    fail(Errc::cap_exceeded, "membership oracle instance too large");

  // Deterministic behaviors, assembled with party 0 and setting 0 least
  // significant (deliberately unlike the LP assembly).
  std::vector<std::uint64_t> party_size(n), party_stride(n);
  std::vector<std::uint64_t> dpow(n, 1);  // d^j lookup up to max settings
  int max_settings = 0;
  for (int i = 0; i < n; ++i) max_settings = std::max(max_settings, scenario.settings_for(i));
  dpow.assign(max_settings, 1);
  for (int j = 1; j < max_settings; ++j) dpow[j] = dpow[j - 1] * d;
  for (int i = 0; i < n; ++i) {
    std::uint64_t sz = 1;
    for (int j = 0; j < scenario.settings_for(i); ++j) sz *= d;
    party_size[i] = sz;
    party_stride[i] = i == 0 ? 1 : party_stride[i - 1] * party_size[i - 1];
  }
  Eigen::MatrixXd verts =
      Eigen::MatrixXd::Zero(dim, static_cast<Eigen::Index>(num_vertices));
  const std::int64_t dn = scenario.num_outcome_tuples();
  std::vector<int> k(n);
  for (std::uint64_t v = 0; v < num_vertices; ++v) {
    for (std::int64_t k_idx = 0; k_idx < scenario.num_setting_tuples(); ++k_idx) {
      std::int64_t rem_k = k_idx;
      for (int i = n - 1; i >= 0; --i) {
        k[i] = static_cast<int>(rem_k % scenario.settings_for(i));
        rem_k /= scenario.settings_for(i);
      }
      // Outcome index in the behavior's own (party 0 most significant)
      // layout.
      std::int64_t r_idx = 0;
      for (int i = 0; i < n; ++i) {
        const std::uint64_t code = (v / party_stride[i]) % party_size[i];
        const int outcome = static_cast<int>((code / dpow[k[i]]) % d);
        r_idx = r_idx * d + outcome;
      }
      verts(k_idx * dn + r_idx, static_cast<Eigen::Index>(v)) = 1.0;
    }
  }

  Eigen::VectorXd target(dim);
  for (std::int64_t i = 0; i < dim; ++i) target[i] = behavior.table[i];

  // Wolfe (1976): minimize |x| over the convex hull of {vert_j - target}.
  const auto q_col = [&](Eigen::Index j) -> Eigen::VectorXd {
    return verts.col(j) - target;
  };
  double scale = 0.0;
  // Start from the nearest vertex.
  Eigen::Index start = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < verts.cols(); ++j) {
    const double nrm = q_col(j).squaredNorm();
    scale = std::max(scale, nrm);
    if (nrm < best_norm - 1e-15) {
      best_norm = nrm;
      start = j;
    }
  }
  std::vector<Eigen::Index> corral{start};
  Eigen::MatrixXd q(dim, 1);
  q.col(0) = q_col(start);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = q.col(0);

  const double stop_eps = 1e-12 * (1.0 + scale);
  const int major_cap = 1000 + 40 * static_cast<int>(dim);
  double prev_sq = std::numeric_limits<double>::infinity();
  for (int major = 0; major < major_cap; ++major) {
    if (x.squaredNorm() > prev_sq - 1e-17) {
      if (major > 0) break;  // stalled; act on the current point
    }
    prev_sq = x.squaredNorm();
    // Linear minimization over all vertices.
    Eigen::VectorXd dots = verts.transpose() * x;
    const double xb = x.dot(target);
    Eigen::Index addend = 0;
    double min_dot = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < dots.size(); ++j) {
      if (dots[j] < min_dot - 1e-15) {
        min_dot = dots[j];
        addend = j;
      }
    }
    if (x.squaredNorm() - (min_dot - xb) <= stop_eps)
      break;  // no vertex improves: x is the min-norm point
    if (std::find(corral.begin(), corral.end(), addend) != corral.end())
      break;  // numerically stalled; x is as good as it gets
    corral.push_back(addend);
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = q_col(addend);
    weights.conservativeResize(weights.size() + 1);
    weights[weights.size() - 1] = 0.0;

    // Minor cycle: step to the affine min-norm point, dropping vertices
    // whose weight would turn negative.
    for (int minor = 0; minor < 4 * static_cast<int>(dim) + 16; ++minor) {
      const Eigen::Index s = q.cols();
      Eigen::MatrixXd kkt(s + 1, s + 1);
      kkt.topLeftCorner(s, s) = q.transpose() * q;
      kkt.topRightCorner(s, 1).setOnes();
      kkt.bottomLeftCorner(1, s).setOnes();
      kkt(s, s) = 0.0;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs[s] = 1.0;
      Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      Eigen::VectorXd alpha = sol.head(s);
      if ((alpha.array() > 1e-12).all()) {
        weights = alpha;
        x = q * weights;
        break;
      }
      // Line search toward alpha until the first weight hits zero.
      double theta = 1.0;
      for (Eigen::Index i = 0; i < s; ++i) {
        if (alpha[i] <= 1e-12 && weights[i] > alpha[i]) {
          theta = std::min(theta, weights[i] / (weights[i] - alpha[i]));
        }
      }
      weights = (1.0 - theta) * weights + theta * alpha;
      // Remove dropped vertices.
      Eigen::Index keep = 0;
      for (Eigen::Index i = 0; i < s; ++i) {
        if (weights[i] > 1e-12) {
          weights[keep] = weights[i];
          q.col(keep) = q.col(i);
          corral[keep] = corral[i];
          ++keep;
        }
      }
      if (keep == 0) fail(Errc::solver_failure, "membership oracle collapsed");
      weights.conservativeResize(keep);
      q.conservativeResize(Eigen::NoChange, keep);
      corral.resize(keep);
      x = q * weights;
    }
  }
  return x.norm() <= distance_tol ? VerdictKind::LOCAL : VerdictKind::NONLOCAL;
}

}  // namespace pvbell
