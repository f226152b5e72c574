#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>

#include "ordcop/special.hpp"

namespace ordcop::detail {
namespace {

constexpr std::size_t kMaxCandidates = 2048;

struct CbcState {
  std::vector<std::uint32_t> z;
  std::vector<double> product;  // running product over chosen dimensions, per point
};

double weight(int j) { return 1.0 / ((j + 1.0) * (j + 1.0)); }

void extend(CbcState& st, int n, int dim) {
  std::vector<double> omega(n);
  for (int m = 0; m < n; ++m) {
    const double x = static_cast<double>(m) / n;
    omega[m] = 2.0 * std::numbers::pi * std::numbers::pi * (x * x - x + 1.0 / 6.0);
  }
  if (st.z.empty()) {
    st.product.assign(n, 1.0);
    st.z.push_back(1);
    for (int k = 0; k < n; ++k) st.product[k] *= 1.0 + weight(0) * omega[k];
  }
  std::vector<std::uint32_t> candidates;
  for (int c = 1; c <= std::max(1, n / 2); ++c)
    if (std::gcd(c, n) == 1) candidates.push_back(static_cast<std::uint32_t>(c));
  if (candidates.size() > kMaxCandidates) {
    std::vector<std::uint32_t> thinned;
    const double stride = static_cast<double>(candidates.size()) / kMaxCandidates;
    for (std::size_t i = 0; i < kMaxCandidates; ++i)
      thinned.push_back(candidates[static_cast<std::size_t>(i * stride)]);
    candidates.swap(thinned);
  }
  while (static_cast<int>(st.z.size()) < dim) {
    const int j = static_cast<int>(st.z.size());
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_z = 1;
    for (std::uint32_t c : candidates) {
      double sum = 0.0;
      std::uint64_t m = 0;
      for (int k = 0; k < n; ++k) {
        sum += st.product[k] * omega[m];
        m += c;
        if (m >= static_cast<std::uint64_t>(n)) m -= n;
      }
      if (sum < best) {
        best = sum;
        best_z = c;
      }
    }
    st.z.push_back(best_z);
    std::uint64_t m = 0;
    for (int k = 0; k < n; ++k) {
      st.product[k] *= 1.0 + weight(j) * omega[m];
      m += best_z;
      if (m >= static_cast<std::uint64_t>(n)) m -= n;
    }
  }
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::vector<std::uint32_t> generating_vector(int n, int dim) {
  static std::map<int, CbcState> states;
  std::lock_guard lock(cache_mutex());
  CbcState& st = states[n];
  if (static_cast<int>(st.z.size()) < dim) extend(st, n, dim);
  return {st.z.begin(), st.z.begin() + dim};
}

std::shared_ptr<const PointSet> point_set(const QmcConfig& cfg, int dim) {
  using Key = std::tuple<std::uint64_t, int, int, int>;
  static std::map<Key, std::shared_ptr<const PointSet>> cache;
  const Key key{cfg.seed, cfg.shifts, cfg.points_per_shift, dim};
  {
    std::lock_guard lock(cache_mutex());
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const int n = cfg.points_per_shift;
  const auto z = generating_vector(n, std::max(dim, 1));
  auto ps = std::make_shared<PointSet>();
  ps->shifts = cfg.shifts;
  ps->points = n;
  ps->dim = dim;
  ps->values.resize(static_cast<std::size_t>(cfg.shifts) * n * dim);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < cfg.shifts; ++s) {
    // Shift s depends only on (seed, s), so lower dimensions see a prefix of the same shift.
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s), 0x51a7u};
    std::mt19937_64 rng(seq);
    std::vector<double> shift(dim);
    for (auto& v : shift) v = unif(rng);
    for (int k = 0; k < n; ++k) {
      double* p = ps->values.data() + (static_cast<std::size_t>(s) * n + k) * dim;
      for (int j = 0; j < dim; ++j) {
        const double x = static_cast<double>((static_cast<std::uint64_t>(k) * z[j]) % n) / n + shift[j];
        const double frac = x - std::floor(x);
        p[j] = 1.0 - std::abs(2.0 * frac - 1.0);
      }
    }
  }
  std::lock_guard lock(cache_mutex());
  return cache.emplace(key, std::move(ps)).first->second;
}

std::shared_ptr<const std::vector<double>> radial_values(const QmcConfig& cfg, int dim, double nu) {
  using Key = std::tuple<std::uint64_t, int, int, int, double>;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  const Key key{cfg.seed, cfg.shifts, cfg.points_per_shift, dim, nu};
  {
    std::lock_guard lock(cache_mutex());
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto ps = point_set(cfg, dim);
  auto out = std::make_shared<std::vector<double>>(2 * static_cast<std::size_t>(ps->shifts) * ps->points);
  for (int s = 0; s < ps->shifts; ++s) {
    for (int k = 0; k < ps->points; ++k) {
      const double w = std::clamp(ps->point(s, k)[0], std::numeric_limits<double>::min(),
                                  std::nextafter(1.0, 0.0));
      const std::size_t idx = 2 * (static_cast<std::size_t>(s) * ps->points + k);
      (*out)[idx] = std::sqrt(chisq_quantile(w, nu) / nu);
      (*out)[idx + 1] = std::sqrt(chisq_quantile(1.0 - w, nu) / nu);
    }
  }
  std::lock_guard lock(cache_mutex());
  return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace ordcop::detail
