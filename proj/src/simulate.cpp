#include "ordcop/simulate.hpp"

#include "ordcop/errors.hpp"
#include "ordcop/parallel.hpp"
#include "ordcop/special.hpp"

namespace ordcop {

Eigen::VectorXd sample_link_copula(const CorrelationMatrix& R, const LinkCopula& link, std::mt19937_64& rng) {
  const auto d = R.dim();
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = nd(rng);
  const Eigen::MatrixXd L = R.matrix().llt().matrixL();
  z = L * z;
  Eigen::VectorXd u(d);
  if (link.kind == LinkKind::MVN) {
    for (Eigen::Index j = 0; j < d; ++j) u(j) = norm_cdf(z(j));
  } else {
    std::chi_squared_distribution<double> chi(link.nu);
    const double s = std::sqrt(chi(rng) / link.nu);
    for (Eigen::Index j = 0; j < d; ++j) u(j) = t_cdf(z(j) / s, link.nu);
  }
  return u;
}

Eigen::VectorXd sample_link_copula(const CorrelationMatrix& R, const LinkCopula& link, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_link_copula(R, link, rng);
}

void validate(const SimDesign& design) {
  if (design.n < 1 || design.T < 1) throw DomainError("simulate: n and T must be positive");
  validate(design.jp);
  const int d = design.jp.d();
  if (!design.responses.empty() && static_cast<int>(design.responses.size()) != d)
    throw DomainError("simulate: response names do not match d");
  if (static_cast<int>(design.series_columns.size()) != d)
    throw DomainError("simulate: need one covariate index list per response");
  const auto ncol = static_cast<int>(design.columns.size());
  for (int j = 0; j < d; ++j) {
    if (static_cast<Eigen::Index>(design.series_columns[j].size()) != design.jp.series[j].marginal.beta.size())
      throw DomainError("simulate: covariate list of response " + std::to_string(j + 1) + " does not match beta");
    for (int c : design.series_columns[j])
      if (c < 0 || c >= ncol) throw DomainError("simulate: covariate index out of range");
  }
  if (!design.fixed_rows.empty()) {
    if (static_cast<int>(design.fixed_rows.size()) != design.T)
      throw DomainError("simulate: fixed design needs one row per wave");
    for (const auto& r : design.fixed_rows)
      if (r.size() != ncol) throw DomainError("simulate: fixed design row has the wrong width");
  }
}

namespace {

Subject simulate_subject(const SimDesign& design, std::size_t i, const OrdinalPanel& shape) {
  std::seed_seq seq{static_cast<std::uint32_t>(design.seed), static_cast<std::uint32_t>(design.seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32),
                    0x5eedu};
  std::mt19937_64 rng(seq);
  const JointParams& jp = design.jp;
  const int d = jp.d();
  const auto ncol = static_cast<Eigen::Index>(design.columns.size());

  Subject s;
  s.id = std::to_string(i + 1);
  Eigen::VectorXd fixed_draw(ncol);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  auto draw = [&](const CovariateColumn& c) {
    switch (c.kind) {
      case CovariateKind::Normal:
        return nd(rng);
      case CovariateKind::Bernoulli:
        return ud(rng) < c.param ? 1.0 : 0.0;
      case CovariateKind::Constant:
        return c.param;
    }
    return 0.0;
  };
  if (design.fixed_rows.empty())
    for (Eigen::Index c = 0; c < ncol; ++c)
      if (!design.columns[c].time_varying) fixed_draw(c) = draw(design.columns[c]);

  std::vector<CdfPair> prev(d);
  for (int t = 0; t < design.T; ++t) {
    Record rec;
    rec.time = t + 1;
    if (!design.fixed_rows.empty()) {
      rec.z = design.fixed_rows[t];
    } else {
      rec.z.resize(ncol);
      for (Eigen::Index c = 0; c < ncol; ++c)
        rec.z(c) = design.columns[c].time_varying ? draw(design.columns[c]) : fixed_draw(c);
    }
    rec.x.resize(d);
    for (int j = 0; j < d; ++j) {
      const auto& cols = shape.series_columns[j];
      rec.x[j].resize(static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) rec.x[j](k) = rec.z(cols[k]);
    }
    const Eigen::VectorXd u = sample_link_copula(jp.R, jp.link, rng);
    rec.y.resize(d);
    for (int j = 0; j < d; ++j) {
      const auto& m = jp.series[j];
      const int K = m.marginal.K();
      const double eta = eta_of(m.marginal, rec.x[j]);
      int y;
      if (t == 0) {
        y = inverse_category(K, u(j), [&](int k) { return ordinal_bounds(m.marginal, k, eta).hi; });
      } else {
        y = inverse_category(K, u(j), [&](int k) {
          return transition_bounds(m.temporal, prev[j], ordinal_bounds(m.marginal, k, eta)).hi;
        });
      }
      rec.y[j] = y;
      prev[j] = ordinal_bounds(m.marginal, y, eta);
    }
    s.records.push_back(std::move(rec));
  }
  return s;
}

}  // namespace

OrdinalPanel simulate_panel(const SimDesign& design, int threads) {
  validate(design);
  const int d = design.jp.d();
  OrdinalPanel panel;
  for (int j = 0; j < d; ++j) {
    panel.responses.push_back(design.responses.empty() ? "y" + std::to_string(j + 1) : design.responses[j]);
    panel.K.push_back(design.jp.series[j].marginal.K());
  }
  for (const auto& c : design.columns) panel.covariates.push_back(c.name);
  panel.series_columns = design.series_columns;
  panel.subjects.resize(static_cast<std::size_t>(design.n));
  parallel_for(panel.subjects.size(), threads,
               [&](std::size_t i) { panel.subjects[i] = simulate_subject(design, i, panel); });
  return panel;
}

}  // namespace ordcop
