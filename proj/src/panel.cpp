#include "ordcop/panel.hpp"

#include "ordcop/errors.hpp"

namespace ordcop {

std::size_t OrdinalPanel::observations() const {
  std::size_t n = 0;
  for (const auto& s : subjects) n += s.records.size();
  return n;
}

void OrdinalPanel::build_design() {
  for (auto& s : subjects) {
    for (auto& rec : s.records) {
      rec.x.assign(responses.size(), Eigen::VectorXd());
      for (std::size_t j = 0; j < responses.size(); ++j) {
        const auto& cols = series_columns[j];
        rec.x[j].resize(static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) rec.x[j](c) = rec.z(cols[c]);
      }
    }
  }
}

void OrdinalPanel::validate() const {
  const std::size_t dd = responses.size();
  if (dd == 0) throw ValidationError("panel has no responses");
  if (K.size() != dd || series_columns.size() != dd)
    throw ValidationError("panel: K and series_columns must have one entry per response");
  for (std::size_t j = 0; j < dd; ++j) {
    if (K[j] < 2) throw ValidationError("response " + responses[j] + ": K must be >= 2");
    for (int c : series_columns[j])
      if (c < 0 || c >= static_cast<int>(covariates.size()))
        throw ValidationError("response " + responses[j] + ": covariate index out of range");
  }
  for (const auto& s : subjects) {
    if (s.records.empty()) throw ValidationError("subject " + s.id + " has no records");
    for (std::size_t r = 0; r < s.records.size(); ++r) {
      const auto& rec = s.records[r];
      const std::string where = "subject " + s.id + ", time " + std::to_string(rec.time);
      if (r > 0 && rec.time <= s.records[r - 1].time)
        throw ValidationError(where + ": times must be strictly increasing");
      if (rec.y.size() != dd) throw ValidationError(where + ": wrong number of responses");
      if (rec.z.size() != static_cast<Eigen::Index>(covariates.size()))
        throw ValidationError(where + ": wrong number of covariates");
      if (rec.x.size() != dd) throw ValidationError(where + ": design not built");
      for (std::size_t j = 0; j < dd; ++j) {
        if (rec.y[j] != kMissing && (rec.y[j] < 1 || rec.y[j] > K[j]))
          throw ValidationError(where + ": category " + std::to_string(rec.y[j]) + " of " + responses[j] +
                                " outside 1.." + std::to_string(K[j]));
        if (rec.x[j].size() != static_cast<Eigen::Index>(series_columns[j].size()))
          throw ValidationError(where + ": covariate arity mismatch for " + responses[j]);
        if (!rec.x[j].allFinite()) throw ValidationError(where + ": non-finite covariate");
      }
    }
  }
}

OrdinalPanel OrdinalPanel::subset(const std::vector<std::size_t>& keep) const {
  OrdinalPanel out;
  out.responses = responses;
  out.K = K;
  out.covariates = covariates;
  out.series_columns = series_columns;
  out.subjects.reserve(keep.size());
  for (std::size_t i : keep) out.subjects.push_back(subjects.at(i));
  return out;
}

bool OrdinalPanel::operator==(const OrdinalPanel& o) const {
  if (responses != o.responses || K != o.K || covariates != o.covariates ||
      series_columns != o.series_columns || subjects.size() != o.subjects.size())
    return false;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const auto& a = subjects[i];
    const auto& b = o.subjects[i];
    if (a.id != b.id || a.records.size() != b.records.size()) return false;
    for (std::size_t r = 0; r < a.records.size(); ++r) {
      const auto& ra = a.records[r];
      const auto& rb = b.records[r];
      if (ra.time != rb.time || ra.y != rb.y || ra.z != rb.z) return false;
    }
  }
  return true;
}

bool continues_chain(const Subject& s, std::size_t r, int j) {
  if (r == 0) return false;
  const auto& cur = s.records[r];
  const auto& prev = s.records[r - 1];
  return cur.time == prev.time + 1 && cur.y[j] != kMissing && prev.y[j] != kMissing;
}

}  // namespace ordcop
