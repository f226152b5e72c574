#pragma once

// Long-format ordinal panel: subjects, each with time-ordered records of d
// responses (0 marks a missing value) and per-response covariate vectors.

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace ordcop {

inline constexpr int kMissing = 0;

struct Record {
  int time = 0;
  std::vector<int> y;               // categories 1..K_j, kMissing if unobserved
  Eigen::VectorXd z;                // raw covariate row (all declared columns)
  std::vector<Eigen::VectorXd> x;   // per-response covariates, selected from z
};

struct Subject {
  std::string id;
  std::vector<Record> records;
};

struct OrdinalPanel {
  std::vector<std::string> responses;               // d names
  std::vector<int> K;                               // categories per response
  std::vector<std::string> covariates;              // raw column names
  std::vector<std::vector<int>> series_columns;     // per response, indices into covariates
  std::vector<Subject> subjects;

  int d() const { return static_cast<int>(responses.size()); }
  std::size_t n() const { return subjects.size(); }
  std::size_t observations() const;

  // Rebuilds every Record::x from Record::z and series_columns.
  void build_design();

  // Throws ValidationError on any structural problem (ordering, ranges, arity).
  void validate() const;

  // Panel restricted to the given subject indices, in that order.
  OrdinalPanel subset(const std::vector<std::size_t>& keep) const;

  bool operator==(const OrdinalPanel& other) const;
};

// True when record r of a subject continues the chain of record r - 1 for a
// response: consecutive time and both values observed.
bool continues_chain(const Subject& s, std::size_t r, int j);

}  // namespace ordcop
