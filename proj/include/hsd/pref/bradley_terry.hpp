#pragma once

// Bradley-Terry fitting of forced-choice vote tables by minorization-
// maximization (Hunter, "MM algorithms for generalized Bradley-Terry models",
// Ann. Statist. 32(1), 2004), with likelihood-ratio significance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hsd/errors.hpp"

namespace hsd::pref {

/// wins[i][j] = number of votes preferring method i over method j.
struct PairwiseVoteTable {
  std::vector<std::string> methods;
  std::vector<std::vector<std::int64_t>> wins;

  std::size_t size() const { return methods.size(); }

  std::int64_t comparisons(std::size_t i, std::size_t j) const { return wins[i][j] + wins[j][i]; }

  void validate() const {
    const auto m = methods.size();
    if (m < 2) throw ConfigError("a vote table needs at least two methods");
    if (wins.size() != m) throw ShapeError("win matrix must be M x M");
    for (std::size_t i = 0; i < m; ++i) {
      if (wins[i].size() != m) throw ShapeError("win matrix must be M x M");
      if (wins[i][i] != 0) throw ConfigError("win matrix diagonal must be zero");
      for (auto w : wins[i])
        if (w < 0) throw ConfigError("win counts must be non-negative");
    }
  }
};

struct BradleyTerryOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

struct BradleyTerryFit {
  std::vector<double> pi;  // positive, sums to 1
  int iterations = 0;
  double log_likelihood = 0.0;
};

/// Sum over ordered pairs of wins[i][j] * log(pi_i / (pi_i + pi_j)).
inline double log_likelihood(const PairwiseVoteTable& table, const std::vector<double>& pi) {
  double ll = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table.size(); ++j)
      if (i != j && table.wins[i][j] > 0)
        ll += static_cast<double>(table.wins[i][j]) * std::log(pi[i] / (pi[i] + pi[j]));
  return ll;
}

namespace detail {

inline std::vector<bool> reachable(const PairwiseVoteTable& t, std::size_t start, bool directed) {
  std::vector<bool> seen(t.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < t.size(); ++j) {
      const bool edge = directed ? t.wins[i][j] > 0 : t.comparisons(i, j) > 0;
      if (!seen[j] && edge) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

// Existence of a finite, unique MLE: comparison graph connected and the
// "beats" digraph strongly connected.
inline void check_estimable(const PairwiseVoteTable& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::int64_t won = 0, lost = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      won += t.wins[i][j];
      lost += t.wins[j][i];
    }
    if (won == 0 && lost == 0) {
      throw EstimationError("method '" + t.methods[i] + "' has no comparisons");
    }
  }
  const auto undirected = reachable(t, 0, false);
  if (std::find(undirected.begin(), undirected.end(), false) != undirected.end()) {
    throw EstimationError("comparison graph is disconnected");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::int64_t won = 0, lost = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      won += t.wins[i][j];
      lost += t.wins[j][i];
    }
    if (lost == 0) {
      throw DivergenceError("method '" + t.methods[i] +
                            "' won every comparison; its preference scale diverges");
    }
    if (won == 0) {
      throw DivergenceError("method '" + t.methods[i] +
                            "' lost every comparison; its preference scale collapses to zero");
    }
  }
  // Strong connectivity: every node reaches every other along "beats" edges.
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto seen = reachable(t, i, true);
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (!seen[j]) {
        throw DivergenceError("method '" + t.methods[i] + "' never beats, directly or " +
                              "transitively, method '" + t.methods[j] + "'; the MLE is unbounded");
      }
    }
  }
}

// MM iteration where methods sharing a group id are tied to one scale.
// Comparisons inside a group carry no information about the tied scale and
// are skipped.
inline std::vector<double> fit_grouped(const PairwiseVoteTable& t, const std::vector<std::size_t>& group,
                                       std::size_t group_count, const BradleyTerryOptions& opt,
                                       int* iterations) {
  const auto m = t.size();
  std::vector<double> scale(group_count, 1.0 / static_cast<double>(group_count));
  std::vector<double> group_wins(group_count, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (group[i] != group[j]) group_wins[group[i]] += static_cast<double>(t.wins[i][j]);

  std::vector<double> next(group_count);
  for (int it = 1; it <= opt.max_iter; ++it) {
    for (std::size_t g = 0; g < group_count; ++g) {
      double denom = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (group[i] != g) continue;
        for (std::size_t j = 0; j < m; ++j) {
          if (group[j] == g) continue;
          const auto n = t.comparisons(i, j);
          if (n > 0) denom += static_cast<double>(n) / (scale[g] + scale[group[j]]);
        }
      }
      next[g] = denom > 0.0 ? group_wins[g] / denom : scale[g];
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t g = 0; g < group_count; ++g) {
      next[g] /= total;
      change = std::max(change, std::abs(next[g] - scale[g]) / scale[g]);
    }
    scale.swap(next);
    if (change < opt.tol) {
      if (iterations) *iterations = it;
      std::vector<double> pi(m);
      for (std::size_t i = 0; i < m; ++i) pi[i] = scale[group[i]];
      const double s = std::accumulate(pi.begin(), pi.end(), 0.0);
      for (auto& p : pi) p /= s;
      return pi;
    }
  }
  throw IterationLimitError("Bradley-Terry MM did not converge within " +
                            std::to_string(opt.max_iter) + " iterations");
}

}  // namespace detail

/// Maximum-likelihood preference scales under P(i beats j) = pi_i / (pi_i + pi_j).
inline BradleyTerryFit fit_bradley_terry(const PairwiseVoteTable& table,
                                         const BradleyTerryOptions& opt = {}) {
  table.validate();
  detail::check_estimable(table);
  std::vector<std::size_t> group(table.size());
  std::iota(group.begin(), group.end(), std::size_t{0});
  BradleyTerryFit fit;
  fit.pi = detail::fit_grouped(table, group, table.size(), opt, &fit.iterations);
  fit.log_likelihood = log_likelihood(table, fit.pi);
  return fit;
}

inline double preference_ratio(const std::vector<double>& pi, std::size_t i, std::size_t j) {
  return pi.at(i) / pi.at(j);
}

/// Upper tail of the chi-squared distribution with one degree of freedom.
inline double chi2_1dof_sf(double stat) {
  return stat <= 0.0 ? 1.0 : std::erfc(std::sqrt(0.5 * stat));
}

/// Likelihood-ratio p-values for H0: pi_i == pi_j against the fitted model,
/// chi-squared with one degree of freedom. Symmetric, diagonal 1.
inline std::vector<std::vector<double>> significance_test(const PairwiseVoteTable& table,
                                                          const BradleyTerryFit& fit,
                                                          const BradleyTerryOptions& opt = {}) {
  const auto m = table.size();
  std::vector<std::vector<double>> p(m, std::vector<double>(m, 1.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      std::vector<std::size_t> group(m);
      std::size_t next_id = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == b) continue;
        group[i] = next_id++;
      }
      group[b] = group[a];
      const auto tied = detail::fit_grouped(table, group, next_id, opt, nullptr);
      const double stat = 2.0 * (fit.log_likelihood - log_likelihood(table, tied));
      p[a][b] = p[b][a] = chi2_1dof_sf(std::max(0.0, stat));
    }
  }
  return p;
}

/// Reads `method_a,method_b,wins_a,wins_b` rows (header optional). Methods are
/// numbered in order of first appearance; repeated pairs accumulate.
inline PairwiseVoteTable parse_vote_csv(std::istream& in) {
  PairwiseVoteTable table;
  std::map<std::string, std::size_t> index;
  auto id = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, table.methods.size());
    if (inserted) {
      table.methods.push_back(name);
      for (auto& row : table.wins) row.push_back(0);
      table.wins.emplace_back(table.methods.size(), 0);
    }
    return it->second;
  };
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 4) {
      throw ConfigError("vote CSV line " + std::to_string(lineno) + " needs 4 columns");
    }
    if (lineno == 1 && cells[0] == "method_a") continue;
    std::int64_t wa = 0, wb = 0;
    try {
      wa = std::stoll(cells[2]);
      wb = std::stoll(cells[3]);
    } catch (const std::exception&) {
      throw ConfigError("vote CSV line " + std::to_string(lineno) + " has non-integer counts");
    }
    if (cells[0] == cells[1]) {
      throw ConfigError("vote CSV line " + std::to_string(lineno) + " compares a method to itself");
    }
    const auto a = id(cells[0]);
    const auto b = id(cells[1]);
    table.wins[a][b] += wa;
    table.wins[b][a] += wb;
  }
  table.validate();
  return table;
}

}  // namespace hsd::pref
