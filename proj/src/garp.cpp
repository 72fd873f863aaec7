#include "revpref/garp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace revpref {

GarpReport check_garp(const ChoiceDataset& ds, double e, double tol) {
  const RelationMatrix rel = transitive_closure(direct_relations(ds, e, tol));
  const std::size_t n = rel.n;
  GarpReport report;
  report.efficiency = e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rel.closure_at(i, j) && rel.strict_at(j, i)) {
        report.violating_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  report.passes = report.violating_pairs.empty();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool mutual = rel.weak_at(i, j) && rel.weak_at(j, i);
      if (mutual && (rel.strict_at(i, j) || rel.strict_at(j, i))) {
        report.two_cycles.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return report;
}

bool garp_passes(const RelationMatrix& closed) {
  const std::size_t n = closed.n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && closed.closure_at(i, j) && closed.strict_at(j, i)) return false;
    }
  }
  return true;
}

std::vector<std::pair<int, int>> violation_two_cycles(const ChoiceDataset& ds, double tol) {
  const RelationMatrix rel = direct_relations(ds, 1.0, tol);
  std::vector<std::pair<int, int>> cycles;
  for (std::size_t i = 0; i < rel.n; ++i) {
    for (std::size_t j = i + 1; j < rel.n; ++j) {
      if (rel.weak_at(i, j) && rel.weak_at(j, i) &&
          (rel.strict_at(i, j) || rel.strict_at(j, i))) {
        cycles.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return cycles;
}

double pairwise_violation_proportion(const ChoiceDataset& ds,
                                     std::span<const int> group_a,
                                     std::span<const int> group_b, double tol) {
  if (group_a.empty() || group_b.empty()) {
    throw std::invalid_argument("pairwise_violation_proportion: empty group");
  }
  const int n = static_cast<int>(ds.rounds());
  for (int idx : group_a) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("group index out of range");
  }
  for (int idx : group_b) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("group index out of range");
  }

  const RelationMatrix rel = direct_relations(ds, 1.0, tol);
  auto pair_violates = [&](int i, int j) {
    return rel.weak_at(i, j) && rel.weak_at(j, i) &&
           (rel.strict_at(i, j) || rel.strict_at(j, i));
  };

  // Unordered pairs, so A == B counts each within-group pair once.
  std::set<std::pair<int, int>> pairs;
  for (int a : group_a) {
    for (int b : group_b) {
      if (a != b) pairs.emplace(std::min(a, b), std::max(a, b));
    }
  }
  if (pairs.empty()) throw std::invalid_argument("no cross pairs between groups");

  int violating = 0;
  for (const auto& [i, j] : pairs) {
    if (pair_violates(i, j)) ++violating;
  }
  return static_cast<double>(violating) / static_cast<double>(pairs.size());
}

std::string to_json_string(const GarpReport& report) {
  nlohmann::json j;
  j["passes"] = report.passes;
  j["efficiency"] = report.efficiency;
  auto pairs_to_json = [](const std::vector<std::pair<int, int>>& pairs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, b] : pairs) arr.push_back({a + 1, b + 1});
    return arr;
  };
  j["violating_pairs"] = pairs_to_json(report.violating_pairs);
  j["two_cycles"] = pairs_to_json(report.two_cycles);
  return j.dump();
}

}  // namespace revpref
