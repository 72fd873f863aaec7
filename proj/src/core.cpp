#include "revpref/core.hpp"

#include <stdexcept>
#include <string>

namespace revpref {

double expenditure(const Observation& obs) {
  double e = 0.0;
  for (std::size_t k = 0; k < obs.prices.size(); ++k) {
    e += obs.prices[k] * obs.bundle[k];
  }
  return e;
}

namespace {

void check_row(const Observation& obs, std::size_t goods, std::size_t row) {
  const std::string where = " at row " + std::to_string(row);
  if (obs.prices.size() != goods || obs.bundle.size() != goods) {
    throw std::invalid_argument("dimension mismatch" + where);
  }
  for (double p : obs.prices) {
    if (!(p > 0.0)) throw std::invalid_argument("non-positive price" + where);
  }
  for (double x : obs.bundle) {
    if (x < 0.0) throw std::invalid_argument("negative quantity" + where);
  }
  if (!(expenditure(obs) > 0.0)) {
    throw std::invalid_argument("zero expenditure" + where);
  }
}

}  // namespace

ChoiceDataset make_dataset(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& rows,
    std::string label) {
  if (rows.empty()) throw std::invalid_argument("make_dataset: empty dataset");
  ChoiceDataset ds;
  ds.label = std::move(label);
  ds.observations.reserve(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    Observation obs;
    obs.obs_id = std::to_string(t + 1);
    obs.prices = rows[t].first;
    obs.bundle = rows[t].second;
    ds.observations.push_back(std::move(obs));
  }
  validate_dataset(ds);
  return ds;
}

void validate_dataset(const ChoiceDataset& ds) {
  if (ds.observations.empty()) {
    throw std::invalid_argument("dataset must contain at least one observation");
  }
  const std::size_t goods = ds.observations.front().prices.size();
  if (goods == 0) throw std::invalid_argument("dimension mismatch at row 0");
  for (std::size_t t = 0; t < ds.observations.size(); ++t) {
    check_row(ds.observations[t], goods, t);
  }
}

std::vector<double> cross_cost_matrix(const ChoiceDataset& ds) {
  const std::size_t n = ds.rounds();
  const std::size_t k = ds.goods();
  std::vector<double> cross(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = ds.observations[i].prices;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& x = ds.observations[j].bundle;
      double s = 0.0;
      for (std::size_t g = 0; g < k; ++g) s += p[g] * x[g];
      cross[i * n + j] = s;
    }
  }
  return cross;
}

RelationMatrix direct_relations(const ChoiceDataset& ds, double e, double tol) {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw std::invalid_argument("efficiency level must lie in [0, 1]");
  }
  const std::size_t n = ds.rounds();
  const std::vector<double> cross = cross_cost_matrix(ds);
  RelationMatrix rel;
  rel.n = n;
  rel.efficiency = e;
  rel.weak.assign(n * n, 0);
  rel.strict.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double budget = e * cross[i * n + i];
    for (std::size_t j = 0; j < n; ++j) {
      const double cost = cross[i * n + j];
      rel.weak[i * n + j] = cost <= budget + tol ? 1 : 0;
      rel.strict[i * n + j] = cost < budget - tol ? 1 : 0;
    }
  }
  return rel;
}

RelationMatrix transitive_closure(RelationMatrix rel) {
  const std::size_t n = rel.n;
  std::vector<char> c = rel.weak;
  for (std::size_t i = 0; i < n; ++i) c[i * n + i] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!c[i * n + k]) continue;
      const char* row_k = &c[k * n];
      char* row_i = &c[i * n];
      for (std::size_t j = 0; j < n; ++j) {
        if (row_k[j]) row_i[j] = 1;
      }
    }
  }
  rel.closure = std::move(c);
  return rel;
}

}  // namespace revpref
