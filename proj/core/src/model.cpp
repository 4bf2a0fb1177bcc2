#include "gbdp/model.hpp"

#include <cmath>
#include <limits>

#include "gbdp/errors.hpp"

namespace gbdp {

namespace {

void validate_rates(const std::vector<double>& v, const char* what) {
  for (double r : v) {
    if (!std::isfinite(r) || r < 0.0)
      throw domain_error(std::string(what) + " rates must be finite and nonnegative");
  }
}

}  // namespace

ModelSpec ModelSpec::linear(std::vector<double> lambda, std::vector<double> mu) {
  validate_rates(lambda, "birth");
  validate_rates(mu, "death");
  if (lambda.empty() && mu.empty())
    throw domain_error("model needs at least one event size");
  ModelSpec s;
  s.variant_ = Variant::Linear;
  s.lambda_ = std::move(lambda);
  s.mu_ = std::move(mu);
  return s;
}

ModelSpec ModelSpec::constant(std::vector<double> lambda, std::vector<double> mu) {
  ModelSpec s = linear(std::move(lambda), std::move(mu));
  s.variant_ = Variant::Constant;
  return s;
}

ModelSpec ModelSpec::immigration_at_zero(std::vector<double> lambda,
                                         std::vector<double> mu, double nu) {
  if (!std::isfinite(nu) || nu < 0.0)
    throw domain_error("immigration rate nu must be finite and nonnegative");
  if (lambda.empty())
    throw domain_error("immigration variants need at least one birth size");
  ModelSpec s = linear(std::move(lambda), std::move(mu));
  s.variant_ = Variant::ImmigrationAtZero;
  s.nu_ = nu;
  return s;
}

ModelSpec ModelSpec::immigration_everywhere(std::vector<double> lambda,
                                            std::vector<double> mu, double nu) {
  ModelSpec s = immigration_at_zero(std::move(lambda), std::move(mu), nu);
  s.variant_ = Variant::ImmigrationEverywhere;
  return s;
}

ModelSpec ModelSpec::parking(State K, std::vector<double> lambda,
                             std::vector<double> mu) {
  validate_rates(lambda, "arrival");
  validate_rates(mu, "departure");
  if (K < 1) throw domain_error("parking capacity K must be positive");
  if (lambda.empty() || mu.empty())
    throw domain_error("parking needs K1 >= 1 and K2 >= 1");
  if (static_cast<State>(lambda.size()) >= K ||
      static_cast<State>(mu.size()) >= K)
    throw domain_error("parking requires K1 < K and K2 < K");
  ModelSpec s;
  s.variant_ = Variant::Parking;
  s.lambda_ = std::move(lambda);
  s.mu_ = std::move(mu);
  s.capacity_.K = K;
  s.capacity_.K1 = static_cast<int>(s.lambda_.size());
  s.capacity_.K2 = static_cast<int>(s.mu_.size());
  return s;
}

ModelSpec ModelSpec::general_table(const std::vector<TableEntry>& entries) {
  ModelSpec s;
  s.variant_ = Variant::GeneralTable;
  for (const TableEntry& e : entries) {
    if (e.n < 0) throw domain_error("table state must be nonnegative");
    if (e.size < 1) throw domain_error("table event size must be positive");
    if (!std::isfinite(e.rate) || e.rate < 0.0)
      throw domain_error("table rates must be finite and nonnegative");
    if (e.kind == EventKind::Death && e.size > e.n)
      throw domain_error("table death size exceeds state");
    int& k = (e.kind == EventKind::Birth) ? s.table_k1_ : s.table_k2_;
    if (e.size > k) k = e.size;
    s.table_[{e.n, e.size, e.kind == EventKind::Birth ? 0 : 1}] += e.rate;
  }
  return s;
}

int ModelSpec::k1() const {
  return variant_ == Variant::GeneralTable ? table_k1_
                                           : static_cast<int>(lambda_.size());
}

int ModelSpec::k2() const {
  return variant_ == Variant::GeneralTable ? table_k2_
                                           : static_cast<int>(mu_.size());
}

void ModelSpec::check_state(State n) const {
  if (n < 0) throw domain_error("state must be nonnegative");
  if (max_state() >= 0 && n > max_state())
    throw domain_error("state exceeds parking capacity K");
}

double ModelSpec::birth_rate(State n, int i) const {
  check_state(n);
  if (i < 1 || i > k1()) throw domain_error("birth size out of range");
  double rate = 0.0;
  switch (variant_) {
    case Variant::Linear:
      rate = static_cast<double>(n) * lambda_[i - 1];
      break;
    case Variant::Constant:
      rate = lambda_[i - 1];
      break;
    case Variant::ImmigrationAtZero:
      rate = (n == 0) ? nu_ : static_cast<double>(n) * lambda_[i - 1];
      break;
    case Variant::ImmigrationEverywhere:
      rate = nu_ + static_cast<double>(n) * lambda_[i - 1];
      break;
    case Variant::Parking:
      rate = static_cast<double>(capacity_.K - n) * lambda_[i - 1];
      break;
    case Variant::GeneralTable: {
      auto it = table_.find({n, i, 0});
      rate = (it == table_.end()) ? 0.0 : it->second;
      break;
    }
  }
  if (max_state() >= 0 && n + i > max_state()) return 0.0;
  return rate;
}

double ModelSpec::death_rate(State n, int j) const {
  check_state(n);
  if (j < 1 || j > k2()) throw domain_error("death size out of range");
  if (j > n) return 0.0;  // never below state 0
  switch (variant_) {
    case Variant::Linear:
    case Variant::ImmigrationAtZero:
    case Variant::ImmigrationEverywhere:
    case Variant::Parking:
      return static_cast<double>(n) * mu_[j - 1];
    case Variant::Constant:
      return mu_[j - 1];
    case Variant::GeneralTable: {
      auto it = table_.find({n, j, 1});
      return (it == table_.end()) ? 0.0 : it->second;
    }
  }
  return 0.0;
}

double ModelSpec::total_exit_rate(State n) const {
  check_state(n);
  double rho = 0.0;
  for (int i = 1; i <= k1(); ++i) rho += birth_rate(n, i);
  for (int j = 1; j <= k2(); ++j) rho += death_rate(n, j);
  return rho;
}

DerivedConstants derived_constants(const ModelSpec& spec) {
  if (spec.variant() == Variant::GeneralTable)
    throw domain_error("derived constants are undefined for table models");
  double s1 = 0, s2 = 0, m1 = 0, m2 = 0, sum_l = 0, sum_m = 0;
  const auto& lambda = spec.lambda();
  const auto& mu = spec.mu();
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double w = static_cast<double>(i + 1);
    sum_l += lambda[i];
    s1 += w * lambda[i];
    s2 += w * w * lambda[i];
  }
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double w = static_cast<double>(j + 1);
    sum_m += mu[j];
    m1 += w * mu[j];
    m2 += w * w * mu[j];
  }
  DerivedConstants c;
  c.eta = s1 - m1;
  c.zeta = s2 + m2;
  c.xi = s2 * m1 + s1 * m2;
  c.Lambda = sum_l + sum_m;
  c.beta = s1 + m1;
  return c;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::GeneralTable: return "table";
    case Variant::Linear: return "linear";
    case Variant::Constant: return "constant";
    case Variant::ImmigrationAtZero: return "immigration_zero";
    case Variant::ImmigrationEverywhere: return "immigration_all";
    case Variant::Parking: return "parking";
  }
  return "unknown";
}

}  // namespace gbdp
