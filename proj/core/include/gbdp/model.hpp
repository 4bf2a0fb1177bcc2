#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace gbdp {

using State = std::int64_t;

enum class Variant {
  GeneralTable,
  Linear,
  Constant,
  ImmigrationAtZero,
  ImmigrationEverywhere,
  Parking,
};

enum class EventKind { Birth, Death };

struct EventDescriptor {
  EventKind kind;
  int size;
};

struct Capacity {
  State K = 0;
  int K1 = 0;
  int K2 = 0;
};

struct TableEntry {
  State n;
  EventKind kind;
  int size;
  double rate;
};

// Scalar constants derived from the rate vectors:
//   eta    = sum_i i*lambda_i - sum_j j*mu_j
//   zeta   = sum_i i^2*lambda_i + sum_j j^2*mu_j
//   xi     = sum_i i^2*lambda_i * sum_j j*mu_j + sum_i i*lambda_i * sum_j j^2*mu_j
//   Lambda = sum_i lambda_i + sum_j mu_j
//   beta   = sum_i i*lambda_i + sum_j j*mu_j
struct DerivedConstants {
  double eta;
  double zeta;
  double xi;
  double Lambda;
  double beta;
};

// Immutable rate law for one process variant. Construct through the factory
// functions; rate vectors are validated once and frozen, so a spec can be
// shared freely across threads.
//
// Event sizes with rate exactly 0 are allowed (gaps in {1..k}). A death of
// size j from state n < j, or a birth that would push a parking lot above K,
// has rate 0.
class ModelSpec {
 public:
  static ModelSpec linear(std::vector<double> lambda, std::vector<double> mu);
  static ModelSpec constant(std::vector<double> lambda, std::vector<double> mu);
  static ModelSpec immigration_at_zero(std::vector<double> lambda,
                                       std::vector<double> mu, double nu);
  static ModelSpec immigration_everywhere(std::vector<double> lambda,
                                          std::vector<double> mu, double nu);
  static ModelSpec parking(State K, std::vector<double> lambda,
                           std::vector<double> mu);
  static ModelSpec general_table(const std::vector<TableEntry>& entries);

  Variant variant() const { return variant_; }
  int k1() const;  // largest birth event size
  int k2() const;  // largest death event size
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& mu() const { return mu_; }
  double nu() const { return nu_; }
  const Capacity& capacity() const { return capacity_; }

  // Rate of a size-i birth from state n.
  double birth_rate(State n, int i) const;
  // Rate of a size-j death from state n (0 whenever n - j < 0).
  double death_rate(State n, int j) const;
  // Exponential sojourn parameter at n: sum of all event rates.
  double total_exit_rate(State n) const;

  // Largest valid state (K for parking), or -1 if unbounded.
  State max_state() const {
    return variant_ == Variant::Parking ? capacity_.K : -1;
  }
  bool state_valid(State n) const {
    return n >= 0 && (max_state() < 0 || n <= max_state());
  }

 private:
  ModelSpec() = default;
  void check_state(State n) const;

  Variant variant_ = Variant::Linear;
  std::vector<double> lambda_;
  std::vector<double> mu_;
  double nu_ = 0.0;
  Capacity capacity_;
  std::map<std::tuple<State, int, int>, double> table_;  // (n, size, kind)
  int table_k1_ = 0;
  int table_k2_ = 0;
};

// eta/zeta/xi/Lambda/beta from the rate vectors. GeneralTable has no global
// rate vectors, so this throws domain_error for it.
DerivedConstants derived_constants(const ModelSpec& spec);

std::string to_string(Variant v);

}  // namespace gbdp
