#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "boolfn.hpp"
#include "grower.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "tree.hpp"

namespace topdown {

/// One coordinate's CDF.
class Cdf {
 public:
  static Cdf uniform01();
  /// Piecewise-linear through (v, F(v)) points; F must be non-decreasing,
  /// start at 0 and end at 1. Below the first point F = 0, above the last 1.
  static Cdf table(std::vector<std::pair<double, double>> points);
  /// Right-continuous step function F(v) = #{values <= v} / N.
  static Cdf empirical(std::vector<double> values);

  double operator()(double v) const;
  /// Smallest v with F(v) >= u (u in [0,1]).
  double quantile(double u) const;
  std::string kind() const;

 private:
  enum class Kind { Uniform, Table, Empirical };
  Kind kind_ = Kind::Uniform;
  std::vector<double> xs_, ys_;
};

class ProductDistribution {
 public:
  ProductDistribution() = default;
  explicit ProductDistribution(std::vector<Cdf> coords);
  static ProductDistribution uniform(int n);

  int dimension() const { return static_cast<int>(coords_.size()); }
  const Cdf& coord(int i) const { return coords_.at(static_cast<std::size_t>(i - 1)); }
  /// Inverse-CDF sampling.
  std::vector<double> sample(Rng& rng) const;

 private:
  std::vector<Cdf> coords_;
};

std::vector<double> cdf_transform(const ProductDistribution& d, std::span<const double> x);

/// MSB-first binary expansion of floor(x 2^w) with 0 -> -1 and 1 -> +1;
/// x = 1 encodes as all +1. Throws DomainError for x outside [0,1] or w
/// outside [1,53].
std::vector<Sign> encode(double x, int w);
/// Concatenated encodings of every coordinate (feature i owns bits
/// (i-1)w+1..iw).
std::vector<Sign> encode_point(std::span<const double> x, int w);

/// Each threshold moved to the nearest multiple of 2^-w, ties to the even
/// multiple. Throws DomainError for thresholds outside [0,1].
DecisionTree round_thresholds(const DecisionTree& t, int w);

/// Disagreement of two real-valued trees under d, with a Wilson interval at
/// `confidence`.
Interval estimate_dist(const DecisionTree& t1, const DecisionTree& t2, const ProductDistribution& d,
                       std::uint64_t samples, std::uint64_t seed, double confidence = 0.99);

/// Boolean tree over encode_point(x, w) computing the same function as a
/// real-valued tree whose thresholds are multiples of 2^-w in [0,1). Each
/// threshold becomes a comparator subtree over the feature's bits; bits
/// already fixed on the path are not queried again. Throws DomainError when
/// the result would exceed `node_cap` nodes.
DecisionTree encoded_tree(const DecisionTree& t, int n, int w, std::size_t node_cap = 1u << 22);

/// Random real-valued tree with `leaves` leaves and depth <= max_depth:
/// uniformly chosen leaves below the depth cap are split on a uniform
/// coordinate at a uniform threshold in (0,1); labels are fair coins.
DecisionTree random_balanced_tree(int n, int leaves, int max_depth, Rng& rng);

struct RealSample {
  int n = 0;
  std::vector<std::vector<double>> x;
  std::vector<std::uint8_t> y;
  std::vector<std::string> names;
  std::string provenance;

  std::size_t size() const { return y.size(); }
  std::vector<double> column(int i) const;
};

/// CSV with a header; the label column is the one named "label", otherwise
/// the last column. Labels must be 0 or 1.
RealSample parse_dataset_csv(const std::string& text, const std::string& provenance = "inline");
RealSample load_dataset_csv(const std::string& path);
std::string dataset_csv(const RealSample& s);

/// JSON list with one entry per coordinate: "uniform01", {"uniform01":..},
/// {"cdf_table":[[v,F],...]} or {"empirical":"column name"} (resolved
/// against `data`).
ProductDistribution parse_distribution(const std::string& json_text, const RealSample* data = nullptr);
ProductDistribution load_distribution(const std::string& path, const RealSample* data = nullptr);

RealSample sample_labeled(const std::function<bool(std::span<const double>)>& f, const ProductDistribution& d,
                          std::uint64_t count, std::uint64_t seed);
/// All 2^n points of the cube as {0,1} features (1 for +1), labeled by f.
RealSample binary_sample(const BoolFunc& f);

struct ThresholdPolicy {
  enum class Kind { Midpoints, Grid };
  Kind kind = Kind::Midpoints;
  int w = 0;  // grid width
  static ThresholdPolicy midpoints() { return {}; }
  static ThresholdPolicy grid(int w) { return {Kind::Grid, w}; }
  /// "midpoints" or "grid:W".
  static ThresholdPolicy parse(const std::string& text);
};

/// Top-down growth over (coordinate, threshold) candidates with the sample
/// as the distribution. Midpoints: midpoints of consecutive distinct sample
/// values per coordinate, on raw values. Grid: thresholds c/2^w, c = 1..2^w-1,
/// on CDF-transformed values (`d` defaults to the sample's empirical CDFs);
/// the returned tree then lives in the transformed space.
///
/// A candidate leaving either side empty is skipped. A leaf without
/// candidates is frozen; an empty leaf takes its parent's label.
GrowthResult grow_real(const RealSample& sample, const GrowthConfig& cfg, const ThresholdPolicy& policy,
                       const std::optional<ProductDistribution>& d = std::nullopt);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and
/// uniform[0,1].
double ks_uniform_statistic(std::vector<double> values);

}  // namespace topdown
