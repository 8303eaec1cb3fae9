#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace topdown {

/// An impurity function G: [0,1] -> [0,1] together with a claimed
/// strong-concavity constant kappa:
///   (G(a)+G(b))/2 <= G((a+b)/2) - (kappa/2)(b-a)^2   for all a, b.
class ImpuritySpec {
 public:
  using Evaluator = std::function<double(double)>;

  ImpuritySpec(std::string name, Evaluator g, double kappa,
               std::vector<double> verification_grid = {});

  const std::string& name() const { return name_; }
  double kappa() const { return kappa_; }
  /// Throws DomainError for p outside [0,1].
  double operator()(double p) const;
  double evaluate(double p) const { return (*this)(p); }

  /// Non-empty for tabulated impurities: strong concavity is only claimed on
  /// these abscissae.
  const std::vector<double>& verification_grid() const { return grid_; }
  ImpuritySpec with_kappa(double kappa) const;

 private:
  std::string name_;
  Evaluator g_;
  double kappa_;
  std::vector<double> grid_;
};

/// "entropy" (kappa 1/ln 2), "gini" (kappa 2), "km"/"kearns-mansour" (kappa 1).
ImpuritySpec builtin_impurity(const std::string& name);
std::vector<std::string> builtin_impurity_names();

struct ConcavityReport {
  bool pass = false;
  double min_slack = 0.0;  // min over pairs of G(mid) - avg - (kappa/2)(b-a)^2
  double worst_a = 0.0;
  double worst_b = 0.0;
  std::size_t pairs_checked = 0;
};

/// Checks the strong-concavity inequality on all pairs of the grid
/// {k/resolution}. For tabulated impurities the grid is the table's
/// abscissae and only pairs whose midpoint is also tabulated are checked.
/// `tolerance` is the allowed negative slack.
ConcavityReport verify_strong_concavity(const ImpuritySpec& spec, int resolution,
                                        double tolerance = 1e-12);

/// Structural checks: G(0)=G(1)=0, G(1/2)=1, symmetry and range on the grid.
struct ImpurityShapeReport {
  bool pass = false;
  double max_asymmetry = 0.0;
  std::string problem;
};
ImpurityShapeReport verify_impurity_shape(const ImpuritySpec& spec, int resolution,
                                          double tolerance = 1e-12);

/// Piecewise-linear impurity from (p, G(p)) points. Throws DomainError when
/// the table fails the shape or strong-concavity checks on its own grid.
ImpuritySpec tabulated_impurity(std::string name, std::vector<std::pair<double, double>> points,
                                double kappa);
/// JSON {"name":..,"kappa":..,"points":[[p,g],...]}.
ImpuritySpec load_impurity_file(const std::string& path);

/// Builtin name or path to a tabulated impurity file.
ImpuritySpec resolve_impurity(const std::string& name_or_path);

}  // namespace topdown
