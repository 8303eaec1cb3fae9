#include "impurity.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace topdown {

ImpuritySpec::ImpuritySpec(std::string name, Evaluator g, double kappa, std::vector<double> grid)
    : name_(std::move(name)), g_(std::move(g)), kappa_(kappa), grid_(std::move(grid)) {
  if (!(kappa_ > 0.0)) throw DomainError("strong-concavity constant must be positive");
}

double ImpuritySpec::operator()(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("impurity argument outside [0,1]: " + std::to_string(p));
  return g_(p);
}

ImpuritySpec ImpuritySpec::with_kappa(double kappa) const {
  return ImpuritySpec(name_, g_, kappa, grid_);
}

ImpuritySpec builtin_impurity(const std::string& name) {
  if (name == "entropy") {
    return ImpuritySpec(
        "entropy",
        [](double p) {
          if (p <= 0.0 || p >= 1.0) return 0.0;
          return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
        },
        1.0 / std::log(2.0));
  }
  if (name == "gini") return ImpuritySpec("gini", [](double p) { return 4.0 * p * (1.0 - p); }, 2.0);
  if (name == "km" || name == "kearns-mansour")
    return ImpuritySpec("km", [](double p) { return 2.0 * std::sqrt(p * (1.0 - p)); }, 1.0);
  throw DomainError("unknown impurity \"" + name + "\" (expected entropy, gini or km)");
}

std::vector<std::string> builtin_impurity_names() { return {"gini", "entropy", "km"}; }

namespace {

std::vector<double> uniform_grid(int resolution) {
  std::vector<double> g(static_cast<std::size_t>(resolution) + 1);
  for (int k = 0; k <= resolution; ++k) g[static_cast<std::size_t>(k)] = static_cast<double>(k) / resolution;
  return g;
}

}  // namespace

ConcavityReport verify_strong_concavity(const ImpuritySpec& spec, int resolution, double tolerance) {
  if (resolution < 2) throw DomainError("grid resolution must be at least 2");
  ConcavityReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  const double half_kappa = spec.kappa() / 2.0;
  auto check = [&](double a, double b, double mid) {
    const double slack = spec(mid) - (spec(a) + spec(b)) / 2.0 - half_kappa * (b - a) * (b - a);
    ++rep.pairs_checked;
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.worst_a = a;
      rep.worst_b = b;
    }
  };
  const auto& tab = spec.verification_grid();
  if (tab.empty()) {
    // Integer grid indices keep midpoints exact: mid = (i+j)/(2*resolution).
    for (int i = 0; i <= resolution; ++i)
      for (int j = i; j <= resolution; ++j)
        check(static_cast<double>(i) / resolution, static_cast<double>(j) / resolution,
              static_cast<double>(i + j) / (2.0 * resolution));
  } else {
    for (std::size_t i = 0; i < tab.size(); ++i)
      for (std::size_t j = i; j < tab.size(); ++j) {
        const double mid = (tab[i] + tab[j]) / 2.0;
        if (std::binary_search(tab.begin(), tab.end(), mid)) check(tab[i], tab[j], mid);
      }
  }
  rep.pass = rep.min_slack >= -tolerance;
  return rep;
}

ImpurityShapeReport verify_impurity_shape(const ImpuritySpec& spec, int resolution, double tolerance) {
  ImpurityShapeReport rep;
  auto fail = [&](std::string why) {
    rep.pass = false;
    rep.problem = std::move(why);
    return rep;
  };
  if (std::abs(spec(0.0)) > tolerance || std::abs(spec(1.0)) > tolerance) return fail("G(0) or G(1) is not 0");
  if (std::abs(spec(0.5) - 1.0) > tolerance) return fail("G(1/2) is not 1");
  const auto grid = spec.verification_grid().empty() ? uniform_grid(resolution) : spec.verification_grid();
  for (double p : grid) {
    const double g = spec(p);
    if (g < -tolerance || g > 1.0 + tolerance) return fail("G leaves [0,1] at p=" + std::to_string(p));
    rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(g - spec(1.0 - p)));
  }
  if (rep.max_asymmetry > tolerance) return fail("G is not symmetric about 1/2");
  rep.pass = true;
  return rep;
}

ImpuritySpec tabulated_impurity(std::string name, std::vector<std::pair<double, double>> points,
                                double kappa) {
  std::sort(points.begin(), points.end());
  if (points.size() < 3 || points.front().first != 0.0 || points.back().first != 1.0)
    throw DomainError("tabulated impurity needs at least 3 points spanning [0,1]");
  for (std::size_t k = 1; k < points.size(); ++k)
    if (points[k].first == points[k - 1].first) throw DomainError("tabulated impurity repeats an abscissa");
  std::vector<double> xs, ys;
  for (const auto& [p, g] : points) {
    xs.push_back(p);
    ys.push_back(g);
  }
  auto eval = [xs, ys](double p) {
    auto it = std::lower_bound(xs.begin(), xs.end(), p);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    if (k < xs.size() && xs[k] == p) return ys[k];
    const double t = (p - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
  };
  ImpuritySpec spec(std::move(name), eval, kappa, xs);
  const auto shape = verify_impurity_shape(spec, 2);
  if (!shape.pass) throw DomainError("tabulated impurity rejected: " + shape.problem);
  const auto conc = verify_strong_concavity(spec, 2);
  if (!conc.pass)
    throw DomainError("tabulated impurity is not " + std::to_string(kappa) +
                      "-strongly concave on its grid (slack " + std::to_string(conc.min_slack) + ")");
  return spec;
}

ImpuritySpec load_impurity_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open impurity file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("impurity file is not valid JSON: ") + e.what());
  }
  if (!j.contains("kappa") || !j.contains("points")) throw FormatError("impurity file needs \"kappa\" and \"points\"");
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != 2) throw FormatError("impurity points must be [p, G(p)] pairs");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return tabulated_impurity(j.value("name", std::string("custom")), std::move(pts), j["kappa"].get<double>());
}

ImpuritySpec resolve_impurity(const std::string& name_or_path) {
  if (name_or_path == "entropy" || name_or_path == "gini" || name_or_path == "km" ||
      name_or_path == "kearns-mansour")
    return builtin_impurity(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_impurity_file(name_or_path);
  return builtin_impurity(name_or_path);
}

}  // namespace topdown
