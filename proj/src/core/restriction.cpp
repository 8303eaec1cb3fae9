#include "restriction.hpp"

#include <algorithm>

#include "errors.hpp"

namespace topdown {

void Restriction::fix(int coord, Sign value) {
  if (coord < 1) throw DomainError("coordinate must be >= 1, got " + std::to_string(coord));
  if (value != 1 && value != -1) throw DomainError("literal value must be +1 or -1");
  auto it = std::lower_bound(lits_.begin(), lits_.end(), coord,
                             [](const Literal& l, int c) { return l.coord < c; });
  if (it != lits_.end() && it->coord == coord)
    throw DomainError("coordinate " + std::to_string(coord) + " already fixed");
  lits_.insert(it, Literal{coord, value});
}

Restriction Restriction::with(int coord, Sign value) const {
  Restriction r = *this;
  r.fix(coord, value);
  return r;
}

std::optional<Sign> Restriction::value_of(int coord) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), coord,
                             [](const Literal& l, int c) { return l.coord < c; });
  if (it != lits_.end() && it->coord == coord) return it->value;
  return std::nullopt;
}

std::uint32_t Restriction::fixed_mask() const {
  std::uint32_t m = 0;
  for (const auto& l : lits_)
    if (l.coord <= 32) m |= 1u << (l.coord - 1);
  return m;
}

std::uint32_t Restriction::plus_mask() const {
  std::uint32_t m = 0;
  for (const auto& l : lits_)
    if (l.coord <= 32 && l.value > 0) m |= 1u << (l.coord - 1);
  return m;
}

std::string Restriction::to_string() const {
  std::string s = "{";
  for (std::size_t k = 0; k < lits_.size(); ++k) {
    if (k) s += ",";
    s += (lits_[k].value > 0 ? "+" : "-") + std::to_string(lits_[k].coord);
  }
  return s + "}";
}

}  // namespace topdown
