#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace topdown {

/// Coordinate value on the hypercube: +1 or -1.
using Sign = std::int8_t;

struct Literal {
  int coord;  // 1-indexed
  Sign value;
  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Partial assignment of coordinates to {±1}, kept sorted by coordinate so
/// that two paths fixing the same literals compare equal (subcube identity).
class Restriction {
 public:
  Restriction() = default;

  /// Throws DomainError if coord < 1, value not ±1, or coord already fixed.
  [[nodiscard]] Restriction with(int coord, Sign value) const;
  void fix(int coord, Sign value);

  std::optional<Sign> value_of(int coord) const;
  bool is_fixed(int coord) const { return value_of(coord).has_value(); }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  const std::vector<Literal>& literals() const { return lits_; }
  int max_coord() const { return lits_.empty() ? 0 : lits_.back().coord; }

  /// Bitmasks over coordinates 1..32: bit (i-1) of `mask` set when x_i is
  /// fixed, and bit (i-1) of `plus` set when it is fixed to +1.
  std::uint32_t fixed_mask() const;
  std::uint32_t plus_mask() const;

  std::string to_string() const;

  friend bool operator==(const Restriction&, const Restriction&) = default;

 private:
  std::vector<Literal> lits_;
};

}  // namespace topdown
