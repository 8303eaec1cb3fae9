#include "boolfn.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"

namespace topdown {

namespace {

void check_arity(int n) {
  if (n < 1 || n > BoolFunc::kMaxArity)
    throw DomainError("arity must be in [1, 24], got " + std::to_string(n));
}

void check_restriction(const BoolFunc& f, const Restriction& r) {
  if (r.max_coord() > f.arity())
    throw DomainError("restriction fixes x" + std::to_string(r.max_coord()) +
                      " but the function has arity " + std::to_string(f.arity()));
}

void check_free(const BoolFunc& f, const Restriction& r, int coord) {
  check_restriction(f, r);
  if (coord < 1 || coord > f.arity())
    throw DomainError("coordinate " + std::to_string(coord) + " out of range");
  if (r.is_fixed(coord))
    throw DomainError("coordinate " + std::to_string(coord) + " is fixed by the restriction");
}

// Calls fn(index) for every index of the subcube selected by r.
template <typename Fn>
void for_each_in_subcube(int n, const Restriction& r, Fn&& fn) {
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  const std::uint32_t free = full & ~r.fixed_mask();
  const std::uint32_t base = r.plus_mask();
  std::uint32_t sub = 0;
  do {
    fn(base | sub);
    sub = (sub - free) & free;
  } while (sub != 0);
}

}  // namespace

BoolFunc::BoolFunc(int n) : n_(n) {
  check_arity(n);
  words_.assign(((std::size_t{1} << n) + 63) / 64, 0);
}

BoolFunc BoolFunc::constant(int n, bool value) {
  BoolFunc f(n);
  if (value)
    for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, true);
  return f;
}

BoolFunc BoolFunc::from_predicate(int n, const std::function<bool(std::span<const Sign>)>& pred) {
  BoolFunc f(n);
  std::vector<Sign> x(n);
  for (std::uint32_t k = 0; k < f.table_size(); ++k) {
    for (int i = 0; i < n; ++i) x[i] = (k >> i) & 1u ? 1 : -1;
    f.set(k, pred(x));
  }
  return f;
}

BoolFunc BoolFunc::from_index_predicate(int n, const std::function<bool(std::uint32_t)>& pred) {
  BoolFunc f(n);
  for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, pred(k));
  return f;
}

BoolFunc BoolFunc::dictator(int n, int coord) {
  if (coord < 1 || coord > n) throw DomainError("dictator coordinate out of range");
  return from_index_predicate(n, [coord](std::uint32_t k) { return (k >> (coord - 1)) & 1u; });
}

BoolFunc BoolFunc::conjunction(int n, std::span<const int> signed_literals) {
  return from_dnf(n, {std::vector<int>(signed_literals.begin(), signed_literals.end())});
}

BoolFunc BoolFunc::majority(int n) {
  return from_index_predicate(n, [n](std::uint32_t k) { return 2 * std::popcount(k) >= n; });
}

BoolFunc BoolFunc::parity(int n) {
  // 1 iff the number of -1 coordinates is odd.
  return from_index_predicate(n, [n](std::uint32_t k) { return ((n - std::popcount(k)) & 1) != 0; });
}

void BoolFunc::set(std::uint32_t index, bool v) {
  const std::uint64_t bit = std::uint64_t{1} << (index & 63);
  if (v)
    words_[index >> 6] |= bit;
  else
    words_[index >> 6] &= ~bit;
}

std::uint64_t BoolFunc::count_ones() const {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

BoolFunc BoolFunc::restricted(const Restriction& r) const {
  check_restriction(*this, r);
  const std::uint32_t mask = r.fixed_mask();
  const std::uint32_t plus = r.plus_mask();
  BoolFunc g(n_);
  for (std::uint32_t k = 0; k < table_size(); ++k) g.set(k, at((k & ~mask) | plus));
  return g;
}

BoolFunc BoolFunc::complemented() const {
  BoolFunc g(n_);
  for (std::uint32_t k = 0; k < table_size(); ++k) g.set(k, !at(k));
  return g;
}

std::uint32_t BoolFunc::index_of(std::span<const Sign> x) {
  std::uint32_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0) k |= 1u << i;
  return k;
}

std::vector<Sign> BoolFunc::point_of(std::uint32_t index, int n) {
  std::vector<Sign> x(n);
  for (int i = 0; i < n; ++i) x[i] = (index >> i) & 1u ? 1 : -1;
  return x;
}

// ---------------------------------------------------------------------------

Dyadic SubcubeProfile::mean_given(int coord, Sign b) const {
  const std::uint64_t c = b > 0 ? ones_plus[coord - 1] : ones - ones_plus[coord - 1];
  return Dyadic::ratio(c, free_count - 1);
}

Dyadic SubcubeProfile::influence(int coord) const {
  // Each unordered edge is counted once from its x_i = -1 endpoint.
  return Dyadic::ratio(flip_pairs[coord - 1], free_count - 1);
}

Dyadic SubcubeProfile::correlation(int coord) const {
  const auto plus = static_cast<std::int64_t>(ones_plus[coord - 1]);
  const auto minus = static_cast<std::int64_t>(ones) - plus;
  return Dyadic(BigInt(plus - minus), free_count);
}

Dyadic SubcubeProfile::total_influence() const {
  Dyadic s;
  for (std::size_t i = 0; i < free_coord.size(); ++i)
    if (free_coord[i]) s += influence(static_cast<int>(i) + 1);
  return s;
}

SubcubeProfile profile(const BoolFunc& f, const Restriction& r) {
  check_restriction(f, r);
  const int n = f.arity();
  SubcubeProfile p;
  p.free_count = n - static_cast<int>(r.size());
  p.free_coord.assign(n, false);
  p.ones_plus.assign(n, 0);
  p.flip_pairs.assign(n, 0);
  std::vector<int> free_bits;
  for (int i = 1; i <= n; ++i)
    if (!r.is_fixed(i)) {
      p.free_coord[i - 1] = true;
      free_bits.push_back(i - 1);
    }
  for_each_in_subcube(n, r, [&](std::uint32_t k) {
    const bool v = f.at(k);
    if (v) ++p.ones;
    for (int b : free_bits) {
      const std::uint32_t bit = 1u << b;
      if (k & bit) {
        if (v) ++p.ones_plus[b];
      } else if (v != f.at(k | bit)) {
        ++p.flip_pairs[b];
      }
    }
  });
  return p;
}

Dyadic expectation(const BoolFunc& f, const Restriction& r) {
  check_restriction(f, r);
  std::uint64_t ones = 0;
  for_each_in_subcube(f.arity(), r, [&](std::uint32_t k) { ones += f.at(k); });
  return Dyadic::ratio(ones, f.arity() - static_cast<int>(r.size()));
}

Dyadic influence(const BoolFunc& f, const Restriction& r, int coord) {
  check_free(f, r, coord);
  const std::uint32_t bit = 1u << (coord - 1);
  const Restriction lower = r.with(coord, -1);
  std::uint64_t pairs = 0;
  for_each_in_subcube(f.arity(), lower, [&](std::uint32_t k) { pairs += f.at(k) != f.at(k | bit); });
  return Dyadic::ratio(pairs, f.arity() - static_cast<int>(lower.size()));
}

Dyadic correlation(const BoolFunc& f, const Restriction& r, int coord) {
  check_free(f, r, coord);
  const std::uint32_t bit = 1u << (coord - 1);
  std::int64_t acc = 0;
  for_each_in_subcube(f.arity(), r, [&](std::uint32_t k) {
    if (f.at(k)) acc += (k & bit) ? 1 : -1;
  });
  return Dyadic(BigInt(acc), f.arity() - static_cast<int>(r.size()));
}

Dyadic bias(const BoolFunc& f, const Restriction& r) {
  const Dyadic e = expectation(f, r);
  return min(e, Dyadic::one() - e);
}

Dyadic total_influence(const BoolFunc& f, const Restriction& r) {
  return profile(f, r).total_influence();
}

std::string to_string(Orientation o) {
  switch (o) {
    case Orientation::NonDecreasing: return "non-decreasing";
    case Orientation::NonIncreasing: return "non-increasing";
    case Orientation::Both: return "both";
    case Orientation::Neither: return "neither";
  }
  return "?";
}

std::vector<Orientation> monotone_orientation(const BoolFunc& f) {
  const int n = f.arity();
  std::vector<Orientation> out(n);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    bool up = false, down = false;
    for (std::uint32_t k = 0; k < f.table_size() && !(up && down); ++k) {
      if (k & bit) continue;
      const bool lo = f.at(k), hi = f.at(k | bit);
      if (hi && !lo) up = true;
      if (lo && !hi) down = true;
    }
    out[i] = up && down ? Orientation::Neither
             : up       ? Orientation::NonDecreasing
             : down     ? Orientation::NonIncreasing
                        : Orientation::Both;
  }
  return out;
}

bool is_monotone(const BoolFunc& f) {
  const auto o = monotone_orientation(f);
  return std::none_of(o.begin(), o.end(), [](Orientation x) { return x == Orientation::Neither; });
}

BoolFunc random_function(int n, std::uint64_t seed, double density) {
  Rng rng(seed);
  BoolFunc f(n);
  for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, uniform01(rng) < density);
  return f;
}

BoolFunc random_monotone(int n, std::uint64_t seed, const MonotoneGenOptions& opts) {
  check_arity(n);
  Rng rng(seed);
  BoolFunc f(n);
  if (opts.strategy == MonotoneStrategy::Dnf) {
    const int max_width = std::clamp(static_cast<int>(opts.density * n + 0.5), 1, n);
    const auto terms = 1 + uniform_below(rng, static_cast<std::uint64_t>(n));
    std::vector<std::uint32_t> masks;
    for (std::uint64_t t = 0; t < terms; ++t) {
      const auto width = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_width)));
      std::vector<int> coords(n);
      for (int i = 0; i < n; ++i) coords[i] = i;
      for (int j = 0; j < width; ++j) {
        const auto pick = j + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - j)));
        std::swap(coords[j], coords[pick]);
      }
      std::uint32_t m = 0;
      for (int j = 0; j < width; ++j) m |= 1u << coords[j];
      masks.push_back(m);
    }
    for (std::uint32_t k = 0; k < f.table_size(); ++k)
      f.set(k, std::any_of(masks.begin(), masks.end(), [k](std::uint32_t m) { return (k & m) == m; }));
  } else {
    for (std::uint32_t k = 0; k < f.table_size(); ++k) f.set(k, uniform01(rng) < opts.density);
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      for (std::uint32_t k = 0; k < f.table_size(); ++k)
        if (!(k & bit) && f.at(k)) f.set(k | bit, true);
    }
  }
  if (opts.random_orientation) {
    std::uint32_t flip = 0;
    for (int i = 0; i < n; ++i)
      if (rng() & 1u) flip |= 1u << i;
    if (flip) {
      BoolFunc g(n);
      for (std::uint32_t k = 0; k < f.table_size(); ++k) g.set(k, f.at(k ^ flip));
      f = std::move(g);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------

std::string to_hex(const BoolFunc& f) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t bytes = std::max<std::size_t>(1, f.table_size() / 8);
  std::string s;
  s.reserve(bytes * 2);
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned v = 0;
    for (unsigned j = 0; j < 8; ++j) {
      const std::uint64_t k = b * 8 + j;
      if (k < f.table_size() && f.at(static_cast<std::uint32_t>(k))) v |= 1u << j;
    }
    s += kDigits[v >> 4];
    s += kDigits[v & 15];
  }
  return s;
}

BoolFunc from_hex(int n, const std::string& hex) {
  BoolFunc f(n);
  const std::size_t bytes = std::max<std::size_t>(1, f.table_size() / 8);
  if (hex.size() != bytes * 2)
    throw FormatError("hex table for n=" + std::to_string(n) + " must have " +
                      std::to_string(bytes * 2) + " digits, got " + std::to_string(hex.size()));
  auto digit = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw FormatError(std::string("invalid hex digit '") + c + "'");
  };
  for (std::size_t b = 0; b < bytes; ++b) {
    const unsigned v = digit(hex[2 * b]) << 4 | digit(hex[2 * b + 1]);
    for (unsigned j = 0; j < 8; ++j) {
      const std::uint64_t k = b * 8 + j;
      const bool bit = (v >> j) & 1u;
      if (k < f.table_size())
        f.set(static_cast<std::uint32_t>(k), bit);
      else if (bit)
        throw FormatError("hex table sets bits beyond 2^n");
    }
  }
  return f;
}

BoolFunc from_dnf(int n, const std::vector<std::vector<int>>& terms) {
  BoolFunc f(n);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> masks;  // (mask, required plus bits)
  for (const auto& term : terms) {
    std::uint32_t m = 0, plus = 0;
    bool contradictory = false;
    for (int lit : term) {
      const int c = lit < 0 ? -lit : lit;
      if (c < 1 || c > n) throw FormatError("dnf literal " + std::to_string(lit) + " out of range");
      const std::uint32_t bit = 1u << (c - 1);
      if ((m & bit) && (((plus & bit) != 0) != (lit > 0))) contradictory = true;
      m |= bit;
      if (lit > 0) plus |= bit;
    }
    if (!contradictory) masks.emplace_back(m, plus);
  }
  for (std::uint32_t k = 0; k < f.table_size(); ++k)
    f.set(k, std::any_of(masks.begin(), masks.end(),
                         [k](const auto& mp) { return (k & mp.first) == mp.second; }));
  return f;
}

BoolFunc parse_function_spec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("function spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j.contains("n"))
    throw FormatError("function spec needs \"kind\" and \"n\"");
  const int n = j.at("n").get<int>();
  if (n < 1 || n > BoolFunc::kMaxArity) throw FormatError("function spec arity out of range");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "table") return from_hex(n, j.at("hex").get<std::string>());
  if (kind == "dnf") return from_dnf(n, j.at("terms").get<std::vector<std::vector<int>>>());
  throw FormatError("unknown function spec kind \"" + kind + "\"");
}

BoolFunc load_function_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open function spec " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_function_spec(ss.str());
}

std::string function_spec_json(const BoolFunc& f) {
  nlohmann::ordered_json j;
  j["kind"] = "table";
  j["n"] = f.arity();
  j["hex"] = to_hex(f);
  return j.dump();
}

}  // namespace topdown
