#ifndef MLPROV_LITERAL_HPP_
#define MLPROV_LITERAL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace mlprov {

// Python literal constants as they appear in scripts. Floats are kept
// separate from ints so column indices stay integral.
struct NoneLit {
  bool operator==(const NoneLit &) const { return true; }
};

using Literal = std::variant<NoneLit, bool, std::int64_t, double, std::string>;

inline bool is_string(const Literal &v) { return std::holds_alternative<std::string>(v); }
inline bool is_int(const Literal &v) { return std::holds_alternative<std::int64_t>(v); }

std::string literal_repr(const Literal &v);

} // namespace mlprov

#endif // MLPROV_LITERAL_HPP_
