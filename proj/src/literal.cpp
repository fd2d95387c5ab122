#include "mlprov/literal.hpp"

#include <sstream>

namespace mlprov {

std::string literal_repr(const Literal &v) {
  std::ostringstream os;
  if (std::holds_alternative<NoneLit>(v)) {
    os << "None";
  } else if (std::holds_alternative<bool>(v)) {
    os << (std::get<bool>(v) ? "True" : "False");
  } else if (std::holds_alternative<std::int64_t>(v)) {
    os << std::get<std::int64_t>(v);
  } else if (std::holds_alternative<double>(v)) {
    os << std::get<double>(v);
  } else {
    os << '\'' << std::get<std::string>(v) << '\'';
  }
  return os.str();
}

} // namespace mlprov
