#ifndef MLPROV_ERRORS_HPP_
#define MLPROV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mlprov {

// An AST node violated a grammar assumption during lowering.
class LoweringError : public std::runtime_error {
public:
  LoweringError(const std::string &node_kind, int line, const std::string &what_arg)
      : std::runtime_error("lowering error at line " + std::to_string(line) + " (" + node_kind +
                           "): " + what_arg),
        node_kind_(node_kind),
        line_(line) {}
  const std::string &node_kind() const { return node_kind_; }
  int line() const { return line_; }

private:
  std::string node_kind_;
  int line_;
};

class UnknownNodeError : public std::runtime_error {
public:
  explicit UnknownNodeError(int id)
      : std::runtime_error("unknown WIR node id " + std::to_string(id)), id_(id) {}
  int id() const { return id_; }

private:
  int id_;
};

// Knowledge-base file failed validation; `pointer` locates the offending
// entry, JSON-pointer style.
class KbFormatError : public std::runtime_error {
public:
  KbFormatError(const std::string &pointer, const std::string &what_arg)
      : std::runtime_error("kb format error at " + pointer + ": " + what_arg), pointer_(pointer) {}
  const std::string &pointer() const { return pointer_; }

private:
  std::string pointer_;
};

class TruthFormatError : public std::runtime_error {
public:
  explicit TruthFormatError(const std::string &what_arg)
      : std::runtime_error("ground-truth format error: " + what_arg) {}
};

} // namespace mlprov

#endif // MLPROV_ERRORS_HPP_
