#pragma once

#include <stdexcept>
#include <string>

namespace misnc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A request whose unit flow polytope is empty.
class InfeasibleRequestError : public Error {
 public:
  explicit InfeasibleRequestError(const std::string& request_id)
      : Error("request '" + request_id + "' is infeasible: the unit flow polytope is empty"),
        request_id_(request_id) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

// Simplex pivoting exceeded its iteration cap.
class PivotLimitError : public Error {
 public:
  PivotLimitError(long pivots, long cap)
      : Error("simplex stalled after " + std::to_string(pivots) + " pivots (cap " +
              std::to_string(cap) + ")") {}
};

}  // namespace misnc
