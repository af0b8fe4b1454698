#ifndef PUCCI_FORGE_ERRORS_HPP
#define PUCCI_FORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pucci {

/// Malformed arguments: non-finite matrices, out-of-range parameters, empty samples.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation that is not defined for the candidate it was called on.
class NotApplicable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Evaluation at or too near a candidate's singular set.
class SingularEvaluation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A finite-difference stencil would leave the admissible region.
class StencilError : public std::domain_error {
 public:
  StencilError(const std::string& what, double suggested_h) : std::domain_error(what), suggested_h_(suggested_h) {}
  double suggested_h() const { return suggested_h_; }

 private:
  double suggested_h_;
};

/// The Pucci sandwich P-(D2u) <= u_t <= P+(D2u) fails. Carries both margins
/// P+ - u_t and u_t - P-; at least one is negative.
class CertificationFailure : public std::runtime_error {
 public:
  CertificationFailure(const std::string& what, double margin_plus, double margin_minus)
      : std::runtime_error(what + " (m_plus=" + std::to_string(margin_plus) +
                           ", m_minus=" + std::to_string(margin_minus) + ")"),
        margin_plus_(margin_plus),
        margin_minus_(margin_minus) {}

  double margin_plus() const { return margin_plus_; }
  double margin_minus() const { return margin_minus_; }

 private:
  double margin_plus_;
  double margin_minus_;
};

}  // namespace pucci

#endif  // PUCCI_FORGE_ERRORS_HPP
