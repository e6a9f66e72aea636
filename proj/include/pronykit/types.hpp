#ifndef PRONYKIT_TYPES_HPP
#define PRONYKIT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pronykit
{

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Stable machine-readable failure categories. The string form is what the
/// CLI reports in its error JSON.
enum class ErrorCode
{
    InvalidInput,
    Unsolvable,
    SingularMatrix,
    RootFindingFailure,
    ResidualTooLarge,
    IllConditionedDDSystem,
    DegenerateInput,
    PronyFailure,
    NoRootNearCircle,
    BranchAmbiguity,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pronykit

#endif
