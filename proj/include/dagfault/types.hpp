#ifndef DAGFAULT_TYPES_HPP_
#define DAGFAULT_TYPES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dagfault {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Class label: 0 = fault-free, 1..20 = IDV fault numbers in the TEP schema.
using ClassId = int;

constexpr ClassId kMaxClassId = 20;

/// Base for all library errors. Subclasses carry a formatted message;
/// callers that need the offending field parse nothing, they catch the type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dagfault

#endif  // DAGFAULT_TYPES_HPP_
