#ifndef STOVOL_ERRORS_HPP
#define STOVOL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stovol {

struct NonPositiveTime : std::invalid_argument {
    explicit NonPositiveTime(const std::string& what) : std::invalid_argument(what) {}
};

struct OutsideTabulatedRange : std::out_of_range {
    explicit OutsideTabulatedRange(const std::string& what) : std::out_of_range(what) {}
};

struct NonanalyticPoint : std::domain_error {
    explicit NonanalyticPoint(const std::string& what) : std::domain_error(what) {}
};

struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct BoundaryLimitUnstable : std::runtime_error {
    explicit BoundaryLimitUnstable(const std::string& what) : std::runtime_error(what) {}
};

struct DerivativeUnavailable : std::runtime_error {
    explicit DerivativeUnavailable(const std::string& what) : std::runtime_error(what) {}
};

struct ParameterOutOfRange : std::invalid_argument {
    explicit ParameterOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

struct GridTooCoarse : std::runtime_error {
    explicit GridTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

struct KernelMomentFailure : std::runtime_error {
    explicit KernelMomentFailure(const std::string& what) : std::runtime_error(what) {}
};

struct HorizonTooShort : std::runtime_error {
    explicit HorizonTooShort(const std::string& what) : std::runtime_error(what) {}
};

struct SpectralTruncationDominates : std::runtime_error {
    explicit SpectralTruncationDominates(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::invalid_argument {
    explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct TransformSizeMismatch : std::invalid_argument {
    explicit TransformSizeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct NoContraction : std::runtime_error {
    explicit NoContraction(const std::string& what) : std::runtime_error(what) {}
};

struct LagOutOfRange : std::invalid_argument {
    explicit LagOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

struct EnsembleTooSmall : std::runtime_error {
    explicit EnsembleTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stovol

#endif
