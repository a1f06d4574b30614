#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ljt {

enum class ErrorCode {
    BadLength,
    CoincidentParticles,
    CoordOutOfRange,
    NegativeCoordinate,
    ParseError,
    BadClusterSize,
    InsufficientBalance,
    InsufficientNative,
    SupplyOverflow,
    NativeOverflow,
    AlreadyGranted,
    AccessDenied,
    ZeroRate,
    DustPurchase,
    SellerInsufficientTokens,
    BadParams,
    BadNonce,
    NumericalBlowup,
    CorruptLog,
    DivergenceDetected,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Parses the name produced by to_string; throws std::invalid_argument otherwise.
ErrorCode error_code_from_string(std::string_view name);

/// Every failure raised by the library. Contract-level failures carry the
/// code recorded in transaction receipts.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
    explicit Error(ErrorCode code)
        : std::runtime_error(std::string(to_string(code))), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ljt
