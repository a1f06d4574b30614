#include "ljt/error.hpp"

#include <array>
#include <utility>

namespace ljt {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 20> kNames{{
    {ErrorCode::BadLength, "BadLength"},
    {ErrorCode::CoincidentParticles, "CoincidentParticles"},
    {ErrorCode::CoordOutOfRange, "CoordOutOfRange"},
    {ErrorCode::NegativeCoordinate, "NegativeCoordinate"},
    {ErrorCode::ParseError, "ParseError"},
    {ErrorCode::BadClusterSize, "BadClusterSize"},
    {ErrorCode::InsufficientBalance, "InsufficientBalance"},
    {ErrorCode::InsufficientNative, "InsufficientNative"},
    {ErrorCode::SupplyOverflow, "SupplyOverflow"},
    {ErrorCode::NativeOverflow, "NativeOverflow"},
    {ErrorCode::AlreadyGranted, "AlreadyGranted"},
    {ErrorCode::AccessDenied, "AccessDenied"},
    {ErrorCode::ZeroRate, "ZeroRate"},
    {ErrorCode::DustPurchase, "DustPurchase"},
    {ErrorCode::SellerInsufficientTokens, "SellerInsufficientTokens"},
    {ErrorCode::BadParams, "BadParams"},
    {ErrorCode::BadNonce, "BadNonce"},
    {ErrorCode::NumericalBlowup, "NumericalBlowup"},
    {ErrorCode::CorruptLog, "CorruptLog"},
    {ErrorCode::DivergenceDetected, "DivergenceDetected"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

ErrorCode error_code_from_string(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    throw std::invalid_argument("unknown error code: " + std::string(name));
}

}  // namespace ljt
