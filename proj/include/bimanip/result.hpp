#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace bimanip {

// Planner-level failure codes. Contract violations (bad dimensions, invalid
// inputs) throw instead; these codes are for outcomes a caller is expected
// to branch on.
enum class ErrorCode {
    kTrackingSingular,
    kTrackingLimit,
    kTrackingDiverged,
    kIkUnreachable,
    kCollision,
    kSingular,
    kNoContact,
    kTilted,
    kDifferentComponents,
    kBudgetExhausted,
    kTransitFailed,
    kNoCommonGrasp,
    kSpanningFailed,
    kNotConnected,
    kTypeAFailed,
    kFingerprintMismatch,
    kLpFailure,
    kInfeasible,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kTrackingSingular: return "TRACKING_SINGULAR";
        case ErrorCode::kTrackingLimit: return "TRACKING_LIMIT";
        case ErrorCode::kTrackingDiverged: return "TRACKING_DIVERGED";
        case ErrorCode::kIkUnreachable: return "IK_UNREACHABLE";
        case ErrorCode::kCollision: return "COLLISION";
        case ErrorCode::kSingular: return "SINGULAR";
        case ErrorCode::kNoContact: return "NO_CONTACT";
        case ErrorCode::kTilted: return "TILTED";
        case ErrorCode::kDifferentComponents: return "DIFFERENT_COMPONENTS";
        case ErrorCode::kBudgetExhausted: return "BUDGET_EXHAUSTED";
        case ErrorCode::kTransitFailed: return "TRANSIT_FAILED";
        case ErrorCode::kNoCommonGrasp: return "NO_COMMON_GRASP";
        case ErrorCode::kSpanningFailed: return "SPANNING_FAILED";
        case ErrorCode::kNotConnected: return "NOT_CONNECTED";
        case ErrorCode::kTypeAFailed: return "TYPEA_FAILED";
        case ErrorCode::kFingerprintMismatch: return "FINGERPRINT_MISMATCH";
        case ErrorCode::kLpFailure: return "LP_FAILURE";
        case ErrorCode::kInfeasible: return "INFEASIBLE";
    }
    return "UNKNOWN";
}

struct Error {
    ErrorCode code;
    std::string message;
    // Optional context: failing step index, handover parameter, junction, ...
    int index = -1;
    double param = 0.0;
};

// Minimal expected-like result. `value()` throws if the operation failed.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}  // NOLINT: implicit by design
    Result(Error error) : error_(std::move(error)) {}

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::runtime_error("Result::value on error: " + error_->message);
        return *value_;
    }
    T& value() & {
        if (!ok()) throw std::runtime_error("Result::value on error: " + error_->message);
        return *value_;
    }
    T&& take() && {
        if (!ok()) throw std::runtime_error("Result::value on error: " + error_->message);
        return std::move(*value_);
    }

    const Error& error() const {
        if (ok()) throw std::logic_error("Result::error on success");
        return *error_;
    }

private:
    std::optional<T> value_;
    std::optional<Error> error_;
};

}  // namespace bimanip
