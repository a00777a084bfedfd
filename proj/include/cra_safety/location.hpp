#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cra {

/// Status of the cyber subsystem.
enum class Status : std::uint8_t {
    Normal,
    Corrupted,
    Restoration,
    RebootInit,
    SafetyControllerDriven,
    SafetyViolation,
};

inline constexpr std::array<std::string_view, 6> kStatusNames = {
    "normal", "corrupted", "restoration", "reboot_init", "safety_controller", "safety_violation"};

inline std::string_view to_string(Status s) { return kStatusNames[static_cast<std::size_t>(s)]; }

inline Status status_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kStatusNames.size(); ++i)
        if (kStatusNames[i] == s) return static_cast<Status>(i);
    throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

/// Discrete location (status, j). j is the epoch index at which the status was entered.
struct Location {
    Status status = Status::Normal;
    long epoch = 0;
    bool operator==(const Location&) const = default;
};

}  // namespace cra
