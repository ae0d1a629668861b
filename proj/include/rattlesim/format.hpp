#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rattlesim {

/// Shortest decimal that round-trips to the same double ("inf", "-inf" and
/// "nan" for non-finite values).
std::string format_number(double v);

/// Parses a full decimal string (or inf/-inf/nan); nullopt on any trailing
/// garbage.
std::optional<double> parse_number(std::string_view s);

}  // namespace rattlesim
