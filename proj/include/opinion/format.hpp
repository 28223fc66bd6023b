#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace opinion {

// Shortest decimal text that parses back to the same double; '.' decimal
// separator regardless of locale.
inline std::string format_real(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{})
        return "nan";
    return std::string(buf, end);
}

}  // namespace opinion
