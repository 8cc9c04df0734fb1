#pragma once

#include <charconv>
#include <string>

namespace hbem::io {

/// 17 significant digits, "." decimal point, independent of the locale.
inline std::string num(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace hbem::io
