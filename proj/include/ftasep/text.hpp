#pragma once

#include <cstdio>
#include <string>

namespace ftasep
{
    // Round-trip decimal form used in every CSV payload.
    inline std::string fmt_double(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
}  // namespace ftasep
