#pragma once

#include <iosfwd>

namespace loel::cli {

// Exit status: 0 success, 1 usage error, 2 data or validation error.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loel::cli
