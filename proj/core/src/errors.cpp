#include "loel/errors.hpp"

namespace loel {

namespace {

std::string format_data_error(const std::string& source, std::size_t line,
                              const std::string& message) {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": " + message;
  return out;
}

}  // namespace

DataError::DataError(const std::string& source, std::size_t line, const std::string& message)
    : Error(format_data_error(source, line, message)), source_(source), line_(line) {}

}  // namespace loel
