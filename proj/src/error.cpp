#include "atomgate/error.hpp"

namespace atomgate {
namespace {

std::string join_lines(const std::vector<std::string>& items, const char* head) {
  std::string out = head;
  for (const auto& item : items) {
    out += "\n  ";
    out += item;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_lines(violations, "invalid lattice:")), violations_(std::move(violations)) {}

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join_lines(errors, "configuration error:")), errors_(std::move(errors)) {}

}  // namespace atomgate
