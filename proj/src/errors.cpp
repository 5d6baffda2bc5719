#include "glyphforge/errors.hpp"

namespace glyphforge {

bool is_io_error(const Error& e) noexcept {
  return dynamic_cast<const IoError*>(&e) != nullptr ||
         dynamic_cast<const CorpusError*>(&e) != nullptr ||
         dynamic_cast<const FormatError*>(&e) != nullptr;
}

}  // namespace glyphforge
