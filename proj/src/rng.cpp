#include "sfm/rng.hpp"

#include <sstream>

#include "sfm/errors.hpp"

namespace sfm {

std::string Rng::serialize() const {
  std::ostringstream os;
  os << seed_ << ' ' << engine_;
  return os.str();
}

Rng Rng::deserialize(const std::string& blob) {
  std::istringstream is(blob);
  Rng r;
  is >> r.seed_ >> r.engine_;
  if (!is) throw FormatError("rng state blob is corrupt");
  return r;
}

}  // namespace sfm
