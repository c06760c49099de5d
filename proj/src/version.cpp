#include "shiftdyn/version.hpp"

namespace shiftdyn {

const char* version_string() { return "0.1.0"; }

}  // namespace shiftdyn
