#pragma once

namespace shiftdyn {

const char* version_string();

}  // namespace shiftdyn
