#pragma once

#include <spdlog/spdlog.h>

namespace echoscope {

/// Configures the stderr logger from ECHOSCOPE_LOG (trace, debug, info,
/// warn, error, off). Defaults to warn. Safe to call more than once.
void init_logging();

}  // namespace echoscope
