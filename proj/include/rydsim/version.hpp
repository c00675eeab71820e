#pragma once

#define RYDSIM_VERSION_MAJOR 1
#define RYDSIM_VERSION_MINOR 0
#define RYDSIM_VERSION_PATCH 0
#define RYDSIM_VERSION_STRING "1.0.0"

namespace rydsim {
inline const char* version() { return RYDSIM_VERSION_STRING; }
}
