#include "plvote/common.hpp"

#ifndef PLVOTE_VERSION
#define PLVOTE_VERSION "0.0.0"
#endif

namespace plvote {

const char* version() { return PLVOTE_VERSION; }

}  // namespace plvote
