#pragma once

#include <string>
#include <vector>

namespace cortex {

// Non-fatal conditions collected during an operation. The CLI copies them
// into the run report; library callers may ignore them.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
    if (sink) sink->push_back(std::move(message));
}

}  // namespace cortex
