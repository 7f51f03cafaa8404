#pragma once

#include <string>

#include "tnn/metrics.hpp"
#include "tnn/network.hpp"

namespace tnn {

// A checkpoint freezes a run: network state, stream position, and the
// interval tracker. The file is versioned, echoes the canonical config, and
// ends with a whole-file CRC32.
void save_checkpoint(const std::string& path, const Network& net,
                     uint64_t stream_position, const IntervalTracker& tracker);

// Restores into a network built from the same config; the embedded config
// echo must match or the file is rejected. Returns the stream position.
uint64_t load_checkpoint(const std::string& path, Network& net,
                         IntervalTracker& tracker);

// Reads just the config echo, for inspection.
std::string peek_checkpoint_config(const std::string& path);

}  // namespace tnn
