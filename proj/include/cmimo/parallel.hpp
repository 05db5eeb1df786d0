#pragma once

namespace cmimo {

/// Worker count for OpenMP regions. A positive request wins; otherwise the
/// COMPOUND_MIMO_THREADS environment variable caps the OpenMP default.
int resolve_threads(int requested = 0);

}  // namespace cmimo
