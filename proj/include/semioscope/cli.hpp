#pragma once

#include <string>
#include <vector>

namespace semioscope {

/// Entry point behind the semioscope binary. Returns the process exit code:
/// 0 on success, 1 on validation/usage errors, 2 on I/O errors. A failed
/// certification is data, not an error, and still exits 0.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

} // namespace semioscope
