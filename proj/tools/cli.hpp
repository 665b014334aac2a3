#pragma once

namespace peerlex::cli {

// Exit codes: 0 success, 1 partial failure or runtime error, 2 invalid input.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitInvalid = 2;

int run(int argc, char** argv);

}  // namespace peerlex::cli
