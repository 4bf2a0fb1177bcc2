#pragma once

namespace gbdp_cli {

// Entry point of the gbdp tool. Exit codes: 0 success, 1 usage error,
// 2 domain error, 3 numerical-tolerance failure.
int run(int argc, char** argv);

}  // namespace gbdp_cli
