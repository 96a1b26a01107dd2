#pragma once

namespace probesched {

/// Entry point of the `probesched` executable. Exit status: 0 on success,
/// 1 validation failure, 2 solver non-convergence, 3 I/O failure.
int run_cli(int argc, char** argv);

}  // namespace probesched
