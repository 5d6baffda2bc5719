#pragma once

namespace glyphforge::cli {

/// Entry point of the `glyphforge` binary. Exit codes: 0 success, 1 domain
/// error (training, evaluation, labels), 2 usage or I/O error.
int run(int argc, char** argv);

}  // namespace glyphforge::cli
