#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ct/transfer.hpp"

namespace ct {

struct CliArgs {
    std::string source;
    std::string example;
    std::string out_dir;
    TransferConfig cfg;  // assembled and validated, sigma2 already rescaled
    bool metrics = false;
    PosteriorMode mode = PosteriorMode::kTruncated;
};

// Thrown when --help is requested; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parses long-form flags (argv without the program name). A --config file
// of key=value lines supplies defaults; explicit flags win. Throws
// UsageError naming the offending flag, or HelpRequested.
CliArgs parse_args(const std::vector<std::string>& argv);

// Runs the pipeline and writes frames, nll_trace.csv and (optionally)
// metrics.json into args.out_dir. Throws ct::Error subclasses on failure.
void run_pipeline(const CliArgs& args);

// run_pipeline wrapped into an exit code: 0 success, 1 pipeline error
// (diagnostic on stderr).
int cli_main(const CliArgs& args);

}  // namespace ct
