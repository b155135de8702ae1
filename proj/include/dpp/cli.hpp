#ifndef DPP_CLI_HPP
#define DPP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dpp {

// Entry point behind the `dpp` binary; split out so tests can drive the
// interface directly. Returns 0 on success, 1 on validation failure,
// 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpp

#endif  // DPP_CLI_HPP
