#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "llslp/init.hpp"
#include "llslp/ipm.hpp"

namespace llslp {

struct InstanceFile {
  std::string name;
  LpInstance lp;
  std::optional<Iterate> warmStart;
};

// Loads and validates a JSON instance document with fields A, b, c and
// optional warmStart {x, y, s} and name. Throws ParseError naming the missing
// field, DimensionMismatch, or RankDeficient.
InstanceFile parse_instance(const std::string& path);
InstanceFile parse_instance_text(const std::string& jsonText);

std::string serialize_instance(const InstanceFile& instance);

// Dispatches a subcommand (solve, rescale, chibar, circuits, diagnose) with
// its flags. Exit code 0 on success, 1 on an infeasibility certificate, 2 on
// errors. The result document goes to out, errors to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace llslp
