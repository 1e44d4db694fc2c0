#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpe/discretize.hpp"
#include "gpe/tracer.hpp"

namespace gpe {

// Everything a run needs; maps 1:1 onto the flat key=value config format.
struct RunConfig {
  ProblemSpec spec;
  TraceConfig trace;
  std::uint64_t seed = 1;
  std::optional<double> sigma;  // empty = automatic scale
  std::string kind;             // empty = default for the dimension
  std::vector<int> paths = {1};
  int workers = 1;
  std::string out = "out";
};

// "1..9", "2", "1..3,7" -> sorted unique indices
std::vector<int> parse_paths(const std::string& s);
std::string format_paths(const std::vector<int>& paths);

// Parse config text. Unknown or duplicate keys are rejected. `base_dir`
// resolves a relative `potential = file:...` reference; when
// `potential_table` is given it is used instead of reading that file (reports
// carry the table inline so a run can be re-verified without its inputs).
RunConfig parse_config_text(const std::string& text, const std::string& base_dir = "",
                            const std::vector<double>* potential_table = nullptr);

RunConfig load_config(const std::string& path);

// Canonical text form; parse_config_text(serialize_config(c)) reproduces c.
// `include_workers=false` drops the worker count (used by the report echo,
// which must not depend on execution parameters).
std::string serialize_config(const RunConfig& cfg, bool include_workers = true);

void validate(const RunConfig& cfg);

}  // namespace gpe
