#include "gpe/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gpe/errors.hpp"

namespace gpe {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config: key '" + key + "': '" + v + "' is not a number");
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config: key '" + key + "': '" + v + "' is not an integer");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || v.find('-') != std::string::npos)
    throw ConfigError("config: key '" + key + "': '" + v + "' is not an unsigned integer");
  return static_cast<std::uint64_t>(x);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<int> parse_paths(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError("paths: empty token in '" + s + "'");
    const std::size_t dots = tok.find("..");
    long lo, hi;
    if (dots == std::string::npos) {
      lo = hi = to_long("paths", tok);
    } else {
      lo = to_long("paths", trim(tok.substr(0, dots)));
      hi = to_long("paths", trim(tok.substr(dots + 2)));
    }
    if (lo < 1 || hi < lo) throw ConfigError("paths: bad range '" + tok + "'");
    if (hi - lo > 100000) throw ConfigError("paths: range too large");
    for (long k = lo; k <= hi; ++k) out.insert(static_cast<int>(k));
  }
  if (out.empty()) throw ConfigError("paths: empty set");
  return {out.begin(), out.end()};
}

std::string format_paths(const std::vector<int>& paths) {
  std::vector<int> p = paths;
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::string s;
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j + 1 < p.size() && p[j + 1] == p[j] + 1) ++j;
    if (!s.empty()) s += ',';
    if (j == i)
      s += std::to_string(p[i]);
    else if (j == i + 1)
      s += std::to_string(p[i]) + ',' + std::to_string(p[j]);
    else
      s += std::to_string(p[i]) + ".." + std::to_string(p[j]);
    i = j + 1;
  }
  return s;
}

RunConfig parse_config_text(const std::string& text, const std::string& base_dir,
                            const std::vector<double>* potential_table) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key");
    if (!seen.insert(key).second) throw ConfigError("config: duplicate key '" + key + "'");
    kv.emplace_back(std::move(key), std::move(val));
  }

  RunConfig cfg;
  int dim = 0;
  for (const auto& [k, v] : kv)
    if (k == "dim") dim = static_cast<int>(to_long(k, v));
  if (dim != 1 && dim != 2) throw ConfigError("config: 'dim' must be present and 1 or 2");
  cfg.spec.dim = dim;

  std::set<std::string> present;
  std::string potential_val;
  for (const auto& [k, v] : kv) {
    present.insert(k);
    if (k == "dim") {
    } else if (k == "domain.a") {
      cfg.spec.dom.a = to_double(k, v);
    } else if (k == "domain.b") {
      cfg.spec.dom.b = to_double(k, v);
    } else if (k == "domain.c") {
      if (dim != 2) throw ConfigError("config: 'domain.c' is only valid for dim=2");
      cfg.spec.dom.c = to_double(k, v);
    } else if (k == "domain.d") {
      if (dim != 2) throw ConfigError("config: 'domain.d' is only valid for dim=2");
      cfg.spec.dom.d = to_double(k, v);
    } else if (k == "grid.n") {
      cfg.spec.n = to_long(k, v);
    } else if (k == "grid.m") {
      if (dim != 2) throw ConfigError("config: 'grid.m' is only valid for dim=2");
      cfg.spec.m = to_long(k, v);
    } else if (k == "beta") {
      cfg.spec.beta = to_double(k, v);
    } else if (k == "potential") {
      potential_val = v;
    } else if (k == "kind") {
      cfg.kind = v;
      kind_from_string(v);  // validates
    } else if (k == "sigma") {
      if (v == "auto")
        cfg.sigma.reset();
      else
        cfg.sigma = to_double(k, v);
    } else if (k == "seed") {
      cfg.seed = to_u64(k, v);
    } else if (k == "paths") {
      cfg.paths = parse_paths(v);
    } else if (k == "workers") {
      cfg.workers = static_cast<int>(to_long(k, v));
    } else if (k == "out") {
      cfg.out = v;
    } else if (k == "trace.ds0") {
      cfg.trace.ds0 = to_double(k, v);
    } else if (k == "trace.ds_min") {
      cfg.trace.ds_min = to_double(k, v);
    } else if (k == "trace.ds_max") {
      cfg.trace.ds_max = to_double(k, v);
    } else if (k == "trace.angle_halve_deg") {
      cfg.trace.angle_halve_deg = to_double(k, v);
    } else if (k == "trace.angle_double_deg") {
      cfg.trace.angle_double_deg = to_double(k, v);
    } else if (k == "trace.newton_tol") {
      cfg.trace.newton_tol = to_double(k, v);
    } else if (k == "trace.newton_max_iter") {
      cfg.trace.newton_max_iter = static_cast<int>(to_long(k, v));
    } else if (k == "trace.max_steps") {
      cfg.trace.max_steps = to_long(k, v);
    } else {
      throw ConfigError("config: unknown key '" + k + "'");
    }
  }

  for (const char* req : {"domain.a", "domain.b", "grid.n", "beta"})
    if (!present.count(req)) throw ConfigError(std::string("config: missing required key '") + req + "'");
  if (dim == 2)
    for (const char* req : {"domain.c", "domain.d", "grid.m"})
      if (!present.count(req)) throw ConfigError(std::string("config: missing required key '") + req + "' for dim=2");

  if (!potential_val.empty() && potential_val != "harmonic") {
    if (potential_val.rfind("file:", 0) != 0)
      throw ConfigError("config: potential must be 'harmonic' or 'file:<path>'");
    cfg.spec.pot.id = "table";
    cfg.spec.pot.source = potential_val;
    cfg.spec.pot.table.clear();
    if (potential_table) {
      cfg.spec.pot.table = *potential_table;
    } else {
      const std::string ref = potential_val.substr(5);
      std::filesystem::path fp(ref);
      if (fp.is_relative() && !base_dir.empty()) fp = std::filesystem::path(base_dir) / fp;
      std::ifstream in(fp);
      if (!in) throw ConfigError("config: cannot open potential file '" + fp.string() + "'");
      std::string tline;
      while (std::getline(in, tline)) {
        const std::size_t hash = tline.find('#');
        if (hash != std::string::npos) tline.erase(hash);
        std::stringstream ls(tline);
        double x;
        while (ls >> x) cfg.spec.pot.table.push_back(x);
      }
    }
  }

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_config(const RunConfig& cfg, bool include_workers) {
  std::string s;
  s += "dim = " + std::to_string(cfg.spec.dim) + "\n";
  s += "domain.a = " + fmt(cfg.spec.dom.a) + "\n";
  s += "domain.b = " + fmt(cfg.spec.dom.b) + "\n";
  if (cfg.spec.dim == 2) {
    s += "domain.c = " + fmt(cfg.spec.dom.c) + "\n";
    s += "domain.d = " + fmt(cfg.spec.dom.d) + "\n";
    s += "grid.m = " + std::to_string(cfg.spec.m) + "\n";
  }
  s += "grid.n = " + std::to_string(cfg.spec.n) + "\n";
  s += "beta = " + fmt(cfg.spec.beta) + "\n";
  s += "potential = " + (cfg.spec.pot.id == "harmonic" ? std::string("harmonic") : cfg.spec.pot.source) + "\n";
  s += "kind = " + (cfg.kind.empty() ? kind_to_string(default_kind(cfg.spec.dim)) : cfg.kind) + "\n";
  s += "sigma = " + (cfg.sigma ? fmt(*cfg.sigma) : std::string("auto")) + "\n";
  s += "seed = " + std::to_string(cfg.seed) + "\n";
  s += "paths = " + format_paths(cfg.paths) + "\n";
  if (include_workers) s += "workers = " + std::to_string(cfg.workers) + "\n";
  s += "out = " + cfg.out + "\n";
  s += "trace.ds0 = " + fmt(cfg.trace.ds0) + "\n";
  s += "trace.ds_min = " + fmt(cfg.trace.ds_min) + "\n";
  s += "trace.ds_max = " + fmt(cfg.trace.ds_max) + "\n";
  s += "trace.angle_halve_deg = " + fmt(cfg.trace.angle_halve_deg) + "\n";
  s += "trace.angle_double_deg = " + fmt(cfg.trace.angle_double_deg) + "\n";
  s += "trace.newton_tol = " + fmt(cfg.trace.newton_tol) + "\n";
  s += "trace.newton_max_iter = " + std::to_string(cfg.trace.newton_max_iter) + "\n";
  s += "trace.max_steps = " + std::to_string(cfg.trace.max_steps) + "\n";
  return s;
}

void validate(const RunConfig& cfg) {
  validate(cfg.spec);
  validate(cfg.trace);
  if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (cfg.workers > 1024) throw ConfigError("config: workers must be <= 1024");
  if (cfg.paths.empty()) throw ConfigError("config: path set is empty");
  if (cfg.out.empty()) throw ConfigError("config: output directory must not be empty");
  if (cfg.sigma && *cfg.sigma < 0.0) throw ConfigError("config: sigma must be >= 0");
  if (!cfg.kind.empty()) {
    const RandomMatrixKind k = kind_from_string(cfg.kind);
    if ((k == RandomMatrixKind::Diag1D) != (cfg.spec.dim == 1))
      throw ConfigError("config: kind '" + cfg.kind + "' does not match dim=" +
                        std::to_string(cfg.spec.dim));
  }
}

}  // namespace gpe
