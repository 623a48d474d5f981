#include "psn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace psn {

namespace {

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct KeyBinding {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& where) {
  throw Error(Errc::invalid_parameter, "bad value for '" + key + "' at " + where);
}

double parse_double(const std::string& key, const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) bad_value(key, where);
    return d;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, where);
  }
}

long long parse_int(const std::string& key, const std::string& v, const std::string& where) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) bad_value(key, where);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, where);
}

const std::map<std::string, KeyBinding>& bindings() {
  static const std::map<std::string, KeyBinding> kMap = [] {
    std::map<std::string, KeyBinding> m;
    auto dbl = [&m](const std::string& key, double RunConfig::* field) {
      m[key] = {[key, field](RunConfig& c, const std::string& v, const std::string& w) {
                  c.*field = parse_double(key, v, w);
                },
                [field](const RunConfig& c) { return format_g17(c.*field); }};
    };
    auto integer = [&m](const std::string& key, int RunConfig::* field) {
      m[key] = {[key, field](RunConfig& c, const std::string& v, const std::string& w) {
                  c.*field = static_cast<int>(parse_int(key, v, w));
                },
                [field](const RunConfig& c) { return std::to_string(c.*field); }};
    };
    auto str = [&m](const std::string& key, std::string RunConfig::* field) {
      m[key] = {[](RunConfig&, const std::string&, const std::string&) {},
                [field](const RunConfig& c) { return c.*field; }};
      m[key].set = [field](RunConfig& c, const std::string& v, const std::string&) {
        c.*field = v;
      };
    };
    auto boolean = [&m](const std::string& key, bool RunConfig::* field) {
      m[key] = {[key, field](RunConfig& c, const std::string& v, const std::string& w) {
                  c.*field = parse_bool(key, v, w);
                },
                [field](const RunConfig& c) { return c.*field ? "true" : "false"; }};
    };

    dbl("L", &RunConfig::L);
    integer("N", &RunConfig::N);
    str("initial", &RunConfig::initial);
    dbl("amplitude", &RunConfig::amplitude);
    dbl("width", &RunConfig::width);
    dbl("base", &RunConfig::base);
    dbl("eps", &RunConfig::eps);
    integer("mode", &RunConfig::mode);
    str("initial_file", &RunConfig::initial_file);
    boolean("require_positive_momentum", &RunConfig::require_positive_momentum);
    dbl("dt", &RunConfig::dt);
    dbl("t_end", &RunConfig::t_end);
    dbl("resolution_guard", &RunConfig::resolution_guard);
    dbl("cfl_guard", &RunConfig::cfl_guard);
    dbl("breaking_ceiling", &RunConfig::breaking_ceiling);
    dbl("domain_mass_warn", &RunConfig::domain_mass_warn);
    m["sample_times"] = {
        [](RunConfig& c, const std::string& v, const std::string& w) {
          c.sample_times.clear();
          if (v.empty()) return;
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ','))
            c.sample_times.push_back(parse_double("sample_times", item, w));
        },
        [](const RunConfig& c) {
          std::string out;
          for (size_t i = 0; i < c.sample_times.size(); ++i) {
            if (i) out += ',';
            out += format_g17(c.sample_times[i]);
          }
          return out;
        }};
    dbl("gevrey_sigma", &RunConfig::gevrey_sigma);
    dbl("gevrey_s", &RunConfig::gevrey_s);
    dbl("km_sigma", &RunConfig::km_sigma);
    integer("km_m", &RunConfig::km_m);
    dbl("hm_sigma", &RunConfig::hm_sigma);
    integer("hm_m", &RunConfig::hm_m);
    integer("hm_jmax", &RunConfig::hm_jmax);
    dbl("sigma0", &RunConfig::sigma0);
    str("cs", &RunConfig::cs);
    m["seed"] = {[](RunConfig& c, const std::string& v, const std::string& w) {
                   c.seed = static_cast<std::uint64_t>(parse_int("seed", v, w));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    integer("taylor_order", &RunConfig::taylor_order);
    dbl("u0_gnorm", &RunConfig::u0_gnorm);
    dbl("lifespan_R", &RunConfig::lifespan_R);
    dbl("mu_metric", &RunConfig::mu_metric);
    integer("m1", &RunConfig::m1);
    integer("sign", &RunConfig::sign);
    dbl("dt_stencil", &RunConfig::dt_stencil);
    integer("curvature_snapshots", &RunConfig::curvature_snapshots);
    dbl("genericity_threshold_rel", &RunConfig::genericity_threshold_rel);
    integer("corpus_fields", &RunConfig::corpus_fields);
    integer("corpus_kband", &RunConfig::corpus_kband);
    str("out_dir", &RunConfig::out_dir);
    return m;
  }();
  return kMap;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

InitialDataSpec RunConfig::initial_spec() const {
  InitialDataSpec s;
  if (initial == "sech") s.kind = InitialKind::sech;
  else if (initial == "gaussian_momentum") s.kind = InitialKind::gaussian_momentum;
  else if (initial == "mode_perturbation") s.kind = InitialKind::mode_perturbation;
  else if (initial == "from_file") s.kind = InitialKind::from_file;
  else
    throw Error(Errc::invalid_parameter,
                "initial must be one of sech, gaussian_momentum, mode_perturbation, from_file");
  s.amplitude = amplitude;
  s.width = width;
  s.base = base;
  s.eps = eps;
  s.mode = mode;
  s.file = initial_file;
  s.require_positive_momentum = require_positive_momentum;
  return s;
}

StepConfig RunConfig::step_config() const {
  StepConfig s;
  s.dt = dt;
  s.t_end = t_end;
  s.resolution_guard = resolution_guard;
  s.cfl_guard = cfl_guard;
  s.breaking_ceiling = breaking_ceiling;
  s.domain_mass_warn = domain_mass_warn;
  return s;
}

PSSParams RunConfig::pss_params() const {
  PSSParams p{mu_metric, m1, sign};
  p.validate();
  return p;
}

void RunConfig::validate() const {
  grid();  // grid invariants
  step_config().validate();
  pss_params();
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > t_end)
      throw Error(Errc::invalid_parameter, "sample_times must lie in [0, t_end]");
    if (i > 0 && sample_times[i] <= sample_times[i - 1])
      throw Error(Errc::invalid_parameter, "sample_times must be strictly increasing");
  }
  if (cs != "measured") {
    const double v = parse_double("cs", cs, "<config>");
    if (!(v > 0.0)) throw Error(Errc::invalid_parameter, "cs must be positive or 'measured'");
  }
  if (taylor_order < 0 || taylor_order > 40)
    throw Error(Errc::invalid_parameter, "taylor_order must be in [0, 40]");
  if (curvature_snapshots < 5)
    throw Error(Errc::invalid_parameter, "curvature_snapshots must be >= 5");
  if (!(dt_stencil > 0.0)) throw Error(Errc::invalid_parameter, "dt_stencil must be positive");
  if (corpus_fields < 1) throw Error(Errc::invalid_parameter, "corpus_fields must be >= 1");
}

RunConfig parse_config(std::istream& is, const std::string& source_name) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source_name + ":" + std::to_string(lineno);
    if (eq == std::string::npos)
      throw Error(Errc::invalid_parameter, "expected 'key = value' at " + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& map = bindings();
    const auto it = map.find(key);
    if (it == map.end()) {
      int best = std::numeric_limits<int>::max();
      std::string suggestion;
      for (const auto& [k, _] : map) {
        const int d = levenshtein(key, k);
        if (d < best) {
          best = d;
          suggestion = k;
        }
      }
      std::string msg = "unknown key '" + key + "' at " + where;
      if (best <= std::max<int>(3, static_cast<int>(key.size()) / 2))
        msg += "; did you mean '" + suggestion + "'?";
      throw Error(Errc::invalid_parameter, msg);
    }
    it->second.set(cfg, value, where);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io_error, "cannot open config file " + path);
  return parse_config(is, path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [key, binding] : bindings()) {
    out += key;
    out += " = ";
    out += binding.get(cfg);
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> config_as_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, binding] : bindings()) out.emplace_back(key, binding.get(cfg));
  return out;
}

AlgebraConstant resolve_cs(const RunConfig& cfg) {
  AlgebraConstant a;
  if (cfg.cs != "measured") {
    a.value = std::stod(cfg.cs);
    return a;
  }
  a.measured = true;
  a.pairs = 48;
  a.seed = cfg.seed;
  a.raw_max = measure_algebra_constant(cfg.grid(), cfg.gevrey_sigma, cfg.gevrey_s, a.pairs,
                                       cfg.seed);
  a.value = 2.0 * a.raw_max;  // safety factor 2
  return a;
}

}  // namespace psn
