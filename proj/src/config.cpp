#include "fracflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fracflow/io.hpp"

namespace fracflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

long long parse_int(std::string_view key, std::string_view s) {
  s = trim(s);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer for " + std::string(key) + ": '" +
                                std::string(s) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view s) {
  try {
    return parse_double(s);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad number for " + std::string(key) + ": '" +
                                std::string(trim(s)) + "'");
  }
}

TimeScheme parse_scheme(std::string_view s) {
  s = trim(s);
  if (s == "imex_cn") return TimeScheme::imex_cn;
  if (s == "explicit_rk2") return TimeScheme::explicit_rk2;
  throw std::invalid_argument("unknown time scheme: '" + std::string(s) +
                              "' (expected imex_cn or explicit_rk2)");
}

const char* scheme_name(TimeScheme s) {
  return s == TimeScheme::imex_cn ? "imex_cn" : "explicit_rk2";
}

}  // namespace

bool RunConfig::holder_conforming() const {
  const double a = params.alpha;
  return std::max(a, beta) < gamma && gamma < std::min(1.0, a + beta);
}

std::string RunConfig::resolved_text() const {
  std::ostringstream os;
  const auto put = [&os](std::string_view key, const std::string& value) {
    os << key << " = " << value << "\n";
  };
  put("dim", std::to_string(params.dim));
  put("alpha", format_double(params.alpha));
  put("grid_m", std::to_string(grid.m));
  put("beta", format_double(beta));
  put("gamma", format_double(gamma));
  os << "# holder triple "
     << (holder_conforming() ? "conforming" : "nonconforming")
     << ": admissible range is max{alpha, beta} < gamma < min{1, alpha + "
        "beta}\n";
  put("inner_radius", format_double(scheme.inner_radius));
  put("inner_radial_nodes", std::to_string(scheme.inner_radial_nodes));
  put("inner_angular_nodes", std::to_string(scheme.inner_angular_nodes));
  put("lattice_cells", std::to_string(scheme.lattice_cells));
  put("cell_nodes_per_axis", std::to_string(scheme.cell_nodes_per_axis));
  put("far_nodes_per_axis", std::to_string(scheme.far_nodes_per_axis));
  put("lattice_sum_extent", std::to_string(scheme.lattice_sum_extent));
  put("dt", format_double(stepper.dt));
  put("t_end", format_double(stepper.t_end));
  put("scheme", scheme_name(stepper.scheme));
  put("implicit_symbol_scale", format_double(stepper.implicit_symbol_scale));
  put("snapshot_every", std::to_string(stepper.snapshot_every));
  put("seed", std::to_string(seed));
  put("threads", std::to_string(threads));
  put("out_dir", out_dir.string());
  return os.str();
}

void apply_config_override(RunConfig& cfg, std::string_view key,
                           std::string_view value) {
  key = trim(key);
  if (key == "dim") {
    const int dim = int(parse_int(key, value));
    cfg.params = FlowParams(cfg.params.alpha, dim);
    cfg.grid = GridSpec(dim, cfg.grid.m);
    cfg.scheme = QuadratureScheme::defaults(dim);
  } else if (key == "alpha") {
    cfg.params = FlowParams(parse_real(key, value), cfg.params.dim);
  } else if (key == "grid_m") {
    cfg.grid = GridSpec(cfg.grid.dim, int(parse_int(key, value)));
  } else if (key == "beta") {
    cfg.beta = parse_real(key, value);
  } else if (key == "gamma") {
    cfg.gamma = parse_real(key, value);
  } else if (key == "inner_radius") {
    cfg.scheme.inner_radius = parse_real(key, value);
  } else if (key == "inner_radial_nodes") {
    cfg.scheme.inner_radial_nodes = int(parse_int(key, value));
  } else if (key == "inner_angular_nodes") {
    cfg.scheme.inner_angular_nodes = int(parse_int(key, value));
  } else if (key == "lattice_cells") {
    cfg.scheme.lattice_cells = int(parse_int(key, value));
  } else if (key == "cell_nodes_per_axis") {
    cfg.scheme.cell_nodes_per_axis = int(parse_int(key, value));
  } else if (key == "far_nodes_per_axis") {
    cfg.scheme.far_nodes_per_axis = int(parse_int(key, value));
  } else if (key == "lattice_sum_extent") {
    cfg.scheme.lattice_sum_extent = int(parse_int(key, value));
  } else if (key == "dt") {
    const double dt = parse_real(key, value);
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    cfg.stepper.dt = dt;
  } else if (key == "t_end") {
    const double t_end = parse_real(key, value);
    if (!(t_end >= 0)) throw std::invalid_argument("t_end must be >= 0");
    cfg.stepper.t_end = t_end;
  } else if (key == "scheme") {
    cfg.stepper.scheme = parse_scheme(value);
  } else if (key == "implicit_symbol_scale") {
    const double s = parse_real(key, value);
    if (!(s >= 0)) {
      throw std::invalid_argument("implicit_symbol_scale must be >= 0");
    }
    cfg.stepper.implicit_symbol_scale = s;
  } else if (key == "snapshot_every") {
    const long long every = parse_int(key, value);
    if (every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
    cfg.stepper.snapshot_every = int(every);
  } else if (key == "seed") {
    cfg.seed = std::uint64_t(parse_int(key, value));
  } else if (key == "threads") {
    const long long t = parse_int(key, value);
    if (t < 0) throw std::invalid_argument("threads must be >= 0");
    cfg.threads = int(t);
  } else if (key == "out_dir") {
    const auto v = trim(value);
    if (v.empty()) throw std::invalid_argument("out_dir must be non-empty");
    cfg.out_dir = std::string(v);
  } else {
    throw std::invalid_argument("unknown config key: '" + std::string(key) +
                                "'");
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  " is not 'key = value': '" +
                                  std::string(body) + "'");
    }
    apply_config_override(base, body.substr(0, eq), body.substr(eq + 1));
  }
  base.scheme.validate(base.params.dim);
  return base;
}

RunConfig parse_config_file(const std::filesystem::path& path,
                            RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot read config file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), std::move(base));
}

void write_resolved(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "config.resolved";
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << cfg.resolved_text();
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace fracflow
