#include "fracflow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fracflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_open(const std::filesystem::path& path,
                            const char* verb) {
  throw std::runtime_error(std::string("cannot ") + verb + " " +
                           path.string());
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) fail_open(path, "write");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed number: '" + std::string(s) + "'");
  }
  return value;
}

void write_snapshot(const std::filesystem::path& path, const PeriodicField& u,
                    double alpha, double t) {
  auto out = open_out(path);
  out << u.grid.dim << ' ' << u.grid.m << ' ' << format_double(alpha) << ' '
      << format_double(t) << '\n';
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    out << format_double(u.values[i]) << '\n';
  }
  if (!out) fail_open(path, "write");
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail_open(path, "read");
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("snapshot file truncated: " + path.string());
  }
  std::istringstream hs(header);
  std::string dim_tok, m_tok, alpha_tok, t_tok;
  if (!(hs >> dim_tok >> m_tok >> alpha_tok >> t_tok)) {
    throw std::runtime_error("bad snapshot header: " + header);
  }
  SnapshotFile snap;
  snap.field.grid = GridSpec(int(parse_double(dim_tok)),
                             int(parse_double(m_tok)));
  snap.alpha = parse_double(alpha_tok);
  snap.t = parse_double(t_tok);
  const Eigen::Index n = snap.field.grid.size();
  snap.field.values.resize(n);
  std::string tok;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> tok)) {
      throw std::runtime_error("snapshot file truncated: " + path.string());
    }
    snap.field.values[i] = parse_double(tok);
  }
  return snap;
}

void write_trace_csv(const std::filesystem::path& path, const FlowTrace& tr) {
  auto out = open_out(path);
  out << "t,sup";
  for (std::size_t a = 0; a < tr.grad_sup_norms.size(); ++a) {
    out << ",grad_sup_x" << (a + 1);
  }
  out << ",dt_sup,mean,osc,besov\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out << format_double(tr.times[i]) << ',' << format_double(tr.sup_norms[i]);
    for (const auto& axis : tr.grad_sup_norms) {
      out << ',' << format_double(axis[i]);
    }
    out << ',' << format_double(tr.dt_sup_norms[i]) << ','
        << format_double(tr.means[i]) << ','
        << format_double(tr.osc_sup_norms[i]) << ','
        << format_double(tr.besov[i]) << '\n';
  }
  if (!out) fail_open(path, "write");
}

std::vector<double> CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) {
      std::vector<double> out(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][c];
      return out;
    }
  }
  throw std::invalid_argument("no such column: " + std::string(name));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail_open(path, "read");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV: " + path.string());
  }
  std::string cell;
  {
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      table.columns.emplace_back(trim(cell));
    }
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    row.reserve(table.columns.size());
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
    if (row.size() != table.columns.size()) {
      throw std::runtime_error("ragged CSV row in " + path.string());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace fracflow
