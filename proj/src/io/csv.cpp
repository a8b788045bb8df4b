#include "dnpsim/io/csv.hpp"

#include "dnpsim/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dnpsim::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string series_csv(const PolarizationSeries& s) {
  const std::size_t n = s.n_spins();
  std::string out = "time";
  for (std::size_t k = 0; k < n; ++k) out += ",p_spin" + std::to_string(k);
  for (std::size_t k = 0; k < n; ++k) out += ",se_spin" + std::to_string(k);
  out += '\n';
  for (std::size_t t = 0; t < s.n_times(); ++t) {
    out += format_double(s.time[t]);
    const auto r = static_cast<Eigen::Index>(t);
    for (Eigen::Index k = 0; k < s.mean.cols(); ++k) out += ',' + format_double(s.mean(r, k));
    for (Eigen::Index k = 0; k < s.se.cols(); ++k) out += ',' + format_double(s.se(r, k));
    out += '\n';
  }
  return out;
}

void write_series(const fs::path& path, const PolarizationSeries& s) { write_text_atomic(path, series_csv(s)); }

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw ConfigError("malformed number '" + text + "' in " + where);
  return v;
}

}  // namespace

PolarizationSeries read_series(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty series file");
  const auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "time" || (header.size() - 1) % 2 != 0) {
    throw ConfigError(path.string() + ": header is not time,p_spin...,se_spin...");
  }
  const std::size_t n = (header.size() - 1) / 2;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw ConfigError(path.string() + ": row has wrong column count");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path.string()));
    rows.push_back(std::move(row));
  }
  PolarizationSeries s;
  const auto G = static_cast<Eigen::Index>(rows.size());
  s.mean.resize(G, static_cast<Eigen::Index>(n));
  s.se.resize(G, static_cast<Eigen::Index>(n));
  for (Eigen::Index t = 0; t < G; ++t) {
    const auto& row = rows[static_cast<std::size_t>(t)];
    s.time.push_back(row[0]);
    for (std::size_t k = 0; k < n; ++k) {
      s.mean(t, static_cast<Eigen::Index>(k)) = row[1 + k];
      s.se(t, static_cast<Eigen::Index>(k)) = row[1 + n + k];
    }
  }
  return s;
}

std::string geometry_table(const Geometry& g) {
  std::string out = "# x y z (angstrom), electron first\n";
  for (const auto& p : g.positions()) {
    out += format_double(p.x()) + ' ' + format_double(p.y()) + ' ' + format_double(p.z()) + '\n';
  }
  return out;
}

void write_geometry(const fs::path& path, const Geometry& g) { write_text_atomic(path, geometry_table(g)); }

Geometry read_geometry(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<Vec3> sites;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> cols;
    for (std::string tok; ls >> tok;) cols.push_back(tok);
    if (cols.empty()) continue;
    if (cols.size() != 3) throw ConfigError(path.string() + ": geometry rows need three columns");
    sites.emplace_back(parse_double(cols[0], path.string()), parse_double(cols[1], path.string()),
                       parse_double(cols[2], path.string()));
  }
  if (sites.empty()) throw ConfigError(path.string() + ": geometry has no sites");
  return Geometry(std::move(sites));
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

void write_field(const fs::path& path, const diffusion::DiffusionField& f) {
  std::string out = "x,t,p\n";
  for (std::size_t ti = 0; ti < f.t.size(); ++ti) {
    for (std::size_t i = 0; i < f.x.size(); ++i) {
      out += format_double(f.x[i]) + ',' + format_double(f.t[ti]) + ',' +
             format_double(f.p(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(i))) + '\n';
    }
  }
  write_text_atomic(path, out);
}

void write_contours(const fs::path& path, std::span<const diffusion::ContourCurve> curves) {
  std::string out = "level,t,x\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      out += format_double(c.level) + ',' + format_double(c.t[i]) + ',' + format_double(c.x[i]) + '\n';
    }
  }
  write_text_atomic(path, out);
}

}  // namespace dnpsim::io
