#pragma once

#include "dnpsim/diffusion/diffusion.hpp"
#include "dnpsim/series.hpp"
#include "dnpsim/spin_system.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>

namespace dnpsim::io {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Writes through a temporary file and a rename, so readers never see a
/// partial file. Throws IoError naming the path.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// time,p_spin0..p_spinN-1,se_spin0..se_spinN-1
std::string series_csv(const PolarizationSeries& s);
void write_series(const std::filesystem::path& path, const PolarizationSeries& s);
/// Throws IoError for unreadable files and ConfigError for a malformed table.
PolarizationSeries read_series(const std::filesystem::path& path);

/// One site per line, "x y z" in angstrom, electron first; '#' starts a comment.
std::string geometry_table(const Geometry& g);
void write_geometry(const std::filesystem::path& path, const Geometry& g);
Geometry read_geometry(const std::filesystem::path& path);

/// Dense matrix, comma separated, one row per line.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// x,t,p rows for every node and grid time.
void write_field(const std::filesystem::path& path, const diffusion::DiffusionField& f);
/// level,t,x rows.
void write_contours(const std::filesystem::path& path, std::span<const diffusion::ContourCurve> curves);

}  // namespace dnpsim::io
