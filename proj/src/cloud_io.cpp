#include "dcreg/cloud_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dcreg/errors.hpp"

namespace dcreg {
namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) tokens.push_back(tok);
  return tokens;
}

void renormalize_normals(PointCloud& cloud) {
  for (auto& n : cloud.normals) {
    const double len = n.norm();
    if (len > 1e-12) n /= len;
    else n.setZero();
  }
}

PointCloud load_xyz(std::istream& in, const std::string& path) {
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  bool with_normals = false;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (first_row) {
      if (tokens.size() != 3 && tokens.size() != 6) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected 3 or 6 values per row");
      }
      with_normals = tokens.size() == 6;
      first_row = false;
    }
    const std::size_t expected = with_normals ? 6 : 3;
    if (tokens.size() != expected) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    double v[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t j = 0; j < expected; ++j) {
      if (!parse_double(tokens[j], v[j])) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" + tokens[j] + "'");
      }
    }
    cloud.points.emplace_back(v[0], v[1], v[2]);
    if (with_normals) cloud.normals.emplace_back(v[3], v[4], v[5]);
  }
  if (cloud.empty()) throw EmptyCloud(path + ": no points");
  renormalize_normals(cloud);
  return cloud;
}

PointCloud load_ply(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line) || split_ws(line) != std::vector<std::string>{"ply"}) {
    throw ParseError(path + ": missing 'ply' magic");
  }

  std::size_t vertex_count = 0;
  bool in_vertex_element = false;
  bool saw_format = false;
  std::vector<std::string> vertex_props;
  while (std::getline(in, line)) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0] == "comment") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2 || tokens[1] != "ascii") {
        throw ParseError(path + ": only 'format ascii 1.0' is supported");
      }
      saw_format = true;
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) throw ParseError(path + ": malformed element line");
      in_vertex_element = tokens[1] == "vertex";
      if (in_vertex_element) {
        double n = 0;
        if (!parse_double(tokens[2], n) || n < 0) {
          throw ParseError(path + ": bad vertex count");
        }
        vertex_count = static_cast<std::size_t>(n);
      }
    } else if (tokens[0] == "property") {
      if (in_vertex_element) {
        if (tokens.size() != 3) throw ParseError(path + ": malformed property line");
        vertex_props.push_back(tokens[2]);
      }
    } else if (tokens[0] == "end_header") {
      break;
    } else {
      throw ParseError(path + ": unexpected header line '" + line + "'");
    }
  }
  if (!saw_format) throw ParseError(path + ": header has no format line");

  auto find_prop = [&](const std::string& name) {
    for (std::size_t j = 0; j < vertex_props.size(); ++j) {
      if (vertex_props[j] == name) return static_cast<int>(j);
    }
    return -1;
  };
  const int ix = find_prop("x"), iy = find_prop("y"), iz = find_prop("z");
  if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path + ": vertex element lacks x/y/z");
  const int inx = find_prop("nx"), iny = find_prop("ny"), inz = find_prop("nz");
  const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError(path + ": header declares " + std::to_string(vertex_count) +
                       " vertices but file has " + std::to_string(i));
    }
    const auto tokens = split_ws(line);
    if (tokens.size() < vertex_props.size()) {
      throw ParseError(path + ": vertex row " + std::to_string(i) + " too short");
    }
    double vals[6];
    const int idx[6] = {ix, iy, iz, inx, iny, inz};
    for (int j = 0; j < (with_normals ? 6 : 3); ++j) {
      if (!parse_double(tokens[static_cast<std::size_t>(idx[j])], vals[j])) {
        throw ParseError(path + ": bad number in vertex row " + std::to_string(i));
      }
    }
    cloud.points.emplace_back(vals[0], vals[1], vals[2]);
    if (with_normals) cloud.normals.emplace_back(vals[3], vals[4], vals[5]);
  }
  if (cloud.empty()) throw EmptyCloud(path + ": no points");
  renormalize_normals(cloud);
  return cloud;
}

PointCloud load_pcd(std::istream& in, const std::string& path) {
  std::string line;
  std::vector<std::string> fields;
  std::size_t point_count = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    if (tokens[0] == "FIELDS") {
      fields.assign(tokens.begin() + 1, tokens.end());
    } else if (tokens[0] == "POINTS") {
      double n = 0;
      if (tokens.size() != 2 || !parse_double(tokens[1], n) || n < 0) {
        throw ParseError(path + ": bad POINTS line");
      }
      point_count = static_cast<std::size_t>(n);
    } else if (tokens[0] == "DATA") {
      if (tokens.size() != 2 || tokens[1] != "ascii") {
        throw ParseError(path + ": only 'DATA ascii' is supported");
      }
      saw_data = true;
      break;
    }
    // SIZE/TYPE/COUNT/WIDTH/HEIGHT/VIEWPOINT/VERSION are accepted and ignored.
  }
  if (!saw_data) throw ParseError(path + ": missing DATA ascii section");
  if (fields.empty()) throw ParseError(path + ": missing FIELDS line");

  auto find_field = [&](const std::string& name) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j] == name) return static_cast<int>(j);
    }
    return -1;
  };
  const int ix = find_field("x"), iy = find_field("y"), iz = find_field("z");
  if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path + ": FIELDS lack x y z");
  const int inx = find_field("normal_x"), iny = find_field("normal_y"), inz = find_field("normal_z");
  const bool with_normals = inx >= 0 && iny >= 0 && inz >= 0;

  PointCloud cloud;
  cloud.points.reserve(point_count);
  for (std::size_t i = 0; i < point_count; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError(path + ": POINTS declares " + std::to_string(point_count) +
                       " rows but file has " + std::to_string(i));
    }
    const auto tokens = split_ws(line);
    if (tokens.size() < fields.size()) {
      throw ParseError(path + ": point row " + std::to_string(i) + " too short");
    }
    double vals[6];
    const int idx[6] = {ix, iy, iz, inx, iny, inz};
    for (int j = 0; j < (with_normals ? 6 : 3); ++j) {
      if (!parse_double(tokens[static_cast<std::size_t>(idx[j])], vals[j])) {
        throw ParseError(path + ": bad number in point row " + std::to_string(i));
      }
    }
    cloud.points.emplace_back(vals[0], vals[1], vals[2]);
    if (with_normals) cloud.normals.emplace_back(vals[3], vals[4], vals[5]);
  }
  if (cloud.empty()) throw EmptyCloud(path + ": no points");
  renormalize_normals(cloud);
  return cloud;
}

void write_number(std::string& buf, double v) {
  char tmp[32];
  const int len = std::snprintf(tmp, sizeof(tmp), "%.17g", v);
  buf.append(tmp, static_cast<std::size_t>(len));
}

void write_row(std::string& buf, const PointCloud& cloud, std::size_t i, bool with_normals) {
  write_number(buf, cloud.points[i].x());
  buf.push_back(' ');
  write_number(buf, cloud.points[i].y());
  buf.push_back(' ');
  write_number(buf, cloud.points[i].z());
  if (with_normals) {
    for (int j = 0; j < 3; ++j) {
      buf.push_back(' ');
      write_number(buf, cloud.normals[i][j]);
    }
  }
  buf.push_back('\n');
}

}  // namespace

CloudFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
  if (ext == "ply") return CloudFormat::kPlyAscii;
  if (ext == "pcd") return CloudFormat::kPcdAscii;
  return CloudFormat::kXyz;
}

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  switch (format) {
    case CloudFormat::kPlyAscii: return load_ply(in, path);
    case CloudFormat::kPcdAscii: return load_pcd(in, path);
    case CloudFormat::kXyz: return load_xyz(in, path);
  }
  throw ParseError("unknown format");
}

PointCloud load_cloud(const std::string& path) {
  return load_cloud(path, format_from_path(path));
}

void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format) {
  if (cloud.empty()) throw EmptyCloud("refusing to save an empty cloud");
  if (cloud.has_normals() && cloud.normals.size() != cloud.points.size()) {
    throw IoError("normal count does not match point count");
  }
  const bool with_normals = cloud.has_normals();

  std::string buf;
  buf.reserve(cloud.size() * 64);
  switch (format) {
    case CloudFormat::kPlyAscii: {
      buf += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
      buf += "property float x\nproperty float y\nproperty float z\n";
      if (with_normals) buf += "property float nx\nproperty float ny\nproperty float nz\n";
      buf += "end_header\n";
      break;
    }
    case CloudFormat::kPcdAscii: {
      const char* f = with_normals ? "x y z normal_x normal_y normal_z" : "x y z";
      const char* ones = with_normals ? "1 1 1 1 1 1" : "1 1 1";
      const char* sizes = with_normals ? "8 8 8 8 8 8" : "8 8 8";
      const char* types = with_normals ? "F F F F F F" : "F F F";
      buf += "# .PCD v0.7 - Point Cloud Data file format\nVERSION 0.7\n";
      buf += std::string("FIELDS ") + f + "\n";
      buf += std::string("SIZE ") + sizes + "\nTYPE " + types + "\nCOUNT " + ones + "\n";
      buf += "WIDTH " + std::to_string(cloud.size()) + "\nHEIGHT 1\n";
      buf += "VIEWPOINT 0 0 0 1 0 0 0\nPOINTS " + std::to_string(cloud.size()) + "\nDATA ascii\n";
      break;
    }
    case CloudFormat::kXyz:
      break;
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) write_row(buf, cloud, i, with_normals);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << buf;
  if (!out) throw IoError("write to '" + path + "' failed");
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  save_cloud(cloud, path, format_from_path(path));
}

}  // namespace dcreg
