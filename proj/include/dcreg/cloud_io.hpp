#ifndef DCREG_CLOUD_IO_HPP
#define DCREG_CLOUD_IO_HPP

#include <string>

#include "dcreg/point_cloud.hpp"

namespace dcreg {

enum class CloudFormat { kPlyAscii, kPcdAscii, kXyz };

/// Picks the format from the file extension (.ply/.pcd, anything else -> xyz).
CloudFormat format_from_path(const std::string& path);

/// ASCII loaders. Normals are picked up when nx/ny/nz (PLY) or
/// normal_x/y/z (PCD) columns are present, or when an XYZ row carries six
/// values; loaded normals are renormalized. Throws ParseError on malformed
/// input and EmptyCloud when the file holds zero points.
PointCloud load_cloud(const std::string& path, CloudFormat format);
PointCloud load_cloud(const std::string& path);

/// ASCII writers, full double precision so a round trip reproduces
/// coordinates exactly. Throws EmptyCloud / IoError.
void save_cloud(const PointCloud& cloud, const std::string& path, CloudFormat format);
void save_cloud(const PointCloud& cloud, const std::string& path);

}  // namespace dcreg

#endif
