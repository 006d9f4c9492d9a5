#ifndef DCREG_ERRORS_HPP
#define DCREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dcreg {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyCloud : std::runtime_error {
  explicit EmptyCloud(const std::string& what = "point cloud is empty")
      : std::runtime_error(what) {}
};

struct TooFewPoints : std::runtime_error {
  explicit TooFewPoints(const std::string& what) : std::runtime_error(what) {}
};

struct NoCorrespondences : std::runtime_error {
  explicit NoCorrespondences(const std::string& what = "no correspondences within search radius")
      : std::runtime_error(what) {}
};

struct DivergedIncrement : std::runtime_error {
  explicit DivergedIncrement(const std::string& what) : std::runtime_error(what) {}
};

struct NotSymmetric : std::runtime_error {
  explicit NotSymmetric(const std::string& what) : std::runtime_error(what) {}
};

struct AllZeroSpectrum : std::runtime_error {
  explicit AllZeroSpectrum(const std::string& what = "spectrum has no positive eigenvalue")
      : std::runtime_error(what) {}
};

struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalCollapse : std::runtime_error {
  explicit NumericalCollapse(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidSpec : std::runtime_error {
  explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dcreg

#endif
