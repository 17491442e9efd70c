// Model persistence: a versioned, line-oriented text format with full
// 17-significant-digit float encoding, so deserialized models evaluate
// bit-identically. Magic line: "CHEB-IV v1".
#pragma once

#include <iosfwd>
#include <string>

#include "chebiv/laplace.hpp"
#include "chebiv/surface.hpp"

namespace chebiv {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_surface(const SurfaceModel& m);
SurfaceModel deserialize_surface(std::istream& in);

std::string serialize_laplace(const LaplaceSurface& s);
LaplaceSurface deserialize_laplace(std::istream& in);

/// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

SurfaceModel load_surface_file(const std::string& path);
LaplaceSurface load_laplace_file(const std::string& path);

}  // namespace chebiv
