#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vqdemark {

enum class ErrorCode {
  MalformedFile,
  UnsupportedDepth,
  IoFailure,
  EmptyImage,
  EmptyTrainingSet,
  InvalidTargetSize,
  DimensionMismatch,
  GeometryMismatch,
  NoPairs,
  ImageSmallerThanWindow,
  ImageSmallerThanKernel,
  InvalidGeometry,
  InvalidParameter,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnsupportedDepth: return "UnsupportedDepth";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::InvalidTargetSize: return "InvalidTargetSize";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::NoPairs: return "NoPairs";
    case ErrorCode::ImageSmallerThanWindow: return "ImageSmallerThanWindow";
    case ErrorCode::ImageSmallerThanKernel: return "ImageSmallerThanKernel";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vqdemark
