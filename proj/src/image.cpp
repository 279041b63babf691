#include "lapseg/image.hpp"

#include <algorithm>
#include <string>

#include "lapseg/error.hpp"

namespace lapseg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDecode: return "decode error";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kTooSmall: return "image too small";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kTooManyClasses: return "too many classes";
    case ErrorCode::kInsufficientData: return "insufficient data";
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kMissingSeeds: return "missing seeds";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

std::size_t LabelMap::count_labeled() const {
  return static_cast<std::size_t>(std::count_if(
      labels.begin(), labels.end(), [](ClassId c) { return c != kUnlabeled; }));
}

void validate(const RgbImage& img) {
  if (img.pixels.size() != img.width * img.height) {
    throw Error(ErrorCode::kDimension, "image has " + std::to_string(img.pixels.size()) +
                                           " pixels, expected " +
                                           std::to_string(img.width * img.height));
  }
  for (const Rgb& p : img.pixels) {
    for (double c : {p.r, p.g, p.b}) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw Error(ErrorCode::kParameter, "channel value outside [0, 1]");
      }
    }
  }
}

void validate(const LabelMap& labels) {
  if (labels.labels.size() != labels.width * labels.height) {
    throw Error(ErrorCode::kDimension, "label map has " +
                                           std::to_string(labels.labels.size()) +
                                           " entries, expected " +
                                           std::to_string(labels.width * labels.height));
  }
  for (ClassId c : labels.labels) {
    if (c > labels.num_classes) {
      throw Error(ErrorCode::kParameter, "label " + std::to_string(c) +
                                             " exceeds class count " +
                                             std::to_string(labels.num_classes));
    }
  }
}

}  // namespace lapseg
