#pragma once

#include <memory>
#include <string>

#include "v2m/classifier.hpp"

namespace v2m {

/// Versioned, self-describing text checkpoint for any classifier kind.
/// serialize(deserialize(text)) reproduces the text byte for byte, and a
/// reloaded model predicts identically to the original.
std::string serialize_classifier(const TrainedClassifier& model);
std::unique_ptr<TrainedClassifier> deserialize_classifier(const std::string& text);

}  // namespace v2m
