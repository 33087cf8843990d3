// Copyright 2026 The vte-nlp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace vte {

// Every failure surfaced by the library derives from Error so callers (the
// CLI in particular) can catch one type and still report the category.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape", what) {}
};

class StratificationError : public Error {
 public:
  explicit StratificationError(const std::string& what)
      : Error("stratification", what) {}
};

class AugmentationError : public Error {
 public:
  explicit AugmentationError(const std::string& what) : Error("augmentation", what) {}
};

class EmbeddingError : public Error {
 public:
  explicit EmbeddingError(const std::string& what) : Error("embedding", what) {}
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch)
      : Error("training", what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class RuleLoadError : public Error {
 public:
  RuleLoadError(const std::string& what, int rule_index)
      : Error("rules", what), rule_index_(rule_index) {}
  int rule_index() const noexcept { return rule_index_; }

 private:
  int rule_index_;
};

class MetricsError : public Error {
 public:
  explicit MetricsError(const std::string& what) : Error("metrics", what) {}
};

class SelectionError : public Error {
 public:
  explicit SelectionError(const std::string& what) : Error("selection", what) {}
};

class UnsupportedSchemeError : public Error {
 public:
  explicit UnsupportedSchemeError(const std::string& what) : Error("scheme", what) {}
};

// A pipeline stage failed; what() reads "stage '<name>': <cause>".
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& cause)
      : Error("stage", "stage '" + stage + "': " + cause), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace vte
