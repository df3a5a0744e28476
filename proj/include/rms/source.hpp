#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace rms {

struct SourcePos {
  int line = 1;
  int column = 1;

  auto operator<=>(const SourcePos&) const = default;
};

/// Strongly typed index into one of the Program tables.
template <class Tag>
struct Id {
  int value = -1;

  constexpr Id() = default;
  constexpr explicit Id(int v) : value(v) {}

  [[nodiscard]] constexpr bool valid() const { return value >= 0; }
  [[nodiscard]] constexpr std::size_t index() const { return static_cast<std::size_t>(value); }

  auto operator<=>(const Id&) const = default;
};

using ClassId = Id<struct ClassTag>;
using FieldId = Id<struct FieldTag>;
using MethodId = Id<struct MethodTag>;
using StmtId = Id<struct StmtTag>;

enum class FrontendStage { kLex, kParse, kResolve };

/// Error raised by the lexer, parser or resolver. Always carries a position.
class FrontendError : public std::runtime_error {
 public:
  FrontendError(FrontendStage stage, std::string file, SourcePos pos, const std::string& message);

  [[nodiscard]] FrontendStage stage() const { return stage_; }
  [[nodiscard]] const std::string& file() const { return file_; }
  [[nodiscard]] SourcePos pos() const { return pos_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  FrontendStage stage_;
  std::string file_;
  SourcePos pos_;
  std::string detail_;
};

class LexError : public FrontendError {
 public:
  LexError(std::string file, SourcePos pos, const std::string& message)
      : FrontendError(FrontendStage::kLex, std::move(file), pos, message) {}
};

class ParseError : public FrontendError {
 public:
  ParseError(std::string file, SourcePos pos, const std::string& message)
      : FrontendError(FrontendStage::kParse, std::move(file), pos, message) {}
};

class ResolveError : public FrontendError {
 public:
  ResolveError(std::string file, SourcePos pos, const std::string& message)
      : FrontendError(FrontendStage::kResolve, std::move(file), pos, message) {}
};

}  // namespace rms
