#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rms/annotations.hpp"
#include "rms/program.hpp"

namespace rms {

/// One sidecar line without provenance, e.g. `field MySqlCon.con @Owning`.
std::string render_record(const Program& program, const AnnotRecord& record);

struct SidecarOptions {
  bool provenance = false;
  /// Also emit declared annotations that live in stub files.
  bool include_stub_declared = false;
};

/// Sidecar text: inferred annotations plus declared annotations of non-stub
/// files, one per line, sorted lexicographically.
std::string write_sidecar(const Program& program, const AnnotationStore& store, const SidecarOptions& options = {});

class SidecarError : public std::runtime_error {
 public:
  SidecarError(std::string file, int line, const std::string& message);
  [[nodiscard]] const std::string& file() const { return file_; }
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] const std::string& detail() const { return detail_; }

 private:
  std::string file_;
  int line_;
  std::string detail_;
};

/// Parses sidecar text into records. Blank lines and `#` comments are
/// ignored. Throws SidecarError with the offending line.
std::vector<AnnotRecord> read_sidecar(const Program& program, std::string_view text, const std::string& file);

/// Adds sidecar records to `store` as declared annotations. Throws
/// SidecarError on records that contradict the store.
void load_sidecar(const Program& program, std::string_view text, const std::string& file, AnnotationStore& store);

}  // namespace rms
