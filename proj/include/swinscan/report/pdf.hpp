// Copyright 2026 The SwinScan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swinscan/report/report.hpp"
#include "swinscan/segment.hpp"

namespace swinscan::report {

/// Numbered-object PDF 1.4 assembler: uncompressed, byte-exact xref.
class PdfBuilder {
 public:
  /// Reserves the next object number.
  int reserve();
  /// Sets the body (without "N 0 obj" framing) of a reserved object.
  void set(int number, std::string body);
  int add(std::string body);
  static std::string stream(const std::string& dict_entries, std::span<const std::uint8_t> data);
  static std::string stream(const std::string& dict_entries, std::string_view data);

  /// Root is the catalog object; info may be 0 for none.
  std::vector<std::uint8_t> finish(int root, int info) const;

 private:
  std::vector<std::string> bodies_;
};

/// Escapes a string for a PDF literal; bytes outside printable ASCII
/// become '?'.
std::string pdf_string(std::string_view text);

/// Report page(s) on US Letter: page one carries detection, segmentation,
/// model versions and the highlighted image (integer upscale, at most
/// 4x); a second page lists the classification when present. Images wider
/// than 480 or taller than 360 pixels raise LayoutError. The report
/// timestamp is the only time-dependent input.
std::vector<std::uint8_t> write_pdf(const DiagnosticReport& report, const segment::RgbImage& highlighted);

struct PdfInfo {
  std::string version;                 // "1.4"
  std::size_t object_count = 0;        // excluding the free object 0
  std::vector<std::size_t> offsets;    // offsets[i] for object i + 1
  std::size_t startxref = 0;
  int root = 0;
  std::size_t page_count = 0;          // /Type /Page objects
  std::size_t declared_page_count = 0; // /Count in the page tree
  std::size_t image_count = 0;
};

/// Validating reader for what PdfBuilder emits: header and "%%EOF\n"
/// framing, xref entries pointing at their "N 0 obj" headers, objects
/// packed back to back, stream lengths, trailer /Size and /Root, and page
/// counts. Throws FormatError with the byte offset of the first problem.
PdfInfo inspect_pdf(std::span<const std::uint8_t> bytes);

}  // namespace swinscan::report
