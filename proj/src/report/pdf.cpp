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

#include "swinscan/report/pdf.hpp"

#include <charconv>
#include <fmt/format.h>

#include "swinscan/error.hpp"

namespace swinscan::report {

int PdfBuilder::reserve() {
  bodies_.emplace_back();
  return static_cast<int>(bodies_.size());
}

void PdfBuilder::set(int number, std::string body) { bodies_.at(number - 1) = std::move(body); }

int PdfBuilder::add(std::string body) {
  const int n = reserve();
  set(n, std::move(body));
  return n;
}

std::string PdfBuilder::stream(const std::string& dict_entries, std::span<const std::uint8_t> data) {
  std::string s = fmt::format("<< {}/Length {} >>\nstream\n", dict_entries, data.size());
  s.append(reinterpret_cast<const char*>(data.data()), data.size());
  s += "\nendstream";
  return s;
}

std::string PdfBuilder::stream(const std::string& dict_entries, std::string_view data) {
  return stream(dict_entries, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::vector<std::uint8_t> PdfBuilder::finish(int root, int info) const {
  // The second line marks the file as binary for transfer tools.
  std::string out = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < bodies_.size(); ++i) {
    offsets.push_back(out.size());
    out += fmt::format("{} 0 obj\n", i + 1);
    out += bodies_[i];
    out += "\nendobj\n";
  }
  const std::size_t xref = out.size();
  out += fmt::format("xref\n0 {}\n0000000000 65535 f \n", bodies_.size() + 1);
  for (auto off : offsets) out += fmt::format("{:010} 00000 n \n", off);
  out += fmt::format("trailer\n<< /Size {} /Root {} 0 R", bodies_.size() + 1, root);
  if (info) out += fmt::format(" /Info {} 0 R", info);
  out += fmt::format(" >>\nstartxref\n{}\n%%EOF\n", xref);
  return {out.begin(), out.end()};
}

std::string pdf_string(std::string_view text) {
  std::string s = "(";
  for (unsigned char c : text) {
    if (c == '(' || c == ')' || c == '\\') {
      s += '\\';
      s += static_cast<char>(c);
    } else if (c < 0x20 || c > 0x7e) {
      s += '?';
    } else {
      s += static_cast<char>(c);
    }
  }
  return s + ")";
}

namespace {

constexpr double kPageW = 612, kPageH = 792, kMargin = 54;
constexpr std::size_t kMaxImageW = 480, kMaxImageH = 360, kMaxUpscale = 4;

std::vector<std::string> wrap(std::string_view text, std::size_t width) {
  std::vector<std::string> lines;
  std::string line;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto word = text.substr(pos, end - pos);
    if (!line.empty() && line.size() + 1 + word.size() > width) {
      lines.push_back(line);
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += word;
    pos = end + 1;
  }
  if (!line.empty()) lines.push_back(line);
  return lines;
}

class Page {
 public:
  explicit Page(double top) : y_(top) {}
  void text(std::string_view s, double size = 11, bool bold = false, double gap = 4) {
    y_ -= size;
    ops_ += fmt::format("BT /{} {} Tf {:.2f} {:.2f} Td {} Tj ET\n", bold ? "F2" : "F1", size, kMargin, y_, pdf_string(s));
    y_ -= gap;
  }
  void skip(double dy) { y_ -= dy; }
  void image(const std::string& name, double w, double h) {
    y_ -= h;
    ops_ += fmt::format("q {:.2f} 0 0 {:.2f} {:.2f} {:.2f} cm /{} Do Q\n", w, h, kMargin, y_, name);
    y_ -= 6;
  }
  const std::string& ops() const { return ops_; }

 private:
  double y_;
  std::string ops_;
};

std::string fmt_prob(double p) { return fmt::format("{:.4f}", p); }

std::string pdf_date(const std::string& iso) {
  // 2026-01-02T03:04:05Z -> D:20260102030405Z
  if (iso.size() != 20 || iso[4] != '-' || iso[10] != 'T' || iso[19] != 'Z') return {};
  std::string d = "D:";
  for (char c : iso)
    if (c >= '0' && c <= '9') d += c;
  return d.size() == 16 ? d + "Z" : std::string{};
}

}  // namespace

std::vector<std::uint8_t> write_pdf(const DiagnosticReport& report, const segment::RgbImage& img) {
  if (!report.detection) throw ContractError("a report needs a detection result");
  if (img.width == 0 || img.height == 0) throw LayoutError("highlighted image is empty");
  if (img.width > kMaxImageW || img.height > kMaxImageH)
    throw LayoutError(fmt::format("image {}x{} does not fit the {}x{} area", img.width, img.height, kMaxImageW, kMaxImageH));
  const std::size_t scale = std::min({kMaxUpscale, kMaxImageW / img.width, kMaxImageH / img.height});

  PdfBuilder b;
  const int catalog = b.reserve();
  const int pages = b.reserve();
  const int font = b.add("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>");
  const int font_bold = b.add("<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica-Bold /Encoding /WinAnsiEncoding >>");
  const int image = b.add(PdfBuilder::stream(
      fmt::format("/Type /XObject /Subtype /Image /Width {} /Height {} /ColorSpace /DeviceRGB /BitsPerComponent 8 ",
                  img.width, img.height),
      img.rgb));

  const auto& det = *report.detection;
  const auto& seg = report.segmentation;
  Page p1(kPageH - kMargin);
  p1.text("SwinScan Diagnostic Report", 18, true, 10);
  p1.text("Generated: " + report.timestamp, 10);
  if (report.patient_ref) p1.text("Reference: " + *report.patient_ref, 10);
  p1.text(fmt::format("Request: {}", request_task_name(report.task)), 10, false, 12);

  p1.text("Tumor detection", 13, true);
  const double det_p = det.probabilities.at(det.class_id);
  p1.text(fmt::format("Result: {} (probability {})", det.label, fmt_prob(det_p)));
  for (std::size_t i = 0; i < det.classes.size(); ++i)
    p1.text(fmt::format("  P({}) = {}", det.classes[i], fmt_prob(det.probabilities[i])), 10);
  if (report.classification)
    p1.text(fmt::format("Tumor type: {} (see page 2)", report.classification->label));
  p1.skip(8);

  p1.text("Segmentation and size estimate", 13, true);
  if (seg.found) {
    p1.text(fmt::format("Region area: {} px{}", seg.area_px,
                        seg.area_mm2 ? fmt::format(" ({:.2f} mm^2)", *seg.area_mm2) : std::string{}));
    p1.text(fmt::format("Bounding box: rows {}-{}, cols {}-{}", seg.bbox->row0, seg.bbox->row1, seg.bbox->col0,
                        seg.bbox->col1));
    p1.text(fmt::format("Centroid: ({:.2f}, {:.2f})", (*seg.centroid)[0], (*seg.centroid)[1]));
  } else {
    p1.text("No region found.");
  }
  p1.text(fmt::format("Threshold level: {} on {}x{} pixels", seg.threshold, seg.image_width, seg.image_height), 10);
  p1.skip(6);
  p1.image("Im1", static_cast<double>(img.width * scale), static_cast<double>(img.height * scale));
  p1.text("Highlighted region (yellow overlay)", 9, false, 12);

  p1.text("Model versions", 11, true);
  p1.text("Detection: " + report.model_versions.detection, 7);
  if (!report.model_versions.classification.empty())
    p1.text("Classification: " + report.model_versions.classification, 7);
  p1.skip(6);
  for (const auto& line : wrap(report.disclaimer, 110)) p1.text(line, 8, false, 2);

  std::vector<std::string> page_ops{p1.ops()};
  if (report.classification) {
    const auto& cls = *report.classification;
    Page p2(kPageH - kMargin);
    p2.text("Tumor classification", 16, true, 10);
    p2.text(fmt::format("Result: {} (probability {})", cls.label, fmt_prob(cls.probabilities.at(cls.class_id))));
    for (std::size_t i = 0; i < cls.classes.size(); ++i)
      p2.text(fmt::format("  P({}) = {}", cls.classes[i], fmt_prob(cls.probabilities[i])), 10);
    p2.skip(8);
    for (const auto& line : wrap(report.disclaimer, 110)) p2.text(line, 8, false, 2);
    page_ops.push_back(p2.ops());
  }

  std::string kids;
  const std::string resources =
      fmt::format("<< /Font << /F1 {} 0 R /F2 {} 0 R >> /XObject << /Im1 {} 0 R >> >>", font, font_bold, image);
  for (const auto& ops : page_ops) {
    const int content = b.add(PdfBuilder::stream("", ops));
    const int page = b.add(fmt::format("<< /Type /Page /Parent {} 0 R /MediaBox [0 0 {} {}] /Resources {} /Contents {} 0 R >>",
                                       pages, kPageW, kPageH, resources, content));
    kids += fmt::format("{}{} 0 R", kids.empty() ? "" : " ", page);
  }
  b.set(pages, fmt::format("<< /Type /Pages /Kids [{}] /Count {} >>", kids, page_ops.size()));
  b.set(catalog, fmt::format("<< /Type /Catalog /Pages {} 0 R >>", pages));
  std::string info = "<< /Producer (SwinScan " + std::string(kVersion) + ") /Title (Diagnostic Report)";
  if (auto d = pdf_date(report.timestamp); !d.empty()) info += " /CreationDate (" + d + ")";
  const int info_obj = b.add(info + " >>");
  return b.finish(catalog, info_obj);
}

// ---- validating reader ----

namespace {

struct Cursor {
  std::string_view s;

  [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw FormatError(what, at); }

  void expect(std::size_t& pos, std::string_view lit, const char* what) const {
    if (s.substr(pos, lit.size()) != lit) fail(std::string("expected ") + what, pos);
    pos += lit.size();
  }

  std::size_t number(std::size_t& pos, const char* what) const {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc() || p == s.data() + pos) fail(std::string("expected ") + what, pos);
    pos = static_cast<std::size_t>(p - s.data());
    return v;
  }
};

// Value following `key` in a dictionary body, as an integer.
std::optional<std::size_t> dict_int(std::string_view body, std::string_view key) {
  const auto at = body.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  std::size_t pos = at + key.size();
  while (pos < body.size() && body[pos] == ' ') ++pos;
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(body.data() + pos, body.data() + body.size(), v);
  if (ec != std::errc() || p == body.data() + pos) return std::nullopt;
  return v;
}

}  // namespace

PdfInfo inspect_pdf(std::span<const std::uint8_t> bytes) {
  const std::string_view s(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  Cursor c{s};
  PdfInfo info;
  if (s.substr(0, 9) != "%PDF-1.4\n") c.fail("missing %PDF-1.4 header", 0);
  info.version = "1.4";
  constexpr std::string_view kEof = "%%EOF\n";
  if (s.size() < kEof.size() || s.substr(s.size() - kEof.size()) != kEof) c.fail("missing %%EOF trailer", s.size());

  const auto sx = s.rfind("startxref\n");
  if (sx == std::string_view::npos) c.fail("missing startxref", s.size());
  std::size_t pos = sx + 10;
  info.startxref = c.number(pos, "startxref offset");
  c.expect(pos, "\n", "newline after startxref offset");
  if (pos + kEof.size() != s.size()) c.fail("unexpected bytes before %%EOF", pos);

  pos = info.startxref;
  if (pos >= s.size()) c.fail("startxref beyond end of file", sx);
  c.expect(pos, "xref\n0 ", "xref section");
  const std::size_t size = c.number(pos, "xref entry count");
  c.expect(pos, "\n", "newline after xref subsection");
  if (size == 0) c.fail("empty xref", pos);
  c.expect(pos, "0000000000 65535 f \n", "free entry for object 0");
  for (std::size_t i = 1; i < size; ++i) {
    const std::size_t entry = pos;
    if (pos + 20 > s.size()) c.fail("truncated xref", pos);
    const std::size_t off = c.number(pos, "object offset");
    if (pos - entry != 10) c.fail("xref offset must be 10 digits", entry);
    c.expect(pos, " 00000 n \n", "in-use xref entry");
    info.offsets.push_back(off);
  }
  info.object_count = size - 1;

  c.expect(pos, "trailer\n<<", "trailer");
  const auto trailer_end = s.find(">>", pos);
  if (trailer_end == std::string_view::npos) c.fail("unterminated trailer", pos);
  const auto trailer = s.substr(pos, trailer_end - pos);
  if (dict_int(trailer, "/Size") != size) c.fail("trailer /Size disagrees with xref", pos);
  const auto root = dict_int(trailer, "/Root");
  if (!root || *root < 1 || *root > info.object_count) c.fail("trailer /Root missing or out of range", pos);
  info.root = static_cast<int>(*root);
  if (s.substr(trailer_end, 12) != ">>\nstartxref") c.fail("startxref must follow the trailer", trailer_end);

  // Objects are packed from just after the header comment to the xref.
  std::size_t expected = s.find('\n', 9) + 1;
  for (std::size_t i = 0; i < info.object_count; ++i) {
    const std::size_t off = info.offsets[i];
    if (off != expected) c.fail(fmt::format("object {} is not at its xref offset", i + 1), off);
    std::size_t p = off;
    c.expect(p, fmt::format("{} 0 obj\n", i + 1), "object header matching its xref entry");
    const std::size_t body_start = p;
    std::size_t body_end;
    if (s.substr(p, 2) != "<<") c.fail("object body must be a dictionary", p);
    const auto stream_kw = s.find(">>\nstream\n", p);
    const auto endobj = s.find("\nendobj\n", p);
    if (endobj == std::string_view::npos) c.fail("unterminated object", p);
    if (stream_kw != std::string_view::npos && stream_kw < endobj) {
      const auto dict = s.substr(body_start, stream_kw - body_start);
      const auto len = dict_int(dict, "/Length");
      if (!len) c.fail("stream without /Length", body_start);
      std::size_t data = stream_kw + 10;
      if (data + *len > s.size()) c.fail("stream runs past end of file", data);
      std::size_t after = data + *len;
      c.expect(after, "\nendstream\nendobj\n", "endstream at /Length");
      body_end = after - 8;
      if (dict.find("/Subtype /Image") != std::string_view::npos) ++info.image_count;
    } else {
      body_end = endobj;
      const auto body = s.substr(body_start, body_end - body_start);
      if (body.find("/Type /Page ") != std::string_view::npos) ++info.page_count;
      if (body.find("/Type /Pages ") != std::string_view::npos) {
        const auto count = dict_int(body, "/Count");
        if (!count) c.fail("page tree without /Count", body_start);
        info.declared_page_count += *count;
      }
    }
    expected = body_end + 8;  // "\nendobj\n"
  }
  if (expected != info.startxref) c.fail("xref does not follow the last object", expected);
  if (info.page_count != info.declared_page_count) c.fail("page count differs from page tree /Count", info.startxref);
  return info;
}

}  // namespace swinscan::report
