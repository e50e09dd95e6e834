#include "xqs/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xqs/error.hpp"

namespace xqs {
namespace {

using Record = std::vector<std::string>;

// RFC 4180 records: quoted fields may hold commas, doubled quotes and line
// breaks. A final line break does not start a new record.
std::vector<Record> split_records(std::string_view text) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool record_open = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        record_open = true;
        break;
      case ',':
        current.push_back(std::move(field));
        field.clear();
        record_open = true;
        break;
      case '\r':
        break;
      case '\n':
        current.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(current));
        current.clear();
        record_open = false;
        break;
      default:
        field += c;
        record_open = true;
    }
  }
  if (record_open || !field.empty()) {
    current.push_back(std::move(field));
    records.push_back(std::move(current));
  }
  return records;
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

IngestResult ingest_csv_text(std::string_view text, bool zero_filter) {
  const std::vector<Record> records = split_records(text);
  std::size_t column = 0;
  std::size_t first_data = 0;
  if (!records.empty()) {
    const Record& head = records.front();
    const auto it = std::find_if(head.begin(), head.end(),
                                 [](const std::string& f) { return lower(trim(f)) == "value"; });
    if (it != head.end()) {
      column = static_cast<std::size_t>(it - head.begin());
      first_data = 1;
    } else if (head.size() > 1) {
      throw ParseError("multi-column CSV input needs a 'value' header column");
    }
  }

  IngestResult out;
  for (std::size_t r = first_data; r < records.size(); ++r) {
    const Record& rec = records[r];
    const auto v = column < rec.size() ? parse_real(rec[column]) : std::nullopt;
    if (!v) {
      ++out.dropped_invalid;
    } else if (zero_filter && *v == 0.0) {
      ++out.dropped_zero;
    } else {
      out.values.push_back(*v);
    }
  }
  if (out.values.empty()) throw EmptyDataError("no usable numeric rows in the input");
  return out;
}

IngestResult ingest_csv(const std::filesystem::path& path, bool zero_filter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ingest_csv_text(buf.str(), zero_filter);
}

}  // namespace xqs
