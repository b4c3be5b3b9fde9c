#include <fstream>
#include <sstream>

#include "autog/table_io.hpp"
#include "autog/util.hpp"
#include "io_detail.hpp"

#include "json.hpp"

namespace autog {

namespace io_detail {

bool parse_int(const std::string& text, std::int64_t* out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  try {
    const long long value = std::stoll(text, &pos);
    if (pos != text.size()) return false;
    *out = value;
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_real(const std::string& text, double* out) {
  if (text.empty()) return false;
  std::size_t pos = 0;
  try {
    *out = std::stod(text, &pos);
    return pos == text.size();
  } catch (...) {
    return false;
  }
}

}  // namespace io_detail

namespace {

// RFC-4180 field splitter. Handles quoted fields, doubled-quote escapes,
// embedded newlines and CRLF line ends.
std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(record);
    record.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

// Raw CSV cells stay strings except JSON arrays, which become list cells.
// Typed coercion against the declared dtype happens in load_table.
Cell cell_from_field(const std::string& field) {
  if (field.empty()) return Cell{};
  if (field.front() == '[') {
    try {
      const auto parsed = nlohmann::json::parse(field);
      if (parsed.is_array()) {
        std::vector<Scalar> items;
        for (const auto& item : parsed) {
          if (item.is_number_integer()) items.emplace_back(item.get<std::int64_t>());
          else if (item.is_number_float()) items.emplace_back(item.get<double>());
          else if (item.is_string()) items.emplace_back(item.get<std::string>());
          else items.emplace_back(Scalar{});
        }
        return items;
      }
    } catch (...) {
      // not JSON after all: keep as text
    }
  }
  return field;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string field_from_cell(const Cell& cell) {
  if (is_null(cell)) return "";
  if (is_list(cell)) {
    nlohmann::json array = nlohmann::json::array();
    for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
      if (is_null(item)) array.push_back(nullptr);
      else if (const auto* i = std::get_if<std::int64_t>(&item)) array.push_back(*i);
      else if (const auto* d = std::get_if<double>(&item)) array.push_back(*d);
      else array.push_back(std::get<std::string>(item));
    }
    return array.dump();
  }
  if (is_tensor(cell)) {
    nlohmann::json array = std::get<std::vector<double>>(cell);
    return array.dump();
  }
  return cell_to_string(cell);
}

}  // namespace

RawTable parse_csv(const std::string& text) {
  RawTable table;
  const auto records = split_records(text);
  if (records.empty()) return table;
  table.order = records[0];
  table.columns.resize(table.order.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.size() != table.order.size()) {
      throw ParseError("CSV record " + std::to_string(r) + " has " +
                       std::to_string(record.size()) + " fields, expected " +
                       std::to_string(table.order.size()));
    }
    for (std::size_t c = 0; c < record.size(); ++c) {
      table.columns[c].cells.push_back(cell_from_field(record[c]));
    }
  }
  table.row_count = records.size() - 1;
  return table;
}

RawTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string csv_to_string(const TableData& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.order.size(); ++c) {
    if (c) out << ",";
    out << quote_field(table.order[c]);
  }
  out << "\n";
  for (std::size_t r = 0; r < table.row_count; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ",";
      out << quote_field(field_from_cell(table.columns[c].cells[r]));
    }
    out << "\n";
  }
  return out.str();
}

void write_csv(const std::string& path, const TableData& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV file '" + path + "'");
  out << csv_to_string(table);
}

}  // namespace autog
