#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace autog {

namespace {

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string inflate_raw(const unsigned char* data, std::size_t csize, std::size_t usize) {
  std::string out(usize, '\0');
  z_stream stream{};
  if (inflateInit2(&stream, -15) != Z_OK) throw IoError("zlib inflateInit failed");
  stream.next_in = const_cast<unsigned char*>(data);
  stream.avail_in = static_cast<uInt>(csize);
  stream.next_out = reinterpret_cast<unsigned char*>(out.data());
  stream.avail_out = static_cast<uInt>(usize);
  const int rc = inflate(&stream, Z_FINISH);
  inflateEnd(&stream);
  if (rc != Z_STREAM_END) throw IoError("corrupt deflate stream in npz entry");
  return out;
}

struct ZipEntry {
  std::string name;
  std::string payload;  // decompressed
};

std::vector<ZipEntry> read_zip(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open npz file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string blob = buffer.str();
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());

  if (blob.size() < 22) throw IoError("npz file too small: '" + path + "'");
  // End-of-central-directory record: scan backwards past a possible comment.
  std::size_t eocd = std::string::npos;
  for (std::size_t i = blob.size() - 22; i + 4 >= 4; --i) {
    if (read_u32(bytes + i) == 0x06054b50) {
      eocd = i;
      break;
    }
    if (i == 0) break;
  }
  if (eocd == std::string::npos) throw IoError("no zip end record in '" + path + "'");
  const std::uint16_t count = read_u16(bytes + eocd + 10);
  std::size_t offset = read_u32(bytes + eocd + 16);

  std::vector<ZipEntry> entries;
  for (std::uint16_t e = 0; e < count; ++e) {
    if (read_u32(bytes + offset) != 0x02014b50) throw IoError("bad central directory entry");
    const std::uint16_t method = read_u16(bytes + offset + 10);
    const std::uint32_t csize = read_u32(bytes + offset + 20);
    const std::uint32_t usize = read_u32(bytes + offset + 24);
    const std::uint16_t name_len = read_u16(bytes + offset + 28);
    const std::uint16_t extra_len = read_u16(bytes + offset + 30);
    const std::uint16_t comment_len = read_u16(bytes + offset + 32);
    const std::uint32_t local_offset = read_u32(bytes + offset + 42);
    std::string name = blob.substr(offset + 46, name_len);
    offset += 46u + name_len + extra_len + comment_len;

    if (read_u32(bytes + local_offset) != 0x04034b50) throw IoError("bad local header");
    const std::uint16_t local_name_len = read_u16(bytes + local_offset + 26);
    const std::uint16_t local_extra_len = read_u16(bytes + local_offset + 28);
    const std::size_t data_start = local_offset + 30u + local_name_len + local_extra_len;

    ZipEntry entry;
    entry.name = std::move(name);
    if (method == 0) {
      entry.payload = blob.substr(data_start, usize);
    } else if (method == 8) {
      entry.payload = inflate_raw(bytes + data_start, csize, usize);
    } else {
      throw IoError("unsupported zip method " + std::to_string(method) + " in '" + path + "'");
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

struct NpyArray {
  std::string descr;
  std::vector<std::size_t> shape;
  std::string data;
};

NpyArray parse_npy(const std::string& blob, const std::string& name) {
  if (blob.size() < 10 || blob.compare(0, 6, "\x93NUMPY") != 0) {
    throw IoError("entry '" + name + "' is not an npy array");
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
  const int major = bytes[6];
  std::size_t header_len;
  std::size_t header_start;
  if (major == 1) {
    header_len = read_u16(bytes + 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    header_len = read_u32(bytes + 8);
    header_start = 12;
  } else {
    throw IoError("unsupported npy version in '" + name + "'");
  }
  const std::string header = blob.substr(header_start, header_len);

  NpyArray array;
  auto find_value = [&](const std::string& key) -> std::string {
    const auto pos = header.find("'" + key + "'");
    if (pos == std::string::npos) throw IoError("npy header missing '" + key + "'");
    auto colon = header.find(':', pos);
    return header.substr(colon + 1);
  };
  {
    auto rest = find_value("descr");
    const auto q1 = rest.find('\'');
    const auto q2 = rest.find('\'', q1 + 1);
    array.descr = rest.substr(q1 + 1, q2 - q1 - 1);
  }
  {
    auto rest = find_value("fortran_order");
    if (trim(rest.substr(0, rest.find(','))) == "True") {
      throw IoError("fortran-ordered npy arrays are not supported ('" + name + "')");
    }
  }
  {
    auto rest = find_value("shape");
    const auto open = rest.find('(');
    const auto close = rest.find(')', open);
    const auto inner = rest.substr(open + 1, close - open - 1);
    for (const auto& part : split(inner, ',')) {
      const auto t = trim(part);
      if (!t.empty()) array.shape.push_back(static_cast<std::size_t>(std::stoull(t)));
    }
  }
  array.data = blob.substr(header_start + header_len);
  return array;
}

template <typename T>
T read_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;  // little-endian hosts only, which is all this project targets
}

Scalar element_at(const NpyArray& array, std::size_t index) {
  const std::string& d = array.descr;
  const char* base = array.data.data();
  if (d == "<i8") return static_cast<std::int64_t>(read_le<std::int64_t>(base + index * 8));
  if (d == "<i4") return static_cast<std::int64_t>(read_le<std::int32_t>(base + index * 4));
  if (d == "<i2") return static_cast<std::int64_t>(read_le<std::int16_t>(base + index * 2));
  if (d == "<i1" || d == "|i1") return static_cast<std::int64_t>(static_cast<signed char>(base[index]));
  if (d == "<u8") return static_cast<std::int64_t>(read_le<std::uint64_t>(base + index * 8));
  if (d == "<u4") return static_cast<std::int64_t>(read_le<std::uint32_t>(base + index * 4));
  if (d == "<u2") return static_cast<std::int64_t>(read_le<std::uint16_t>(base + index * 2));
  if (d == "<u1" || d == "|u1") return static_cast<std::int64_t>(static_cast<unsigned char>(base[index]));
  if (d == "|b1") return static_cast<std::int64_t>(base[index] != 0);
  if (d == "<f8") {
    const double v = read_le<double>(base + index * 8);
    if (std::isnan(v)) return Scalar{};
    return v;
  }
  if (d == "<f4") {
    const float v = read_le<float>(base + index * 4);
    if (std::isnan(v)) return Scalar{};
    return static_cast<double>(v);
  }
  if (starts_with(d, "<U")) {
    const std::size_t width = std::stoull(d.substr(2));
    std::string out;
    for (std::size_t k = 0; k < width; ++k) {
      const auto cp = read_le<std::uint32_t>(base + (index * width + k) * 4);
      if (cp == 0) break;
      // UCS-4 to UTF-8
      if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
      } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
      } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
      } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
      }
    }
    return out;
  }
  if (starts_with(d, "|S")) {
    const std::size_t width = std::stoull(d.substr(2));
    const char* start = base + index * width;
    std::size_t len = 0;
    while (len < width && start[len] != '\0') ++len;
    return std::string(start, len);
  }
  throw IoError("unsupported npy dtype '" + d + "'");
}

double element_as_double(const NpyArray& array, std::size_t index) {
  const auto value = element_at(array, index);
  const auto number = scalar_as_number(value);
  return number ? *number : std::nan("");
}

}  // namespace

RawTable read_npz(const std::string& path) {
  RawTable table;
  bool first = true;
  for (const auto& entry : read_zip(path)) {
    std::string name = entry.name;
    if (ends_with(name, ".npy")) name = name.substr(0, name.size() - 4);
    const auto array = parse_npy(entry.payload, entry.name);
    if (array.shape.empty() || array.shape.size() > 2) {
      throw IoError("npz entry '" + entry.name + "' has unsupported rank");
    }
    const std::size_t rows = array.shape[0];
    Column column;
    column.cells.reserve(rows);
    if (array.shape.size() == 2) {
      const std::size_t width = array.shape[1];
      for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> vec(width);
        for (std::size_t c = 0; c < width; ++c) vec[c] = element_as_double(array, r * width + c);
        column.cells.emplace_back(std::move(vec));
      }
    } else {
      for (std::size_t r = 0; r < rows; ++r) {
        column.cells.push_back(scalar_to_cell(element_at(array, r)));
      }
    }
    if (first) {
      table.row_count = rows;
      first = false;
    } else if (rows != table.row_count) {
      throw IoError("ragged npz container '" + path + "': column '" + name + "' has " +
                    std::to_string(rows) + " rows, expected " + std::to_string(table.row_count));
    }
    table.order.push_back(name);
    table.columns.push_back(std::move(column));
  }
  return table;
}

namespace {

std::string npy_blob(const Column& column, std::size_t rows) {
  // Pick the widest representation needed by the column.
  bool any_string = false;
  bool any_real = false;
  bool tensor = false;
  std::size_t tensor_width = 0;
  std::size_t max_chars = 1;
  for (const auto& cell : column.cells) {
    if (is_tensor(cell)) {
      tensor = true;
      tensor_width = std::get<std::vector<double>>(cell).size();
    } else if (is_list(cell)) {
      throw IoError("multi-category columns cannot be stored in npz; use csv or parquet");
    } else if (const auto* s = std::get_if<std::string>(&cell)) {
      any_string = true;
      // UCS-4 code point count, conservatively bytes
      max_chars = std::max(max_chars, s->size());
    } else if (std::holds_alternative<double>(cell) || is_null(cell)) {
      any_real = true;
    }
  }

  std::string descr;
  std::string payload;
  if (tensor) {
    descr = "<f8";
    for (const auto& cell : column.cells) {
      const auto& vec = std::get<std::vector<double>>(cell);
      for (double v : vec) {
        payload.append(reinterpret_cast<const char*>(&v), 8);
      }
    }
  } else if (any_string) {
    descr = "<U" + std::to_string(max_chars);
    for (const auto& cell : column.cells) {
      const std::string text = is_null(cell) ? "" : cell_to_string(cell);
      std::size_t written = 0;
      // ASCII-only conversion is enough for generated payloads.
      for (char c : text) {
        if (written == max_chars) break;
        const std::uint32_t cp = static_cast<unsigned char>(c);
        payload.append(reinterpret_cast<const char*>(&cp), 4);
        ++written;
      }
      for (; written < max_chars; ++written) {
        const std::uint32_t zero = 0;
        payload.append(reinterpret_cast<const char*>(&zero), 4);
      }
    }
  } else if (any_real) {
    descr = "<f8";
    for (const auto& cell : column.cells) {
      double v = std::nan("");
      if (const auto* i = std::get_if<std::int64_t>(&cell)) v = static_cast<double>(*i);
      if (const auto* d = std::get_if<double>(&cell)) v = *d;
      payload.append(reinterpret_cast<const char*>(&v), 8);
    }
  } else {
    descr = "<i8";
    for (const auto& cell : column.cells) {
      const std::int64_t v = std::holds_alternative<std::int64_t>(cell)
                                 ? std::get<std::int64_t>(cell)
                                 : 0;
      payload.append(reinterpret_cast<const char*>(&v), 8);
    }
  }

  std::string shape = "(" + std::to_string(rows) + ",";
  if (tensor) shape += " " + std::to_string(tensor_width);
  shape += ")";
  std::string header =
      "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape + ", }";
  const std::size_t unpadded = 10 + header.size() + 1;
  const std::size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  std::string blob = "\x93NUMPY";
  blob.push_back('\x01');
  blob.push_back('\x00');
  put_u16(blob, static_cast<std::uint16_t>(header.size()));
  blob += header;
  blob += payload;
  return blob;
}

}  // namespace

void write_npz(const std::string& path, const TableData& table) {
  std::string out;
  struct CdEntry {
    std::string name;
    std::uint32_t crc;
    std::uint32_t size;
    std::uint32_t offset;
  };
  std::vector<CdEntry> cd;

  for (std::size_t c = 0; c < table.order.size(); ++c) {
    const std::string name = table.order[c] + ".npy";
    const std::string blob = npy_blob(table.columns[c], table.row_count);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    cd.push_back({name, crc, static_cast<std::uint32_t>(blob.size()),
                  static_cast<std::uint32_t>(out.size())});
    put_u32(out, 0x04034b50);
    put_u16(out, 20);  // version needed
    put_u16(out, 0);   // flags
    put_u16(out, 0);   // method: stored
    put_u16(out, 0);   // time
    put_u16(out, 0);   // date
    put_u32(out, crc);
    put_u32(out, static_cast<std::uint32_t>(blob.size()));
    put_u32(out, static_cast<std::uint32_t>(blob.size()));
    put_u16(out, static_cast<std::uint16_t>(name.size()));
    put_u16(out, 0);  // extra
    out += name;
    out += blob;
  }

  const std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  for (const auto& entry : cd) {
    put_u32(out, 0x02014b50);
    put_u16(out, 20);
    put_u16(out, 20);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u32(out, entry.crc);
    put_u32(out, entry.size);
    put_u32(out, entry.size);
    put_u16(out, static_cast<std::uint16_t>(entry.name.size()));
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u32(out, 0);
    put_u32(out, entry.offset);
    out += entry.name;
  }
  const std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;
  put_u32(out, 0x06054b50);
  put_u16(out, 0);
  put_u16(out, 0);
  put_u16(out, static_cast<std::uint16_t>(cd.size()));
  put_u16(out, static_cast<std::uint16_t>(cd.size()));
  put_u32(out, cd_size);
  put_u32(out, cd_offset);
  put_u16(out, 0);

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write npz file '" + path + "'");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace autog
