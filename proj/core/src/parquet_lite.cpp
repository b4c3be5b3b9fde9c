// Minimal parquet reader/writer pair: thrift compact metadata, PLAIN
// encoding, RLE/bit-packed-hybrid levels, uncompressed pages, one row group.
// Scalar columns are optional primitives; multi-category columns use the
// standard three-level LIST shape. Files outside this envelope (dictionary
// encoding, compression, nested structs) are rejected with a clear error.

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace autog {

namespace {

// ---- thrift compact protocol ----

enum CompactType : std::uint8_t {
  kCtStop = 0,
  kCtBoolTrue = 1,
  kCtBoolFalse = 2,
  kCtByte = 3,
  kCtI16 = 4,
  kCtI32 = 5,
  kCtI64 = 6,
  kCtDouble = 7,
  kCtBinary = 8,
  kCtList = 9,
  kCtSet = 10,
  kCtMap = 11,
  kCtStruct = 12,
};

void put_uvarint(std::string& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<char>((value & 0x7f) | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<char>(value));
}

std::uint64_t zigzag(std::int64_t value) {
  return (static_cast<std::uint64_t>(value) << 1) ^ static_cast<std::uint64_t>(value >> 63);
}

std::int64_t unzigzag(std::uint64_t value) {
  return static_cast<std::int64_t>(value >> 1) ^ -static_cast<std::int64_t>(value & 1);
}

class ThriftWriter {
 public:
  std::string& out() { return buffer_; }

  void begin_struct() { last_ids_.push_back(0); }
  void end_struct() {
    buffer_.push_back(static_cast<char>(kCtStop));
    last_ids_.pop_back();
  }

  void field_header(int id, CompactType type) {
    int& last = last_ids_.back();
    const int delta = id - last;
    if (delta >= 1 && delta <= 15) {
      buffer_.push_back(static_cast<char>((delta << 4) | type));
    } else {
      buffer_.push_back(static_cast<char>(type));
      put_uvarint(buffer_, zigzag(id));
    }
    last = id;
  }

  void field_i32(int id, std::int32_t value) {
    field_header(id, kCtI32);
    put_uvarint(buffer_, zigzag(value));
  }
  void field_i64(int id, std::int64_t value) {
    field_header(id, kCtI64);
    put_uvarint(buffer_, zigzag(value));
  }
  void field_binary(int id, const std::string& value) {
    field_header(id, kCtBinary);
    put_uvarint(buffer_, value.size());
    buffer_ += value;
  }
  void list_header(std::size_t size, CompactType elem) {
    if (size < 15) {
      buffer_.push_back(static_cast<char>((size << 4) | elem));
    } else {
      buffer_.push_back(static_cast<char>(0xF0 | elem));
      put_uvarint(buffer_, size);
    }
  }

 private:
  std::string buffer_;
  std::vector<int> last_ids_{0};
};

class ThriftReader {
 public:
  ThriftReader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}

  std::uint64_t uvarint() {
    std::uint64_t value = 0;
    int shift = 0;
    while (true) {
      const std::uint8_t byte = next();
      value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) break;
      shift += 7;
    }
    return value;
  }

  std::int64_t varint() { return unzigzag(uvarint()); }

  std::string binary() {
    const auto len = uvarint();
    check(len);
    std::string value(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return value;
  }

  struct FieldHeader {
    int id = 0;
    CompactType type = kCtStop;
    bool bool_value = false;
  };

  FieldHeader field_header(int last_id) {
    const std::uint8_t byte = next();
    FieldHeader header;
    if (byte == 0) return header;
    const int delta = byte >> 4;
    auto raw = static_cast<CompactType>(byte & 0x0f);
    header.id = delta != 0 ? last_id + delta : static_cast<int>(unzigzag(uvarint()));
    if (raw == kCtBoolTrue || raw == kCtBoolFalse) {
      header.bool_value = raw == kCtBoolTrue;
      raw = kCtBoolTrue;
    }
    header.type = raw;
    return header;
  }

  struct ListHeader {
    std::size_t size = 0;
    CompactType elem = kCtStop;
  };

  ListHeader list_header() {
    const std::uint8_t byte = next();
    ListHeader header;
    header.elem = static_cast<CompactType>(byte & 0x0f);
    const std::size_t short_size = byte >> 4;
    header.size = short_size == 15 ? uvarint() : short_size;
    return header;
  }

  void skip(CompactType type) {
    switch (type) {
      case kCtBoolTrue:
      case kCtBoolFalse:
        return;  // value lives in the field header
      case kCtByte: pos_ += 1; return;
      case kCtI16:
      case kCtI32:
      case kCtI64: uvarint(); return;
      case kCtDouble: pos_ += 8; return;
      case kCtBinary: {
        const auto len = uvarint();
        check(len);
        pos_ += len;
        return;
      }
      case kCtList:
      case kCtSet: {
        const auto header = list_header();
        for (std::size_t i = 0; i < header.size; ++i) skip(header.elem);
        return;
      }
      case kCtMap: {
        const std::uint8_t head = next();
        if (head == 0) return;
        const auto size = uvarint();
        (void)head;
        for (std::size_t i = 0; i < size; ++i) {
          skip(static_cast<CompactType>(head >> 4));
          skip(static_cast<CompactType>(head & 0x0f));
        }
        return;
      }
      case kCtStruct: {
        int last = 0;
        while (true) {
          const auto field = field_header(last);
          if (field.type == kCtStop) return;
          last = field.id;
          skip(field.type);
        }
      }
      default: throw IoError("cannot skip unknown thrift type");
    }
  }

  std::size_t position() const { return pos_; }

 private:
  std::uint8_t next() {
    check(1);
    return data_[pos_++];
  }
  void check(std::uint64_t need) const {
    if (pos_ + need > size_) throw IoError("truncated parquet metadata");
  }
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

// ---- parquet enums (values from parquet.thrift) ----

enum PhysicalType : std::int32_t {
  kPtInt32 = 1,
  kPtInt64 = 2,
  kPtFloat = 4,
  kPtDouble = 5,
  kPtByteArray = 6,
};

constexpr std::int32_t kRepetitionRequired = 0;
constexpr std::int32_t kRepetitionOptional = 1;
constexpr std::int32_t kRepetitionRepeated = 2;
constexpr std::int32_t kConvertedUtf8 = 0;
constexpr std::int32_t kConvertedList = 3;
constexpr std::int32_t kEncodingPlain = 0;
constexpr std::int32_t kEncodingRle = 3;
constexpr std::int32_t kCodecUncompressed = 0;
constexpr std::int32_t kPageTypeData = 0;

struct SchemaElem {
  std::int32_t type = -1;
  std::int32_t repetition = -1;
  std::string name;
  std::int32_t num_children = 0;
  std::int32_t converted = -1;
};

struct ColumnMeta {
  std::int32_t type = -1;
  std::vector<std::string> path;
  std::int32_t codec = 0;
  std::int64_t num_values = 0;
  std::int64_t data_page_offset = -1;
};

struct FileMeta {
  std::int64_t num_rows = 0;
  std::vector<SchemaElem> schema;
  std::vector<ColumnMeta> columns;  // single row group
};

// ---- level encoding: RLE/bit-packed hybrid ----

std::string encode_levels(const std::vector<std::uint8_t>& levels, int bit_width) {
  // One bit-packed run covering everything, padded to a multiple of 8 values.
  std::string body;
  const std::size_t groups = (levels.size() + 7) / 8;
  put_uvarint(body, (groups << 1) | 1);
  std::uint64_t bit_buffer = 0;
  int bits = 0;
  for (std::size_t i = 0; i < groups * 8; ++i) {
    const std::uint64_t value = i < levels.size() ? levels[i] : 0;
    bit_buffer |= value << bits;
    bits += bit_width;
    while (bits >= 8) {
      body.push_back(static_cast<char>(bit_buffer & 0xff));
      bit_buffer >>= 8;
      bits -= 8;
    }
  }
  if (bits > 0) body.push_back(static_cast<char>(bit_buffer & 0xff));

  std::string out;
  const std::uint32_t len = static_cast<std::uint32_t>(body.size());
  out.append(reinterpret_cast<const char*>(&len), 4);
  out += body;
  return out;
}

std::vector<std::uint8_t> decode_levels(const unsigned char* data, std::size_t size,
                                        int bit_width, std::size_t count,
                                        std::size_t* consumed) {
  std::uint32_t section;
  if (size < 4) throw IoError("truncated level section");
  std::memcpy(&section, data, 4);
  if (4u + section > size) throw IoError("level section overruns page");
  const unsigned char* p = data + 4;
  const unsigned char* end = p + section;
  std::vector<std::uint8_t> levels;
  levels.reserve(count);
  const int byte_width = (bit_width + 7) / 8;
  while (levels.size() < count && p < end) {
    // hybrid run header
    std::uint64_t header = 0;
    int shift = 0;
    while (true) {
      const std::uint8_t byte = *p++;
      header |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) break;
      shift += 7;
    }
    if (header & 1) {
      const std::size_t groups = header >> 1;
      std::uint64_t bit_buffer = 0;
      int bits = 0;
      for (std::size_t i = 0; i < groups * 8; ++i) {
        while (bits < bit_width && p < end) {
          bit_buffer |= static_cast<std::uint64_t>(*p++) << bits;
          bits += 8;
        }
        const std::uint8_t value =
            static_cast<std::uint8_t>(bit_buffer & ((1u << bit_width) - 1));
        bit_buffer >>= bit_width;
        bits -= bit_width;
        if (levels.size() < count) levels.push_back(value);
      }
    } else {
      const std::size_t run = header >> 1;
      std::uint32_t value = 0;
      for (int b = 0; b < byte_width; ++b) value |= static_cast<std::uint32_t>(*p++) << (8 * b);
      for (std::size_t i = 0; i < run && levels.size() < count; ++i) {
        levels.push_back(static_cast<std::uint8_t>(value));
      }
    }
  }
  if (levels.size() < count) throw IoError("level section too short");
  *consumed = 4u + section;
  return levels;
}

// ---- writer ----

enum class ColKind { kInt, kReal, kString, kListInt, kListReal, kListString };

ColKind classify_column(const Column& column) {
  bool any_list = false, any_string = false, any_real = false;
  for (const auto& cell : column.cells) {
    if (is_tensor(cell)) {
      any_list = true;
      any_real = true;
    } else if (is_list(cell)) {
      any_list = true;
      for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
        if (std::holds_alternative<std::string>(item)) any_string = true;
        if (std::holds_alternative<double>(item)) any_real = true;
      }
    } else if (std::holds_alternative<std::string>(cell)) {
      any_string = true;
    } else if (std::holds_alternative<double>(cell)) {
      any_real = true;
    }
  }
  if (any_list) {
    if (any_string) return ColKind::kListString;
    return any_real ? ColKind::kListReal : ColKind::kListInt;
  }
  if (any_string) return ColKind::kString;
  return any_real ? ColKind::kReal : ColKind::kInt;
}

bool kind_is_list(ColKind kind) {
  return kind == ColKind::kListInt || kind == ColKind::kListReal || kind == ColKind::kListString;
}

PhysicalType kind_physical(ColKind kind) {
  switch (kind) {
    case ColKind::kInt:
    case ColKind::kListInt: return kPtInt64;
    case ColKind::kReal:
    case ColKind::kListReal: return kPtDouble;
    default: return kPtByteArray;
  }
}

void append_plain(std::string& out, PhysicalType type, const Scalar& value) {
  if (type == kPtInt64) {
    std::int64_t v = 0;
    if (const auto* i = std::get_if<std::int64_t>(&value)) v = *i;
    else if (const auto* d = std::get_if<double>(&value)) v = static_cast<std::int64_t>(*d);
    out.append(reinterpret_cast<const char*>(&v), 8);
  } else if (type == kPtDouble) {
    double v = std::nan("");
    if (const auto* i = std::get_if<std::int64_t>(&value)) v = static_cast<double>(*i);
    else if (const auto* d = std::get_if<double>(&value)) v = *d;
    out.append(reinterpret_cast<const char*>(&v), 8);
  } else {
    const std::string text = scalar_to_string(value);
    const std::uint32_t len = static_cast<std::uint32_t>(text.size());
    out.append(reinterpret_cast<const char*>(&len), 4);
    out += text;
  }
}

struct EncodedChunk {
  std::string page;  // header + payload
  ColumnMeta meta;
};

EncodedChunk encode_chunk(const std::string& name, const Column& column, ColKind kind) {
  const PhysicalType physical = kind_physical(kind);
  const bool list = kind_is_list(kind);

  std::vector<std::uint8_t> rep_levels;
  std::vector<std::uint8_t> def_levels;
  std::string values;
  std::size_t num_entries = 0;

  if (!list) {
    for (const auto& cell : column.cells) {
      ++num_entries;
      if (is_null(cell)) {
        def_levels.push_back(0);
      } else {
        def_levels.push_back(1);
        append_plain(values, physical, cell_to_scalar(cell));
      }
    }
  } else {
    for (const auto& cell : column.cells) {
      std::vector<Scalar> items;
      if (is_tensor(cell)) {
        for (double v : std::get<std::vector<double>>(cell)) items.emplace_back(v);
      } else if (is_list(cell)) {
        for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
          if (!is_null(item)) items.push_back(item);
        }
      } else if (!is_null(cell)) {
        items.push_back(cell_to_scalar(cell));
      }
      if (is_null(cell)) {
        rep_levels.push_back(0);
        def_levels.push_back(0);
        ++num_entries;
      } else if (items.empty()) {
        rep_levels.push_back(0);
        def_levels.push_back(1);
        ++num_entries;
      } else {
        for (std::size_t i = 0; i < items.size(); ++i) {
          rep_levels.push_back(i == 0 ? 0 : 1);
          def_levels.push_back(2);
          append_plain(values, physical, items[i]);
          ++num_entries;
        }
      }
    }
  }

  std::string payload;
  if (list) payload += encode_levels(rep_levels, 1);
  payload += encode_levels(def_levels, list ? 2 : 1);
  payload += values;

  ThriftWriter header;
  header.begin_struct();
  header.field_i32(1, kPageTypeData);
  header.field_i32(2, static_cast<std::int32_t>(payload.size()));
  header.field_i32(3, static_cast<std::int32_t>(payload.size()));
  header.field_header(5, kCtStruct);
  header.begin_struct();
  header.field_i32(1, static_cast<std::int32_t>(num_entries));
  header.field_i32(2, kEncodingPlain);
  header.field_i32(3, kEncodingRle);
  header.field_i32(4, kEncodingRle);
  header.end_struct();
  header.end_struct();

  EncodedChunk chunk;
  chunk.page = header.out() + payload;
  chunk.meta.type = physical;
  chunk.meta.path = list ? std::vector<std::string>{name, "list", "element"}
                         : std::vector<std::string>{name};
  chunk.meta.codec = kCodecUncompressed;
  chunk.meta.num_values = static_cast<std::int64_t>(num_entries);
  return chunk;
}

}  // namespace

void write_parquet(const std::string& path, const TableData& table) {
  std::string out = "PAR1";
  std::vector<EncodedChunk> chunks;
  std::vector<ColKind> kinds;
  for (std::size_t c = 0; c < table.order.size(); ++c) {
    const ColKind kind = classify_column(table.columns[c]);
    kinds.push_back(kind);
    auto chunk = encode_chunk(table.order[c], table.columns[c], kind);
    chunk.meta.data_page_offset = static_cast<std::int64_t>(out.size());
    out += chunk.page;
    chunks.push_back(std::move(chunk));
  }

  ThriftWriter meta;
  meta.begin_struct();
  meta.field_i32(1, 1);  // version

  // schema element list, depth first
  std::size_t element_count = 1;
  for (const auto kind : kinds) element_count += kind_is_list(kind) ? 3 : 1;
  meta.field_header(2, kCtList);
  meta.list_header(element_count, kCtStruct);
  {
    ThriftWriter& w = meta;
    // root
    w.begin_struct();
    w.field_binary(4, "schema");
    w.field_i32(5, static_cast<std::int32_t>(table.order.size()));
    w.end_struct();
    for (std::size_t c = 0; c < table.order.size(); ++c) {
      const ColKind kind = kinds[c];
      const PhysicalType physical = kind_physical(kind);
      if (!kind_is_list(kind)) {
        w.begin_struct();
        w.field_i32(1, physical);
        w.field_i32(3, kRepetitionOptional);
        w.field_binary(4, table.order[c]);
        if (physical == kPtByteArray) w.field_i32(6, kConvertedUtf8);
        w.end_struct();
      } else {
        w.begin_struct();
        w.field_i32(3, kRepetitionOptional);
        w.field_binary(4, table.order[c]);
        w.field_i32(5, 1);
        w.field_i32(6, kConvertedList);
        w.end_struct();
        w.begin_struct();
        w.field_i32(3, kRepetitionRepeated);
        w.field_binary(4, "list");
        w.field_i32(5, 1);
        w.end_struct();
        w.begin_struct();
        w.field_i32(1, physical);
        w.field_i32(3, kRepetitionRequired);
        w.field_binary(4, "element");
        if (physical == kPtByteArray) w.field_i32(6, kConvertedUtf8);
        w.end_struct();
      }
    }
  }

  meta.field_i64(3, static_cast<std::int64_t>(table.row_count));

  // single row group
  meta.field_header(4, kCtList);
  meta.list_header(1, kCtStruct);
  meta.begin_struct();
  meta.field_header(1, kCtList);
  meta.list_header(chunks.size(), kCtStruct);
  std::int64_t total_bytes = 0;
  for (const auto& chunk : chunks) total_bytes += static_cast<std::int64_t>(chunk.page.size());
  for (const auto& chunk : chunks) {
    meta.begin_struct();  // ColumnChunk
    meta.field_i64(2, chunk.meta.data_page_offset);
    meta.field_header(3, kCtStruct);
    meta.begin_struct();  // ColumnMetaData
    meta.field_i32(1, chunk.meta.type);
    meta.field_header(2, kCtList);
    meta.list_header(1, kCtI32);
    put_uvarint(meta.out(), zigzag(kEncodingPlain));
    meta.field_header(3, kCtList);
    meta.list_header(chunk.meta.path.size(), kCtBinary);
    for (const auto& part : chunk.meta.path) {
      put_uvarint(meta.out(), part.size());
      meta.out() += part;
    }
    meta.field_i32(4, chunk.meta.codec);
    meta.field_i64(5, chunk.meta.num_values);
    meta.field_i64(6, static_cast<std::int64_t>(chunk.page.size()));
    meta.field_i64(7, static_cast<std::int64_t>(chunk.page.size()));
    meta.field_i64(9, chunk.meta.data_page_offset);
    meta.end_struct();
    meta.end_struct();
  }
  meta.field_i64(2, total_bytes);
  meta.field_i64(3, static_cast<std::int64_t>(table.row_count));
  meta.end_struct();

  meta.field_binary(6, "autog parquet-lite");
  meta.end_struct();

  const std::uint32_t footer_len = static_cast<std::uint32_t>(meta.out().size());
  out += meta.out();
  out.append(reinterpret_cast<const char*>(&footer_len), 4);
  out += "PAR1";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write parquet file '" + path + "'");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

namespace {

SchemaElem parse_schema_element(ThriftReader& reader) {
  SchemaElem elem;
  int last = 0;
  while (true) {
    const auto field = reader.field_header(last);
    if (field.type == kCtStop) break;
    last = field.id;
    switch (field.id) {
      case 1: elem.type = static_cast<std::int32_t>(reader.varint()); break;
      case 3: elem.repetition = static_cast<std::int32_t>(reader.varint()); break;
      case 4: elem.name = reader.binary(); break;
      case 5: elem.num_children = static_cast<std::int32_t>(reader.varint()); break;
      case 6: elem.converted = static_cast<std::int32_t>(reader.varint()); break;
      default: reader.skip(field.type); break;
    }
  }
  return elem;
}

ColumnMeta parse_column_meta(ThriftReader& reader) {
  ColumnMeta meta;
  int last = 0;
  while (true) {
    const auto field = reader.field_header(last);
    if (field.type == kCtStop) break;
    last = field.id;
    switch (field.id) {
      case 1: meta.type = static_cast<std::int32_t>(reader.varint()); break;
      case 3: {
        const auto header = reader.list_header();
        for (std::size_t i = 0; i < header.size; ++i) meta.path.push_back(reader.binary());
        break;
      }
      case 4: meta.codec = static_cast<std::int32_t>(reader.varint()); break;
      case 5: meta.num_values = reader.varint(); break;
      case 9: meta.data_page_offset = reader.varint(); break;
      case 2: reader.skip(field.type); break;
      default: reader.skip(field.type); break;
    }
  }
  return meta;
}

FileMeta parse_file_meta(const unsigned char* data, std::size_t size) {
  ThriftReader reader(data, size);
  FileMeta meta;
  int last = 0;
  while (true) {
    const auto field = reader.field_header(last);
    if (field.type == kCtStop) break;
    last = field.id;
    switch (field.id) {
      case 2: {
        const auto header = reader.list_header();
        for (std::size_t i = 0; i < header.size; ++i) {
          meta.schema.push_back(parse_schema_element(reader));
        }
        break;
      }
      case 3: meta.num_rows = reader.varint(); break;
      case 4: {
        const auto groups = reader.list_header();
        for (std::size_t g = 0; g < groups.size; ++g) {
          int rg_last = 0;
          while (true) {
            const auto rg_field = reader.field_header(rg_last);
            if (rg_field.type == kCtStop) break;
            rg_last = rg_field.id;
            if (rg_field.id == 1) {
              const auto chunks = reader.list_header();
              for (std::size_t c = 0; c < chunks.size; ++c) {
                int cc_last = 0;
                ColumnMeta column;
                while (true) {
                  const auto cc_field = reader.field_header(cc_last);
                  if (cc_field.type == kCtStop) break;
                  cc_last = cc_field.id;
                  if (cc_field.id == 3) column = parse_column_meta(reader);
                  else reader.skip(cc_field.type);
                }
                meta.columns.push_back(std::move(column));
              }
            } else {
              reader.skip(rg_field.type);
            }
          }
          if (groups.size > 1) {
            throw IoError("multiple parquet row groups are not supported");
          }
        }
        break;
      }
      default: reader.skip(field.type); break;
    }
  }
  return meta;
}

struct PageHeaderLite {
  std::int32_t page_type = -1;
  std::int32_t compressed_size = 0;
  std::int32_t num_values = 0;
  std::int32_t value_encoding = kEncodingPlain;
  std::size_t header_bytes = 0;
};

PageHeaderLite parse_page_header(const unsigned char* data, std::size_t size) {
  ThriftReader reader(data, size);
  PageHeaderLite header;
  int last = 0;
  while (true) {
    const auto field = reader.field_header(last);
    if (field.type == kCtStop) break;
    last = field.id;
    switch (field.id) {
      case 1: header.page_type = static_cast<std::int32_t>(reader.varint()); break;
      case 3: header.compressed_size = static_cast<std::int32_t>(reader.varint()); break;
      case 5: {
        int dp_last = 0;
        while (true) {
          const auto dp_field = reader.field_header(dp_last);
          if (dp_field.type == kCtStop) break;
          dp_last = dp_field.id;
          if (dp_field.id == 1) header.num_values = static_cast<std::int32_t>(reader.varint());
          else if (dp_field.id == 2) {
            header.value_encoding = static_cast<std::int32_t>(reader.varint());
          } else {
            reader.skip(dp_field.type);
          }
        }
        break;
      }
      default: reader.skip(field.type); break;
    }
  }
  header.header_bytes = reader.position();
  return header;
}

Scalar read_plain(const unsigned char*& p, std::int32_t type) {
  if (type == kPtInt64) {
    std::int64_t v;
    std::memcpy(&v, p, 8);
    p += 8;
    return v;
  }
  if (type == kPtInt32) {
    std::int32_t v;
    std::memcpy(&v, p, 4);
    p += 4;
    return static_cast<std::int64_t>(v);
  }
  if (type == kPtDouble) {
    double v;
    std::memcpy(&v, p, 8);
    p += 8;
    if (std::isnan(v)) return Scalar{};
    return v;
  }
  if (type == kPtFloat) {
    float v;
    std::memcpy(&v, p, 4);
    p += 4;
    if (std::isnan(v)) return Scalar{};
    return static_cast<double>(v);
  }
  if (type == kPtByteArray) {
    std::uint32_t len;
    std::memcpy(&len, p, 4);
    p += 4;
    std::string value(reinterpret_cast<const char*>(p), len);
    p += len;
    return value;
  }
  throw IoError("unsupported parquet physical type " + std::to_string(type));
}

}  // namespace

RawTable read_parquet(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parquet file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string blob = buffer.str();
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());

  if (blob.size() < 12 || blob.compare(0, 4, "PAR1") != 0 ||
      blob.compare(blob.size() - 4, 4, "PAR1") != 0) {
    throw IoError("'" + path + "' is not a parquet file");
  }
  std::uint32_t footer_len;
  std::memcpy(&footer_len, bytes + blob.size() - 8, 4);
  if (footer_len + 12 > blob.size()) throw IoError("parquet footer overruns file");
  const std::size_t footer_start = blob.size() - 8 - footer_len;
  const FileMeta meta = parse_file_meta(bytes + footer_start, footer_len);

  // Schema walk: top-level fields are either primitive leaves or LIST groups.
  struct FieldShape {
    std::string name;
    bool list = false;
  };
  std::vector<FieldShape> fields;
  if (meta.schema.empty()) throw IoError("parquet file has no schema");
  std::size_t cursor = 1;
  for (std::int32_t f = 0; f < meta.schema[0].num_children; ++f) {
    if (cursor >= meta.schema.size()) throw IoError("parquet schema tree truncated");
    const auto& elem = meta.schema[cursor];
    FieldShape shape;
    shape.name = elem.name;
    if (elem.num_children == 0) {
      cursor += 1;
    } else {
      if (elem.num_children != 1 || cursor + 2 >= meta.schema.size() ||
          meta.schema[cursor + 1].repetition != kRepetitionRepeated ||
          meta.schema[cursor + 1].num_children != 1 ||
          meta.schema[cursor + 2].num_children != 0) {
        throw IoError("unsupported parquet structure at column '" + elem.name +
                      "' (only flat columns and single-level lists are supported)");
      }
      shape.list = true;
      cursor += 3;
    }
    fields.push_back(std::move(shape));
  }
  if (meta.columns.size() != fields.size()) {
    throw IoError("parquet column chunk count does not match schema");
  }

  RawTable table;
  table.row_count = static_cast<std::size_t>(meta.num_rows);
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const auto& field = fields[c];
    const auto& chunk = meta.columns[c];
    if (chunk.codec != kCodecUncompressed) {
      throw IoError("compressed parquet is not supported (column '" + field.name + "')");
    }
    Column column;
    std::int64_t remaining = chunk.num_values;
    std::size_t offset = static_cast<std::size_t>(chunk.data_page_offset);
    std::vector<Scalar> current_list;
    bool row_open = false;  // a def==2 run is accumulating into current_list

    while (remaining > 0) {
      const auto page = parse_page_header(bytes + offset, blob.size() - offset);
      if (page.page_type != kPageTypeData) {
        throw IoError("unsupported parquet page type (dictionary pages are not supported)");
      }
      if (page.value_encoding != kEncodingPlain) {
        throw IoError("unsupported parquet value encoding " +
                      std::to_string(page.value_encoding) + " (PLAIN only)");
      }
      const unsigned char* payload = bytes + offset + page.header_bytes;
      std::size_t payload_size = static_cast<std::size_t>(page.compressed_size);
      const std::size_t entries = static_cast<std::size_t>(page.num_values);

      std::vector<std::uint8_t> rep_levels(entries, 0);
      std::vector<std::uint8_t> def_levels(entries, 1);
      std::size_t consumed = 0;
      if (field.list) {
        rep_levels = decode_levels(payload, payload_size, 1, entries, &consumed);
        payload += consumed;
        payload_size -= consumed;
        def_levels = decode_levels(payload, payload_size, 2, entries, &consumed);
        payload += consumed;
        payload_size -= consumed;
      } else {
        def_levels = decode_levels(payload, payload_size, 1, entries, &consumed);
        payload += consumed;
        payload_size -= consumed;
      }

      const unsigned char* values = payload;
      for (std::size_t i = 0; i < entries; ++i) {
        if (!field.list) {
          if (def_levels[i] == 0) column.cells.emplace_back();
          else column.cells.push_back(scalar_to_cell(read_plain(values, chunk.type)));
          continue;
        }
        if (rep_levels[i] == 0) {
          if (row_open) {
            column.cells.emplace_back(std::move(current_list));
            current_list.clear();
            row_open = false;
          }
          if (def_levels[i] == 0) {
            column.cells.emplace_back();  // null list
          } else if (def_levels[i] == 1) {
            column.cells.emplace_back(std::vector<Scalar>{});
          } else {
            current_list.push_back(read_plain(values, chunk.type));
            row_open = true;
          }
        } else {
          current_list.push_back(read_plain(values, chunk.type));
        }
      }
      remaining -= static_cast<std::int64_t>(entries);
      offset += page.header_bytes + static_cast<std::size_t>(page.compressed_size);
    }
    if (row_open) {
      column.cells.emplace_back(std::move(current_list));
      current_list.clear();
    }
    if (column.cells.size() != table.row_count) {
      throw IoError("parquet column '" + field.name + "' has " +
                    std::to_string(column.cells.size()) + " rows, expected " +
                    std::to_string(table.row_count));
    }
    table.order.push_back(field.name);
    table.columns.push_back(std::move(column));
  }
  return table;
}

}  // namespace autog
