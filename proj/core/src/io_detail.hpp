#pragma once

#include <cstdint>
#include <string>

namespace autog::io_detail {

bool parse_int(const std::string& text, std::int64_t* out);
bool parse_real(const std::string& text, double* out);

}  // namespace autog::io_detail
