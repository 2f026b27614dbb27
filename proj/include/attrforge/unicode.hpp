#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace attrforge {

// NFC-normalizes a UTF-8 string. Returns nullopt when the input is not valid UTF-8.
std::optional<std::string> nfc_normalize(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

}  // namespace attrforge
