#include "attrforge/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace attrforge {

bool is_valid_utf8(std::string_view bytes) {
    const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
    const auto length = static_cast<int32_t>(bytes.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) return false;
    }
    return true;
}

std::optional<std::string> nfc_normalize(std::string_view utf8) {
    if (!is_valid_utf8(utf8)) return std::nullopt;

    // ASCII is already NFC.
    bool ascii = true;
    for (unsigned char ch : utf8) {
        if (ch >= 0x80) {
            ascii = false;
            break;
        }
    }
    if (ascii) return std::string(utf8);

    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) return std::nullopt;

    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    if (nfc->isNormalized(source, status) && U_SUCCESS(status)) return std::string(utf8);

    status = U_ZERO_ERROR;
    const icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) return std::nullopt;

    std::string out;
    normalized.toUTF8String(out);
    return out;
}

}  // namespace attrforge
